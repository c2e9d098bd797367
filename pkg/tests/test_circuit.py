import math

import numpy as np
import pytest
from hypothesis import given, settings

from knapqaoa import (
    CapacityError,
    Circuit,
    CircuitBuilder,
    Gate,
    ValidationError,
    compose,
    inverse,
    multi_controlled_x,
    resources,
    sim,
)

from conftest import basis_state, circuit_unitary, circuits, permutation_action


class TestGate:
    def test_rejects_unknown_kind(self):
        with pytest.raises(ValidationError):
            Gate("t", 0)

    def test_rejects_duplicate_controls(self):
        with pytest.raises(ValidationError):
            Gate("x", 0, (1, 1))

    def test_rejects_target_in_controls(self):
        with pytest.raises(ValidationError):
            Gate("x", 0, (0, 1))

    def test_controls_sorted(self):
        assert Gate("x", 0, (3, 1)).controls == (1, 3)

    def test_adjoint(self):
        assert Gate("rx", 0, theta=0.3).adjoint() == Gate("rx", 0, theta=-0.3)
        assert Gate("phase", 1, theta=0.7).adjoint() == Gate("phase", 1, theta=-0.7)
        g = Gate("x", 0, (1,))
        assert g.adjoint() is g


class TestCircuit:
    def test_rejects_out_of_range_gate(self):
        with pytest.raises(ValidationError):
            Circuit(1, (Gate("x", 1),))

    def test_compose_concatenates(self):
        a = Circuit(2, (Gate("x", 0),))
        b = Circuit(2, (Gate("h", 1),))
        c = compose(a, b)
        assert len(c) == len(a) + len(b)
        assert c.gates == a.gates + b.gates

    def test_compose_empty_is_identity_element(self):
        c = Circuit(3, (Gate("x", 0), Gate("h", 2)))
        assert compose(Circuit(3), c) == c
        assert compose(c, Circuit(3)) == c

    def test_compose_mismatch_raises(self):
        with pytest.raises(ValidationError):
            compose(Circuit(2), Circuit(3))

    def test_double_x_is_identity_unitary(self):
        c = compose(Circuit(1, (Gate("x", 0),)), Circuit(1, (Gate("x", 0),)))
        assert np.allclose(circuit_unitary(c), np.eye(2), atol=1e-12)

    def test_inverse_structure(self):
        assert inverse(Circuit(1, (Gate("rx", 0, theta=0.3),))).gates == (
            Gate("rx", 0, theta=-0.3),
        )
        c = Circuit(2, (Gate("h", 0), Gate("x", 1, (0,))))
        assert inverse(c).gates == (Gate("x", 1, (0,)), Gate("h", 0))

    def test_inverse_involution(self):
        c = Circuit(
            3,
            (Gate("h", 0), Gate("rx", 1, (0,), 0.5), Gate("phase", 2, (), -1.2)),
            spans=(("block", 0, 3),),
        )
        assert inverse(inverse(c)) == c

    def test_dump_format(self):
        b = CircuitBuilder(3)
        with b.span("demo"):
            b.ccx(0, 1, 2)
            b.phase(0.5, 0)
        text = b.build().dump()
        assert "# qubits=3 gates=2" in text
        assert "# span demo: [0:2)" in text
        assert "X controls=0,1 target=2" in text
        assert "PHASE theta=0.5 target=0" in text


@settings(max_examples=40, deadline=None)
@given(circuits(num_qubits=4, max_gates=30))
def test_apply_then_inverse_restores_state(circ):
    state = sim.new_uniform(4)
    there = sim.apply(state, circ)
    back = sim.apply(there, inverse(circ))
    assert np.max(np.abs(back.amplitudes - state.amplitudes)) < 1e-9


@pytest.mark.parametrize(
    "gate",
    [
        Gate("h", 0),
        Gate("x", 0),
        Gate("rx", 0, theta=0.731),
        Gate("phase", 0, theta=-2.1),
        Gate("x", 1, (0,)),
        Gate("rx", 2, (0, 1), 1.234),
        Gate("phase", 2, (0, 1), 0.5),
    ],
)
def test_gate_unitarity_on_embeddings(gate):
    n = max(gate.qubits) + 1
    u = circuit_unitary(Circuit(n, (gate,)))
    assert np.allclose(u @ u.conj().T, np.eye(1 << n), atol=1e-12)


def test_phase_gate_matrix():
    u = circuit_unitary(Circuit(1, (Gate("phase", 0, theta=0.9),)))
    assert np.allclose(u, np.diag([1.0, np.exp(0.9j)]), atol=1e-12)


def test_rx_gate_matrix():
    theta = 1.1
    u = circuit_unitary(Circuit(1, (Gate("rx", 0, theta=theta),)))
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    assert np.allclose(u, np.array([[c, -1j * s], [-1j * s, c]]), atol=1e-12)


class TestMultiControlledX:
    def test_single_control_is_cnot(self):
        c = multi_controlled_x(2, (0,), 1)
        for i in range(4):
            expect = i ^ 2 if i & 1 else i
            assert permutation_action(c, i) == expect

    def test_two_controls_is_toffoli(self):
        c = multi_controlled_x(3, (0, 1), 2)
        for i in range(8):
            expect = i ^ 4 if (i & 3) == 3 else i
            assert permutation_action(c, i) == expect

    def test_four_controls_two_work(self):
        c = multi_controlled_x(7, (0, 1, 2, 3), 4, work=(5, 6))
        for pattern in range(16):
            out = permutation_action(c, pattern)
            flips = (out >> 4) & 1
            assert flips == (1 if pattern == 0b1111 else 0)
            assert (out >> 5) & 3 == 0  # work qubits restored
            assert out & 15 == pattern

    def test_no_extra_qubit_disturbed(self):
        # exhaustively on 7 qubits: spectators (incl. work at exit) untouched
        c = multi_controlled_x(7, (1, 2, 4), 5, work=(6,))
        for i in range(1 << 7):
            out = permutation_action(c, i)
            if i & 0b0010110 == 0b0010110:
                assert out == i ^ (1 << 5)
            else:
                assert out == i

    def test_insufficient_work_raises(self):
        with pytest.raises(CapacityError):
            multi_controlled_x(6, (0, 1, 2, 3), 4, work=(5,))

    def test_overlap_raises(self):
        with pytest.raises(ValidationError):
            multi_controlled_x(4, (0, 1), 1)


class TestResources:
    def test_empty(self):
        r = resources(Circuit(5))
        assert (r.gate_count, r.depth, r.qubit_count) == (0, 0, 5)

    def test_disjoint_gates_share_layer(self):
        r = resources(Circuit(2, (Gate("x", 0), Gate("x", 1))))
        assert r.gate_count == 2
        assert r.depth == 1

    def test_chained_gates_stack(self):
        r = resources(Circuit(2, (Gate("x", 0), Gate("x", 1, (0,)), Gate("x", 1))))
        assert r.depth == 3

    @settings(max_examples=30, deadline=None)
    @given(circuits(num_qubits=5, max_gates=40))
    def test_depth_at_most_count(self, circ):
        r = resources(circ)
        assert r.depth <= r.gate_count
