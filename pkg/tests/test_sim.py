import math

import numpy as np
import pytest
from hypothesis import given, settings

from knapqaoa import (
    CapacityError,
    Circuit,
    Gate,
    ValidationError,
    sim,
)
from knapqaoa.sim import (
    apply,
    expectation_diagonal,
    global_phase_distance,
    marginal,
    new_uniform,
    new_zero,
    probabilities,
    sample,
    states_equal_up_to_global_phase,
)

from conftest import basis_state, circuits


class TestNewUniform:
    def test_single_qubit(self):
        s = new_uniform(1)
        assert np.allclose(s.amplitudes, [1 / math.sqrt(2)] * 2)

    def test_system_plus_ancilla(self):
        s = new_uniform(2, 1)
        expect = np.zeros(8)
        expect[:4] = 0.5
        assert np.allclose(s.amplitudes, expect)

    def test_three_qubits(self):
        s = new_uniform(3)
        assert np.allclose(s.amplitudes, 2 ** (-1.5))

    def test_cap_enforced(self):
        with pytest.raises(CapacityError):
            new_uniform(sim.QUBIT_CAP, 1)

    def test_zero_system_rejected(self):
        with pytest.raises(ValidationError):
            new_uniform(0, 3)


class TestApply:
    def test_x_flips(self):
        out = apply(new_zero(1), Circuit(1, (Gate("x", 0),)))
        assert np.allclose(out.amplitudes, [0, 1])

    def test_double_hadamard_identity(self):
        out = apply(new_zero(1), Circuit(1, (Gate("h", 0), Gate("h", 0))))
        assert np.max(np.abs(out.amplitudes - [1, 0])) < 1e-12

    def test_phase_pi_on_plus(self):
        out = apply(new_uniform(1), Circuit(1, (Gate("phase", 0, theta=math.pi),)))
        assert np.allclose(out.amplitudes, [1 / math.sqrt(2), -1 / math.sqrt(2)])

    def test_out_of_range_circuit(self):
        with pytest.raises(IndexError):
            apply(new_zero(1), Circuit(2, (Gate("x", 1),)))

    def test_input_not_mutated(self):
        s = new_zero(1)
        before = s.amplitudes.copy()
        apply(s, Circuit(1, (Gate("x", 0),)))
        assert np.array_equal(s.amplitudes, before)


@settings(max_examples=30, deadline=None)
@given(circuits(num_qubits=6, max_gates=50))
def test_norm_preserved_by_random_circuits(circ):
    out = apply(new_uniform(6), circ)
    assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-9


class TestProbabilities:
    def test_plus_state(self):
        assert probabilities(new_uniform(1), (0,)) == pytest.approx({0: 0.5, 1: 0.5})

    def test_basis_state_marginal(self):
        # two-qubit state with qubit1 = 1, qubit0 = 0
        assert probabilities(basis_state(2, 0b10), (1,)) == {1: 1.0}

    def test_ancilla_untouched(self):
        assert probabilities(new_uniform(2, 1), (2,)) == {0: 1.0}

    def test_duplicate_subset_rejected(self):
        with pytest.raises(ValidationError):
            probabilities(new_uniform(2), (0, 0))

    def test_out_of_range_subset(self):
        with pytest.raises(IndexError):
            probabilities(new_uniform(2), (5,))

    @settings(max_examples=25, deadline=None)
    @given(circuits(num_qubits=5, max_gates=25))
    def test_marginalization_consistency(self, circ):
        # marginal over a subset equals summing the full distribution
        state = apply(new_uniform(5), circ)
        subset = (0, 3)
        marg = marginal(state, subset)
        full = state.amplitudes.real**2 + state.amplitudes.imag**2
        expect = np.zeros(4)
        for idx, p in enumerate(full):
            key = ((idx >> 0) & 1) | (((idx >> 3) & 1) << 1)
            expect[key] += p
        assert np.allclose(marg, expect, atol=1e-12)
        assert abs(marg.sum() - 1.0) < 1e-9


class TestSample:
    def test_deterministic_state(self):
        res = sample(basis_state(1, 1), (0,), shots=100, seed=3)
        assert res.counts == {1: 100}

    def test_seed_reproducible(self):
        a = sample(new_uniform(1), (0,), shots=500, seed=7)
        b = sample(new_uniform(1), (0,), shots=500, seed=7)
        assert a == b

    def test_binomial_bounds(self):
        res = sample(new_uniform(1), (0,), shots=10000, seed=7)
        assert 4700 <= res.counts[0] <= 5300
        assert 4700 <= res.counts[1] <= 5300
        assert sum(res.counts.values()) == res.shots

    def test_zero_shots_rejected(self):
        with pytest.raises(ValidationError):
            sample(new_uniform(1), (0,), shots=0, seed=1)


class TestExpectationDiagonal:
    def test_plus_state(self):
        f = {0: 0.0, 1: 2.0}
        assert expectation_diagonal(new_uniform(1), (0,), f.get) == pytest.approx(1.0)

    def test_zero_state_returns_f0(self):
        assert expectation_diagonal(new_zero(2), (0, 1), lambda z: 7.0 - z) == 7.0

    def test_uniform_popcount(self):
        val = expectation_diagonal(new_uniform(2), (0, 1), lambda z: bin(z).count("1"))
        assert val == pytest.approx(1.0)

    @settings(max_examples=20, deadline=None)
    @given(circuits(num_qubits=4, max_gates=20))
    def test_matches_probability_sum(self, circ):
        state = apply(new_uniform(4), circ)
        subset = (1, 2)
        f = lambda z: float(z * z - 3 * z)
        direct = expectation_diagonal(state, subset, f)
        via_probs = sum(p * f(z) for z, p in probabilities(state, subset).items())
        assert direct == pytest.approx(via_probs, abs=1e-12)


class TestGlobalPhaseComparison:
    def test_pure_global_phase_is_equal(self):
        s = new_uniform(2)
        rotated = sim.Statevector(2, s.amplitudes * np.exp(0.7j))
        assert states_equal_up_to_global_phase(s, rotated)
        assert global_phase_distance(s, rotated) < 1e-12

    def test_relative_phase_detected(self):
        s = new_uniform(1)
        other = sim.Statevector(1, s.amplitudes * np.array([1.0, -1.0]))
        assert not states_equal_up_to_global_phase(s, other)


def test_numba_and_numpy_paths_agree():
    # whichever path is active must match the pure-numpy reference closely
    rng = np.random.default_rng(5)
    amps = rng.normal(size=16) + 1j * rng.normal(size=16)
    amps /= np.linalg.norm(amps)
    for gate in [
        Gate("h", 1),
        Gate("x", 2, (0,)),
        Gate("rx", 3, (1, 2), 0.77),
        Gate("phase", 0, (3,), -1.3),
    ]:
        a = amps.copy()
        b = amps.copy()
        sim._apply_gate(a, 4, gate)
        sim._apply_gate_numpy(b, 4, gate)
        assert np.max(np.abs(a - b)) < 1e-14
