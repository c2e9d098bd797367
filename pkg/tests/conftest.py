"""Shared test helpers: basis states, full unitaries, instance strategies."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from knapqaoa import BatteryInstance, Circuit, Gate, sim


def basis_state(num_qubits: int, index: int) -> sim.Statevector:
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return sim.Statevector(num_qubits, amps)


def circuit_unitary(circ: Circuit) -> np.ndarray:
    """Full 2^n x 2^n matrix, built column by column through the simulator."""
    dim = 1 << circ.num_qubits
    cols = []
    for i in range(dim):
        cols.append(sim.apply(basis_state(circ.num_qubits, i), circ).amplitudes)
    return np.array(cols).T


def permutation_action(circ: Circuit, index: int) -> int:
    """Image of a basis state under a permutation circuit (X/CX/CCX only)."""
    out = sim.apply(basis_state(circ.num_qubits, index), circ)
    hits = np.flatnonzero(np.abs(out.amplitudes) > 1e-9)
    assert len(hits) == 1, "circuit is not a basis permutation"
    return int(hits[0])


@st.composite
def gates(draw, num_qubits: int, max_controls: int = 2) -> Gate:
    kind = draw(st.sampled_from(["h", "x", "rx", "phase"]))
    n_controls = draw(st.integers(0, min(max_controls, num_qubits - 1)))
    perm = draw(st.permutations(range(num_qubits)))
    theta = draw(st.floats(-6.3, 6.3)) if kind in ("rx", "phase") else 0.0
    return Gate(kind, perm[0], tuple(perm[1 : 1 + n_controls]), theta)


@st.composite
def circuits(draw, num_qubits: int, max_gates: int = 50) -> Circuit:
    n_gates = draw(st.integers(0, max_gates))
    return Circuit(num_qubits, tuple(draw(gates(num_qubits)) for _ in range(n_gates)))


@st.composite
def instances(draw, max_n: int = 4, c_max_rule: str = "n") -> BatteryInstance:
    n = draw(st.integers(1, max_n))
    ints = lambda hi: st.lists(st.integers(0, hi), min_size=n, max_size=n)
    lam1 = tuple(draw(ints(5)))
    lam2 = tuple(draw(ints(3)))
    c1 = tuple(draw(ints(2)))
    c2 = tuple(draw(ints(1)))
    c_max = n if c_max_rule == "n" else draw(st.integers(1, 2 * n))
    return BatteryInstance(lam1, lam2, c1, c2, c_max)
