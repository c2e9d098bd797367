"""Dense statevector simulation.

Conventions, used consistently by every module in this package:

* little-endian bit order: qubit ``j`` is bit ``j`` of the basis-state index,
  so qubit 0 is the least-significant bit;
* measurement keys are plain integers packing the requested subset, bit ``k``
  of the key being the value of ``subset[k]``;
* amplitudes are a dense complex128 array of length ``2**num_qubits``.

Gate application enumerates only the amplitude pairs a gate actually touches
(controls fixed to 1, target bit split), which keeps multi-controlled gates
cheap on large registers.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .errors import CapacityError, ValidationError

#: Hard limit on simulated qubits; 2**26 complex doubles is a 1 GiB state.
QUBIT_CAP = 26

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass
class Statevector:
    """Dense state over ``num_qubits`` qubits; ``amplitudes[i]`` is <i|psi>."""

    num_qubits: int
    amplitudes: np.ndarray


@dataclass(frozen=True)
class MeasurementResult:
    """Counts from a seeded measurement of a qubit subset."""

    counts: dict[int, int]
    shots: int
    seed: int


def new_zero(num_qubits: int) -> Statevector:
    """The all-zeros basis state |0...0>."""
    if num_qubits < 1:
        raise ValidationError("need at least one qubit")
    if num_qubits > QUBIT_CAP:
        raise CapacityError(f"{num_qubits} qubits exceeds cap {QUBIT_CAP}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(num_qubits, amps)


def new_uniform(n_system: int, n_ancilla: int = 0) -> Statevector:
    """System qubits (the low ``n_system`` indices) in |+>, ancillas in |0>."""
    if n_system < 1:
        raise ValidationError("need at least one system qubit")
    if n_ancilla < 0:
        raise ValidationError("negative ancilla count")
    total = n_system + n_ancilla
    if total > QUBIT_CAP:
        raise CapacityError(f"{total} qubits exceeds cap {QUBIT_CAP}")
    amps = np.zeros(1 << total, dtype=np.complex128)
    amps[: 1 << n_system] = 2.0 ** (-n_system / 2.0)
    return Statevector(total, amps)


def _apply_gate_numpy(amps: np.ndarray, num_qubits: int, gate: Gate) -> None:
    # Slice the state tensor along control/target axes: basic indexing yields
    # strided views, so controls shrink the touched block instead of costing
    # a full-array mask.  Axis num_qubits-1-q corresponds to qubit q.
    view = amps.reshape((2,) * num_qubits)
    sel = [slice(None)] * num_qubits
    for c in gate.controls:
        sel[num_qubits - 1 - c] = 1
    t_ax = num_qubits - 1 - gate.target
    sel[t_ax] = 0
    sel0 = tuple(sel)
    sel[t_ax] = 1
    sel1 = tuple(sel)
    if gate.kind == "x":
        a = view[sel0].copy()
        view[sel0] = view[sel1]
        view[sel1] = a
    elif gate.kind == "phase":
        view[sel1] *= cmath.exp(1j * gate.theta)
    elif gate.kind == "h":
        a = view[sel0].copy()
        b = view[sel1]
        view[sel0] = (a + b) * _INV_SQRT2
        view[sel1] = (a - b) * _INV_SQRT2
    elif gate.kind == "rx":
        c = math.cos(gate.theta / 2.0)
        s = -1j * math.sin(gate.theta / 2.0)
        a = view[sel0].copy()
        b = view[sel1]
        view[sel0] = c * a + s * b
        view[sel1] = s * a + c * b
    else:  # pragma: no cover - Gate validates kinds
        raise ValidationError(f"unknown gate kind {gate.kind!r}")


# Optional numba fast path: compiled kernels enumerate exactly the amplitude
# pairs a gate touches (controls fixed to 1), one pass, no temporaries.
# Agrees with the numpy path to machine epsilon (compilers round complex
# products differently by ~1 ulp); set KNAPQAOA_FORCE_NUMPY=1 to disable.
_USE_NUMBA = False
if not os.environ.get("KNAPQAOA_FORCE_NUMPY"):
    try:
        import numba as _numba

        @_numba.njit("int64(int64, int64[::1])", cache=True, inline="always")
        def _nb_expand(i, fixed):
            for p in fixed:
                low = i & ((1 << p) - 1)
                i = ((i >> p) << (p + 1)) | low
            return i

        @_numba.njit(
            "void(complex128[::1], int64[::1], int64, int64, int64)", cache=True
        )
        def _nb_x(amps, fixed, cmask, tbit, m):
            for b in range(m):
                i0 = _nb_expand(b, fixed) | cmask
                i1 = i0 | tbit
                tmp = amps[i0]
                amps[i0] = amps[i1]
                amps[i1] = tmp

        @_numba.njit(
            "void(complex128[::1], int64[::1], int64, int64, int64, complex128)",
            cache=True,
        )
        def _nb_phase(amps, fixed, cmask, tbit, m, factor):
            for b in range(m):
                i1 = _nb_expand(b, fixed) | cmask | tbit
                amps[i1] = amps[i1] * factor

        @_numba.njit(
            "void(complex128[::1], int64[::1], int64, int64, int64, float64)",
            cache=True,
        )
        def _nb_h(amps, fixed, cmask, tbit, m, inv_sqrt2):
            for b in range(m):
                i0 = _nb_expand(b, fixed) | cmask
                i1 = i0 | tbit
                a = amps[i0]
                c = amps[i1]
                amps[i0] = (a + c) * inv_sqrt2
                amps[i1] = (a - c) * inv_sqrt2

        @_numba.njit(
            "void(complex128[::1], int64[::1], int64, int64, int64,"
            " float64, complex128)",
            cache=True,
        )
        def _nb_rx(amps, fixed, cmask, tbit, m, c, s):
            for b in range(m):
                i0 = _nb_expand(b, fixed) | cmask
                i1 = i0 | tbit
                a = amps[i0]
                d = amps[i1]
                amps[i0] = c * a + s * d
                amps[i1] = s * a + c * d

        _USE_NUMBA = True
    except ImportError:  # pragma: no cover - accelerator simply absent
        pass


def _apply_gate_numba(amps: np.ndarray, num_qubits: int, gate: Gate) -> None:
    fixed = np.array(sorted((gate.target, *gate.controls)), dtype=np.int64)
    cmask = 0
    for c in gate.controls:
        cmask |= 1 << c
    tbit = 1 << gate.target
    m = 1 << (num_qubits - len(fixed))
    if gate.kind == "x":
        _nb_x(amps, fixed, cmask, tbit, m)
    elif gate.kind == "phase":
        _nb_phase(amps, fixed, cmask, tbit, m, cmath.exp(1j * gate.theta))
    elif gate.kind == "h":
        _nb_h(amps, fixed, cmask, tbit, m, _INV_SQRT2)
    elif gate.kind == "rx":
        c = math.cos(gate.theta / 2.0)
        s = -1j * math.sin(gate.theta / 2.0)
        _nb_rx(amps, fixed, cmask, tbit, m, c, s)
    else:  # pragma: no cover - Gate validates kinds
        raise ValidationError(f"unknown gate kind {gate.kind!r}")


def _apply_gate(amps: np.ndarray, num_qubits: int, gate: Gate) -> None:
    if _USE_NUMBA:
        _apply_gate_numba(amps, num_qubits, gate)
    else:
        _apply_gate_numpy(amps, num_qubits, gate)


def apply(state: Statevector, circuit: Circuit) -> Statevector:
    """Return ``state`` multiplied by the circuit's unitary (input untouched)."""
    if circuit.num_qubits > state.num_qubits:
        raise IndexError(
            f"circuit declared on {circuit.num_qubits} qubits, state has {state.num_qubits}"
        )
    amps = state.amplitudes.copy()
    for gate in circuit.gates:
        _apply_gate(amps, state.num_qubits, gate)
    return Statevector(state.num_qubits, amps)


def _check_subset(state: Statevector, subset) -> tuple[int, ...]:
    subset = tuple(subset)
    if len(set(subset)) != len(subset):
        raise ValidationError("duplicate qubit in subset")
    for q in subset:
        if not 0 <= q < state.num_qubits:
            raise IndexError(f"qubit {q} out of range")
    if not subset:
        raise ValidationError("empty measurement subset")
    return subset


def marginal(state: Statevector, subset) -> np.ndarray:
    """Marginal probability vector over ``subset``, indexed by packed key."""
    subset = _check_subset(state, subset)
    p = state.amplitudes.real**2 + state.amplitudes.imag**2
    idx = np.arange(len(p), dtype=np.intp)
    key = np.zeros(len(p), dtype=np.intp)
    for j, q in enumerate(subset):
        key |= ((idx >> q) & 1) << j
    return np.bincount(key, weights=p, minlength=1 << len(subset))


def probabilities(state: Statevector, subset) -> dict[int, float]:
    """Marginal distribution over ``subset``; exact zeros are omitted."""
    marg = marginal(state, subset)
    return {int(i): float(v) for i, v in enumerate(marg) if v != 0.0}


def sample(state: Statevector, subset, shots: int, seed: int) -> MeasurementResult:
    """Draw ``shots`` measurement outcomes with a seeded PCG64 generator."""
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    marg = marginal(state, subset)
    pv = np.clip(marg, 0.0, None)
    pv = pv / pv.sum()
    rng = np.random.default_rng(seed)
    counts_vec = rng.multinomial(shots, pv)
    counts = {int(i): int(c) for i, c in enumerate(counts_vec) if c > 0}
    return MeasurementResult(counts=counts, shots=shots, seed=seed)


def expectation_diagonal(state: Statevector, subset, f) -> float:
    """Exact expectation sum_z P(z) * f(z) of a diagonal observable."""
    marg = marginal(state, subset)
    return float(sum(p * f(int(z)) for z, p in enumerate(marg)))


def global_phase_distance(a: Statevector, b: Statevector) -> float:
    """Max elementwise deviation after aligning global phase.

    The phase is fixed on the first amplitude of ``a`` exceeding 1e-12 in
    magnitude, per this package's state-comparison convention.
    """
    if a.num_qubits != b.num_qubits:
        raise ValidationError("qubit-count mismatch in state comparison")
    va, vb = a.amplitudes, b.amplitudes
    nz = np.flatnonzero(np.abs(va) > 1e-12)
    if len(nz) == 0:
        return float(np.max(np.abs(vb)))
    i = nz[0]
    ref = vb[i] / va[i]
    mag = abs(ref)
    phase = ref / mag if mag > 0 else 1.0
    return float(np.max(np.abs(va * phase - vb)))


def states_equal_up_to_global_phase(
    a: Statevector, b: Statevector, tol: float = 1e-9
) -> bool:
    return global_phase_distance(a, b) < tol
