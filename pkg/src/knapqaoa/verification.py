"""Self-check suites: adder truth tables, oracle equivalence, ancilla hygiene.

These are the load-bearing correctness checks behind the ``verify`` CLI
subcommand.  Each suite returns (name, passed, detail) tuples so callers can
print one line per check and exit nonzero on any failure.  The acceptance
test suite runs the same checks at larger sample counts.
"""

from __future__ import annotations

import numpy as np

from . import sim
from .arithmetic import QuantumRegister, build_add_const, build_add_pow2, build_add_register
from .constrained import (
    build_phase_separator_constrained,
    expand_ising,
    make_constrained_layout,
)
from .knapsack import BatteryInstance, ObjectiveSpec, objective_table
from .relaxed import build_phase_separator_relaxed, make_layout

CheckResult = tuple[str, bool, str]


def random_instance(
    n: int,
    rng: np.random.Generator,
    ranges: dict | None = None,
    c_max: int | None = None,
) -> BatteryInstance:
    """Instance with entries drawn from the benchmark ranges by default."""
    if ranges is None:
        ranges = {"lambda1": (0, 5), "lambda2": (0, 3), "cost1": (0, 2), "cost2": (0, 1)}
    draws = {
        key: tuple(int(v) for v in rng.integers(lo, hi + 1, size=n))
        for key, (lo, hi) in ranges.items()
    }
    return BatteryInstance(c_max=n if c_max is None else c_max, **draws)


def basis_state(num_qubits: int, index: int) -> sim.Statevector:
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return sim.Statevector(num_qubits, amps)


def register_value(index: int, qubits) -> int:
    return sum(((index >> q) & 1) << j for j, q in enumerate(qubits))


def ancilla_mass(state: sim.Statevector, ancillas) -> float:
    """Probability mass on basis states with any listed qubit nonzero."""
    mask = 0
    for q in ancillas:
        mask |= 1 << q
    idx = np.arange(len(state.amplitudes))
    amps = state.amplitudes[(idx & mask) != 0]
    return float(np.sum(amps.real**2 + amps.imag**2))


def oracle_state(
    state: sim.Statevector, subset, table: np.ndarray, gamma: float
) -> sim.Statevector:
    """Reference diagonal action exp(-i*gamma*f) computed straight from the table."""
    idx = np.arange(len(state.amplitudes), dtype=np.intp)
    key = np.zeros(len(idx), dtype=np.intp)
    for j, q in enumerate(subset):
        key |= ((idx >> q) & 1) << j
    return sim.Statevector(
        state.num_qubits, state.amplitudes * np.exp(-1j * gamma * table)[key]
    )


# ---------------------------------------------------------------------------
# Arithmetic truth tables
# ---------------------------------------------------------------------------


def _check_add_pow2(width: int, k: int, controlled: bool) -> bool:
    reg = QuantumRegister("r", tuple(range(width)))
    carries = QuantumRegister("g", tuple(range(width + 1, 2 * width + 1)))
    control = width if controlled else None
    total = 2 * width + 1
    circ = build_add_pow2(total, reg, k, carries, control=control)
    for z in range(1 << width):
        for ctrl_val in (0, 1) if controlled else (1,):
            index = z | (ctrl_val << width if controlled else 0)
            out = sim.apply(basis_state(total, index), circ)
            fires = ctrl_val if controlled else 1
            expect_z = (z + (fires << k)) % (1 << width)
            expect_index = expect_z | (ctrl_val << width if controlled else 0)
            amp = out.amplitudes[expect_index]
            if abs(amp - 1.0) > 1e-12:
                return False
            if ancilla_mass(out, carries.qubits) > 1e-12:
                return False
    return True


def _check_add_const(width: int) -> bool:
    reg = QuantumRegister("r", tuple(range(width)))
    carries = QuantumRegister("g", tuple(range(width, 2 * width)))
    total = 2 * width
    for x in range(1 << width):
        circ = build_add_const(total, reg, x, carries)
        if x == 0 and len(circ.gates) != 0:
            return False
        for z in range(1 << width):
            out = sim.apply(basis_state(total, z), circ)
            expect = (z + x) % (1 << width)
            if abs(out.amplitudes[expect] - 1.0) > 1e-12:
                return False
    return True


def _check_add_register(width_a: int, width_b: int) -> bool:
    a = QuantumRegister("a", tuple(range(width_a)))
    b = QuantumRegister("b", tuple(range(width_a, width_a + width_b)))
    carries = QuantumRegister(
        "g", tuple(range(width_a + width_b, 2 * width_a + width_b))
    )
    total = 2 * width_a + width_b
    circ = build_add_register(total, a, b, carries)
    for va in range(1 << width_a):
        for vb in range(1 << width_b):
            index = va | (vb << width_a)
            out = sim.apply(basis_state(total, index), circ)
            expect = ((va + vb) % (1 << width_a)) | (vb << width_a)
            if abs(out.amplitudes[expect] - 1.0) > 1e-12:
                return False
            if ancilla_mass(out, carries.qubits) > 1e-12:
                return False
    return True


def verify_arithmetic(max_width: int = 4) -> list[CheckResult]:
    results: list[CheckResult] = []
    ok = True
    for width in range(1, max_width + 1):
        for k in range(width):
            for controlled in (False, True):
                if not _check_add_pow2(width, k, controlled):
                    ok = False
    results.append(
        ("add_pow2 truth tables", ok, f"widths 1..{max_width}, control on/off")
    )
    ok = all(_check_add_const(width) for width in range(1, max_width + 1))
    results.append(
        ("add_const truth tables", ok, f"widths 1..{max_width}, all constants")
    )
    ok = _check_add_register(max_width, max_width - 1)
    results.append(
        ("add_register truth table", ok, f"widths ({max_width},{max_width - 1})")
    )
    return results


# ---------------------------------------------------------------------------
# Oracle equivalence and ancilla hygiene
# ---------------------------------------------------------------------------


def check_relaxed_instance(
    inst: BatteryInstance,
    variant: int,
    gammas,
    alpha: float = 1.0,
    tol: float = 1e-9,
    anc_tol: float = 1e-12,
) -> tuple[float, float]:
    """Max oracle deviation and ancilla mass over the given gamma values."""
    spec = ObjectiveSpec("relaxed", inst, alpha=alpha)
    layout = make_layout(inst, variant, alpha=alpha)
    table = objective_table(spec)
    start = sim.new_uniform(inst.n, layout.num_qubits - inst.n)
    worst_dev = 0.0
    worst_mass = 0.0
    for gamma in gammas:
        out = sim.apply(start, build_phase_separator_relaxed(inst, layout, gamma))
        expect = oracle_state(start, layout.choices, table, gamma)
        worst_dev = max(worst_dev, sim.global_phase_distance(expect, out))
        worst_mass = max(worst_mass, ancilla_mass(out, layout.ancillas))
    return worst_dev, worst_mass


def check_constrained_instance(
    inst: BatteryInstance, gammas, tol: float = 1e-9, anc_tol: float = 1e-12
) -> tuple[float, float]:
    spec = ObjectiveSpec("constrained", inst)
    layout = make_constrained_layout(inst)
    enc = expand_ising(inst)
    table = objective_table(spec)
    start = sim.new_uniform(len(layout.register), 1)
    worst_dev = 0.0
    worst_mass = 0.0
    for gamma in gammas:
        out = sim.apply(start, build_phase_separator_constrained(enc, layout, gamma))
        expect = oracle_state(start, layout.register, table, gamma)
        worst_dev = max(worst_dev, sim.global_phase_distance(expect, out))
        worst_mass = max(worst_mass, ancilla_mass(out, (layout.flag,)))
    return worst_dev, worst_mass


def verify_relaxed(
    instances: int = 10, gammas_per_instance: int = 5, seed: int = 2024
) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []
    for variant, n_max in ((1, 4), (2, 3)):
        worst_dev = 0.0
        worst_mass = 0.0
        for _ in range(instances):
            n = int(rng.integers(1, n_max + 1))
            inst = random_instance(n, rng)
            gammas = rng.uniform(-2 * np.pi, 2 * np.pi, gammas_per_instance)
            dev, mass = check_relaxed_instance(inst, variant, gammas)
            worst_dev = max(worst_dev, dev)
            worst_mass = max(worst_mass, mass)
        results.append(
            (
                f"relaxed variant {variant} oracle equivalence",
                worst_dev < 1e-9 and worst_mass < 1e-12,
                f"max deviation {worst_dev:.2e}, max ancilla mass {worst_mass:.2e}",
            )
        )
    return results


def verify_constrained(
    instances: int = 10, gammas_per_instance: int = 5, seed: int = 2024
) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst_dev = 0.0
    worst_mass = 0.0
    for _ in range(instances):
        n = int(rng.integers(1, 4))
        inst = random_instance(n, rng)
        gammas = rng.uniform(-2 * np.pi, 2 * np.pi, gammas_per_instance)
        dev, mass = check_constrained_instance(inst, gammas)
        worst_dev = max(worst_dev, dev)
        worst_mass = max(worst_mass, mass)
    return [
        (
            "constrained oracle equivalence",
            worst_dev < 1e-9 and worst_mass < 1e-12,
            f"max deviation {worst_dev:.2e}, max ancilla mass {worst_mass:.2e}",
        )
    ]


def verify(module: str = "all") -> list[CheckResult]:
    """Run the requested suites; module is one of all|arith|relaxed|constrained."""
    suites = {
        "arith": lambda: verify_arithmetic(),
        "relaxed": lambda: verify_relaxed(),
        "constrained": lambda: verify_constrained(),
    }
    if module == "all":
        out: list[CheckResult] = []
        for fn in suites.values():
            out.extend(fn())
        return out
    if module not in suites:
        from .errors import ValidationError

        raise ValidationError(f"unknown verify module {module!r}")
    return suites[module]()
