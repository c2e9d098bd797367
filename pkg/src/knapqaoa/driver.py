"""Assemble and run full QAOA circuits.

A run alternates a problem phase separator with a transverse mixer for ``p``
layers on a uniform superposition, then reads out the exact distribution over
the measured register.  Angles follow the linear annealing-style schedule
beta_k = 1 - k/p, gamma_k = k/p unless a custom schedule is supplied; note
this makes the last mixer the identity, which is kept literally.

``run_qaoa`` drives the gate-level separators; ``run_qaoa_oracle`` swaps in
the exact diagonal oracle (same semantics by the oracle-equivalence checks)
and needs no ancilla qubits, so it scales to larger window counts for trend
studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sim
from .circuit import Circuit, CircuitBuilder, ResourceReport, compose, resources
from .constrained import (
    build_mixer,
    build_phase_separator_constrained,
    expand_ising,
    make_constrained_layout,
)
from .errors import ValidationError
from .knapsack import ObjectiveSpec, brute_force_max, objective_table, oracle_phase
from .relaxed import build_phase_separator_relaxed, build_return_phase, make_layout

APPROACHES = ("constrained", "relaxed")


@dataclass(frozen=True)
class AngleSchedule:
    p: int
    betas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValidationError("depth p must be >= 1")
        if len(self.betas) != self.p or len(self.gammas) != self.p:
            raise ValidationError("schedule lengths must equal p")
        object.__setattr__(self, "betas", tuple(self.betas))
        object.__setattr__(self, "gammas", tuple(self.gammas))


def linear_schedule(p: int) -> AngleSchedule:
    """beta_k = 1 - k/p and gamma_k = k/p for k = 1..p."""
    if p < 1:
        raise ValidationError("depth p must be >= 1")
    betas = tuple(1.0 - k / p for k in range(1, p + 1))
    gammas = tuple(k / p for k in range(1, p + 1))
    return AngleSchedule(p=p, betas=betas, gammas=gammas)


@dataclass
class QaoaRunResult:
    """Exact expectation, distribution and sampled best for one run.

    ``expectation`` is the statevector expectation of the run's objective
    over the measured register and never exceeds ``optimum``, the exhaustive
    maximum of that objective.  ``ratio`` is the benchmark statistic: the
    expected schedule value divided by ``reference``, the best achievable
    schedule return for the approach.  For the return-only objective the two
    views coincide (ratio = expectation / optimum); with a linear penalty the
    numerator keeps the penalty but the reference is the unconstrained best
    return; for the quadratic-penalty approach the numerator is the expected
    return of the measured choice bits and the reference is the optimum of
    the penalized objective, i.e. the best feasible return.
    """

    expectation: float
    best_sampled: tuple[int, float]
    distribution: dict[int, float]
    ratio: float
    optimum: float
    reference: float
    shots: int
    seed: int
    resources: ResourceReport
    p: int
    approach: str
    variant: int | str
    n: int


def _ratio(value: float, reference: float) -> float:
    """value / reference, with the degenerate flat-objective case pinned.

    A zero reference with zero value means the run attained everything there
    was to attain (ratio 1); a zero reference with nonzero value has no
    meaningful ratio and is reported as NaN.
    """
    if reference > 0:
        return value / reference
    if abs(value - reference) <= 1e-9:
        return 1.0
    if reference == 0:
        return float("nan")
    return value / reference


def _return_table(inst) -> np.ndarray:
    from .knapsack import ObjectiveSpec as _Spec

    return objective_table(_Spec("return_only", inst))


def _finish_run(
    state: sim.Statevector,
    measured: tuple[int, ...],
    spec: ObjectiveSpec,
    shots: int,
    seed: int,
    report: ResourceReport,
    p: int,
    approach: str,
    variant: int | str,
) -> QaoaRunResult:
    inst = spec.instance
    table = objective_table(spec)
    optimum, _ = brute_force_max(spec)
    marg = sim.marginal(state, measured)
    expectation = float(marg @ table)
    assert expectation <= optimum + 1e-9, "expectation exceeded exhaustive optimum"
    if spec.kind == "constrained":
        # schedule value of the measured choice bits, best-feasible reference
        value_table = np.tile(_return_table(inst), 1 << spec.slack_bits)
        reference = optimum
    elif spec.kind == "relaxed":
        value_table = table
        reference = float(np.max(_return_table(inst)))
    else:
        value_table = table
        reference = optimum
    value = float(marg @ value_table)
    counts = sim.sample(state, measured, shots, seed).counts
    best_key = max(counts, key=lambda k: table[k])
    distribution = {int(i): float(v) for i, v in enumerate(marg) if v != 0.0}
    return QaoaRunResult(
        expectation=expectation,
        best_sampled=(best_key, float(table[best_key])),
        distribution=distribution,
        ratio=_ratio(value, reference),
        optimum=optimum,
        reference=reference,
        shots=shots,
        seed=seed,
        resources=report,
        p=p,
        approach=approach,
        variant=variant,
        n=inst.n,
    )


def run_qaoa(
    spec: ObjectiveSpec,
    approach: str,
    p: int,
    shots: int,
    seed: int,
    variant: int = 1,
    schedule: AngleSchedule | None = None,
) -> QaoaRunResult:
    """Run gate-level QAOA for ``spec`` at depth ``p``.

    ``approach`` must match the objective kind: "constrained" pairs with the
    quadratic-penalty objective (slack bits join the mixed and measured
    register), "relaxed" with the return-only or linear-penalty objectives.
    """
    if approach not in APPROACHES:
        raise ValidationError(f"unknown approach {approach!r}")
    if schedule is None:
        schedule = linear_schedule(p)
    elif schedule.p != p:
        raise ValidationError("schedule depth differs from p")
    inst = spec.instance

    if approach == "constrained":
        if spec.kind != "constrained":
            raise ValidationError("constrained approach needs a constrained objective")
        layout = make_constrained_layout(inst)
        enc = expand_ising(inst, spec.penalty_weight)
        mixed = layout.register
        measured = layout.register
        n_ancilla = 1  # the crossed-term flag

        def separator(gamma: float) -> Circuit:
            return build_phase_separator_constrained(enc, layout, gamma)

        num_qubits = layout.num_qubits
    else:
        if spec.kind == "constrained":
            raise ValidationError("relaxed approach cannot run a constrained objective")
        if spec.kind == "return_only":
            # no penalty machinery: the separator is the bare return rotation
            num_qubits = inst.n
            mixed = tuple(range(inst.n))
            measured = mixed
            n_ancilla = 0

            def separator(gamma: float) -> Circuit:
                return build_return_phase(inst, gamma)

        else:
            layout = make_layout(inst, variant, alpha=spec.alpha)
            num_qubits = layout.num_qubits
            mixed = layout.choices
            measured = layout.choices
            n_ancilla = num_qubits - inst.n

            def separator(gamma: float) -> Circuit:
                return build_phase_separator_relaxed(inst, layout, gamma)

    blocks = CircuitBuilder(num_qubits)
    for gamma, beta in zip(schedule.gammas, schedule.betas):
        blocks.extend(separator(gamma))
        blocks.extend(build_mixer(num_qubits, mixed, beta))
    circuit = blocks.build()

    state = sim.new_uniform(len(mixed), n_ancilla)
    state = sim.apply(state, circuit)
    return _finish_run(
        state, measured, spec, shots, seed, resources(circuit), p, approach, variant
    )


def run_qaoa_oracle(
    spec: ObjectiveSpec,
    p: int,
    shots: int,
    seed: int,
    schedule: AngleSchedule | None = None,
) -> QaoaRunResult:
    """QAOA with the exact diagonal oracle as phase separator.

    Only the measured register is simulated (no ancillas), so window counts
    up to the exhaustive-enumeration cap are reachable.  Reported resources
    cover the gate-level mixers only.
    """
    if schedule is None:
        schedule = linear_schedule(p)
    elif schedule.p != p:
        raise ValidationError("schedule depth differs from p")
    width = spec.arity
    register = tuple(range(width))
    state = sim.new_uniform(width)
    mixers = [build_mixer(width, register, beta) for beta in schedule.betas]
    for gamma, mixer in zip(schedule.gammas, mixers):
        state = oracle_phase(spec, gamma, state, register)
        state = sim.apply(state, mixer)
    combined = mixers[0]
    for m in mixers[1:]:
        combined = compose(combined, m)
    approach = "constrained" if spec.kind == "constrained" else "relaxed"
    return _finish_run(
        state, register, spec, shots, seed, resources(combined), p, approach, "oracle"
    )
