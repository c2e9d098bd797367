"""Quadratic-penalty QAOA encoding.

The capacity constraint is folded into the objective as
``-A * (cost(z) - slack(b))**2 + return(z)`` with slack bits spanning exactly
[0, c_max].  Expanding the square over binary variables (v**2 = v) yields a
constant plus linear plus pairwise-quadratic form; the phase separator then
needs one phase gate per linear term and, per quadratic term, a Toffoli pair
writing the AND of the two qubits into a shared flag ancilla around a phase
gate on that ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, CircuitBuilder
from .errors import ValidationError
from .knapsack import BatteryInstance, slack_bit_count, slack_coefficients


@dataclass
class ConstrainedEncoding:
    """Exact integer expansion of the penalized objective over register bits.

    Register bit ``i < n`` is choice ``z_i``; bits ``n .. n+e-1`` are slack.
    ``constant + sum(linear) + sum(quadratic)`` evaluates identically to the
    penalized objective on every assignment; the constant is dropped from
    circuits (global phase) but kept here for exact evaluation.
    """

    n: int
    slack_bits: int
    slack_coeffs: tuple[int, ...]
    penalty_weight: int
    linear: dict[int, int]
    quadratic: dict[tuple[int, int], int]
    constant: int


@dataclass(frozen=True)
class ConstrainedLayout:
    """Qubit assignment: choices then slack in one register, plus a flag."""

    n: int
    slack_bits: int

    @property
    def register(self) -> tuple[int, ...]:
        return tuple(range(self.n + self.slack_bits))

    @property
    def flag(self) -> int:
        return self.n + self.slack_bits

    @property
    def num_qubits(self) -> int:
        return self.n + self.slack_bits + 1


def make_constrained_layout(inst: BatteryInstance) -> ConstrainedLayout:
    if inst.c_max < 1:
        raise ValidationError("constrained layout requires c_max >= 1")
    return ConstrainedLayout(n=inst.n, slack_bits=slack_bit_count(inst.c_max))


def expand_ising(
    inst: BatteryInstance, penalty_weight: int | None = None
) -> ConstrainedEncoding:
    """Expand the quadratic penalty plus return into {constant, linear, quadratic}.

    Writing cost(z) - slack(b) = K + sum_i w_i R_i with K the all-market-1
    cost, w_i the per-bit cost deltas (negated slack coefficients for slack
    bits), and return(z) = L + sum_t r_t z_t, binary idempotence gives

        f = (L - A*K**2)
            + sum_i (r_i - A*(2*K*w_i + w_i**2)) R_i
            + sum_{i<j} (-2*A*w_i*w_j) R_i R_j.

    Zero coefficients are omitted so degenerate instances build empty maps.
    """
    if inst.c_max < 1:
        raise ValidationError("quadratic-penalty expansion requires c_max >= 1")
    if penalty_weight is None:
        penalty_weight = sum(inst.lambda1) + sum(inst.lambda2)
    if penalty_weight < 0:
        raise ValidationError("penalty weight must be non-negative")
    n = inst.n
    e = slack_bit_count(inst.c_max)
    coeffs = slack_coefficients(inst.c_max)

    base_cost = sum(inst.cost1)
    weights = [inst.cost2[t] - inst.cost1[t] for t in range(n)]
    weights += [-c for c in coeffs]
    returns = [inst.lambda2[t] - inst.lambda1[t] for t in range(n)]

    a = penalty_weight
    linear: dict[int, int] = {}
    quadratic: dict[tuple[int, int], int] = {}
    for i, w in enumerate(weights):
        coeff = -a * (2 * base_cost * w + w * w)
        if i < n:
            coeff += returns[i]
        if coeff:
            linear[i] = coeff
    total_bits = n + e
    for i in range(total_bits):
        for j in range(i + 1, total_bits):
            coeff = -2 * a * weights[i] * weights[j]
            if coeff:
                quadratic[(i, j)] = coeff
    constant = sum(inst.lambda1) - a * base_cost * base_cost
    return ConstrainedEncoding(
        n=n,
        slack_bits=e,
        slack_coeffs=coeffs,
        penalty_weight=a,
        linear=linear,
        quadratic=quadratic,
        constant=constant,
    )


def evaluate_encoding(enc: ConstrainedEncoding, assignment: int) -> int:
    """Evaluate constant + linear + quadratic form on packed register bits."""
    value = enc.constant
    for i, coeff in enc.linear.items():
        if (assignment >> i) & 1:
            value += coeff
    for (i, j), coeff in enc.quadratic.items():
        if (assignment >> i) & 1 and (assignment >> j) & 1:
            value += coeff
    return value


def build_phase_separator_constrained(
    enc: ConstrainedEncoding, layout: ConstrainedLayout, gamma: float
) -> Circuit:
    """exp(-i*gamma*f) up to the dropped constant's global phase.

    Linear terms become phase gates on their qubit; each quadratic term
    toggles the flag ancilla with a Toffoli, phases the ancilla, and toggles
    back, so the flag always exits |0>.
    """
    if layout.n != enc.n or layout.slack_bits != enc.slack_bits:
        raise ValidationError("layout does not match encoding")
    b = CircuitBuilder(layout.num_qubits)
    reg = layout.register
    with b.span("single_terms"):
        for i, coeff in sorted(enc.linear.items()):
            b.phase(-gamma * coeff, reg[i])
    with b.span("crossed_terms"):
        for (i, j), coeff in sorted(enc.quadratic.items()):
            b.ccx(reg[i], reg[j], layout.flag)
            b.phase(-gamma * coeff, layout.flag)
            b.ccx(reg[i], reg[j], layout.flag)
    return b.build()


def build_mixer(num_qubits: int, qubits, beta: float) -> Circuit:
    """RX(2*beta) on each listed qubit, i.e. exp(-i*beta*X) per qubit."""
    b = CircuitBuilder(num_qubits)
    for q in qubits:
        b.rx(2.0 * beta, q)
    return b.build()
