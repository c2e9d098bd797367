"""Linear-penalty QAOA with gate-level cost arithmetic.

The phase separator imprints exp(-i*gamma*f(z)) for
f(z) = return(z) - alpha * max(0, cost(z) - c_max) in four stages:

1. cost calculation: compute |z>|cost(z) + w> into the accumulator register,
   where w = 2**c - c_max pads the capacity up to a power of two so the
   violation test reduces to "any accumulator bit at position >= c is set";
2. constraint test: OR those high bits into the flag qubit (X-conjugated
   Toffoli cascade through the work register, then X on the flag so flag = 1
   means the capacity is violated);
3. penalty dephasing: flag-controlled phases read the overshoot straight off
   the accumulator's binary digits;
4. reinitialisation: undo stages 2 and 1 so every ancilla exits |0>.

Two cost-calculation variants share this contract: variant 1 accumulates the
per-window costs sequentially into a single register; variant 2 loads each
window's cost into its own subregister and sums them along a halving tree of
register-to-register additions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arithmetic import QuantumRegister, build_add_const, build_add_register
from .circuit import Circuit, CircuitBuilder, inverse, multi_controlled_x
from .errors import CapacityError, ValidationError
from .knapsack import BatteryInstance
from .sim import QUBIT_CAP


@dataclass(frozen=True)
class RelaxedLayout:
    """Qubit assignment and register sizing for one instance and variant.

    ``cost_registers[0]`` is the accumulator that finally holds cost(z) plus
    the offset; variant 1 has only the accumulator, variant 2 one register
    per window.  ``threshold_exp`` is the exponent c with 2**c = c_max +
    offset, and ``cost_bits`` the accumulator width, sized so that
    max cost + offset never overflows.
    """

    variant: int
    n: int
    choices: tuple[int, ...]
    cost_registers: tuple[QuantumRegister, ...]
    work: QuantumRegister | None
    flag: int
    carries: QuantumRegister
    alpha: float
    max_window_cost: int
    threshold_exp: int
    offset: int
    cost_bits: int
    num_qubits: int

    @property
    def accumulator(self) -> QuantumRegister:
        return self.cost_registers[0]

    @property
    def cost_register_width(self) -> int:
        """Total qubits across all cost registers (the storage ancillas)."""
        return sum(len(r) for r in self.cost_registers)

    @property
    def ancillas(self) -> tuple[int, ...]:
        """Every non-choice qubit; all must be |0> outside the separator."""
        out: list[int] = []
        for r in self.cost_registers:
            out.extend(r.qubits)
        if self.work is not None:
            out.extend(self.work.qubits)
        out.append(self.flag)
        out.extend(self.carries.qubits)
        return tuple(out)


def _width_for(value: int) -> int:
    """Bits needed to store ``value``; at least one."""
    return max(1, value.bit_length())


def make_layout(
    inst: BatteryInstance, variant: int, alpha: float = 1.0
) -> RelaxedLayout:
    """Compute register widths and assign qubit indices for an instance.

    Raises a capacity error (stating the requirement) when the total exceeds
    the simulator cap.
    """
    if variant not in (1, 2):
        raise ValidationError(f"variant must be 1 or 2, got {variant}")
    if inst.c_max < 1:
        raise ValidationError("relaxed layout requires c_max >= 1")
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    n = inst.n
    d = inst.max_window_cost
    c = (inst.c_max - 1).bit_length()  # minimal c with 2**c >= c_max
    w = (1 << c) - inst.c_max
    cost_bits = _width_for(d * n + w)

    next_index = n
    choices = tuple(range(n))

    def take(name: str, width: int) -> QuantumRegister:
        nonlocal next_index
        reg = QuantumRegister(name, tuple(range(next_index, next_index + width)))
        next_index += width
        return reg

    if variant == 1:
        cost_registers = (take("cost", cost_bits),)
    else:
        d_eff = max(1, d)
        regs = [take("cost_1", cost_bits)]
        for i in range(2, n + 1):
            # register i is consumed after tz(i-1)+1 tree steps and holds at
            # most 2**tz(i-1) window costs by then
            tz = ((i - 1) & -(i - 1)).bit_length() - 1
            regs.append(take(f"cost_{i}", _width_for(d_eff << tz)))
        cost_registers = tuple(regs)

    work_width = max(0, cost_bits - c - 2)
    work = take("work", work_width) if work_width else None
    flag = next_index
    next_index += 1
    carries = take("carry", cost_bits)
    total = next_index
    if total > QUBIT_CAP:
        raise CapacityError(
            f"layout needs {total} qubits (cap {QUBIT_CAP}): "
            f"n={n} variant={variant} cost_bits={cost_bits}"
        )
    return RelaxedLayout(
        variant=variant,
        n=n,
        choices=choices,
        cost_registers=cost_registers,
        work=work,
        flag=flag,
        carries=carries,
        alpha=alpha,
        max_window_cost=d,
        threshold_exp=c,
        offset=w,
        cost_bits=cost_bits,
        num_qubits=total,
    )


def build_return_phase(
    inst: BatteryInstance,
    gamma: float,
    num_qubits: int | None = None,
    choices: tuple[int, ...] | None = None,
) -> Circuit:
    """Phase each choice qubit by -gamma * (lambda2 - lambda1).

    Realizes exp(-i*gamma*return(z)) up to the z-independent phase from the
    all-market-1 return, which never affects measured distributions.
    """
    if num_qubits is None:
        num_qubits = inst.n
    if choices is None:
        choices = tuple(range(inst.n))
    b = CircuitBuilder(num_qubits)
    with b.span("return_phase"):
        for t, q in enumerate(choices):
            delta = inst.lambda2[t] - inst.lambda1[t]
            if delta:
                b.phase(-gamma * delta, q)
    return b.build()


def _emit_controlled_cost_load(
    b: CircuitBuilder,
    inst: BatteryInstance,
    layout: RelaxedLayout,
    t: int,
    target: QuantumRegister,
) -> None:
    """Add cost2[t] under z_t, then cost1[t] under NOT z_t (X-conjugated)."""
    zq = layout.choices[t]
    if inst.cost2[t]:
        b.extend(
            build_add_const(
                layout.num_qubits, target, inst.cost2[t], layout.carries, control=zq
            )
        )
    if inst.cost1[t]:
        b.x(zq)
        b.extend(
            build_add_const(
                layout.num_qubits, target, inst.cost1[t], layout.carries, control=zq
            )
        )
        b.x(zq)


def build_cost_calc(inst: BatteryInstance, layout: RelaxedLayout) -> Circuit:
    """Map |z>|0...0> to |z>|cost(z) + offset> in the accumulator.

    Variant 2 leaves partial sums in the non-accumulator cost registers; the
    separator's mirrored uncompute clears them again.
    """
    if layout.n != inst.n:
        raise ValidationError("layout does not match instance")
    b = CircuitBuilder(layout.num_qubits)
    with b.span("cost_calc"):
        if layout.variant == 1:
            for t in range(inst.n):
                _emit_controlled_cost_load(b, inst, layout, t, layout.accumulator)
        else:
            for t in range(inst.n):
                _emit_controlled_cost_load(b, inst, layout, t, layout.cost_registers[t])
            step = 1
            while step < inst.n:
                # fold register i+step into register i (1-based window indices)
                for i in range(0, inst.n, 2 * step):
                    j = i + step
                    if j < inst.n:
                        b.extend(
                            build_add_register(
                                layout.num_qubits,
                                layout.cost_registers[i],
                                layout.cost_registers[j],
                                layout.carries,
                            )
                        )
                step *= 2
        if layout.offset:
            b.extend(
                build_add_const(
                    layout.num_qubits,
                    layout.accumulator,
                    layout.offset,
                    layout.carries,
                )
            )
    return b.build()


def build_constraint_test(layout: RelaxedLayout) -> Circuit:
    """Flip the flag to 1 exactly when cost(z) >= c_max.

    The accumulator holds cost + offset, so violation means some bit at
    position >= threshold_exp is set.  The cascade computes the AND of the
    negated high bits (i.e. "satisfied") into the flag; the trailing X turns
    it into the violation indicator.  Work qubits are restored to |0> by the
    cascade itself.  When the threshold exponent is at or beyond the register
    width no violation is representable and the circuit is empty.
    """
    b = CircuitBuilder(layout.num_qubits)
    high = layout.accumulator.qubits[layout.threshold_exp :]
    if not high:
        return b.build()
    work = layout.work.qubits if layout.work is not None else ()
    with b.span("constraint_test"):
        for q in high:
            b.x(q)
        b.extend(multi_controlled_x(layout.num_qubits, tuple(high), layout.flag, work))
        for q in high:
            b.x(q)
        b.x(layout.flag)
    return b.build()


def build_penalty_dephase(layout: RelaxedLayout, gamma: float) -> Circuit:
    """Under the violation flag, phase by +gamma*alpha*(cost - c_max).

    cost - c_max equals the accumulator value minus 2**threshold_exp, so each
    accumulator bit contributes its binary weight under flag control and the
    flag itself carries the constant subtraction.
    """
    b = CircuitBuilder(layout.num_qubits)
    ag = layout.alpha * gamma
    with b.span("penalty_dephase"):
        for j, q in enumerate(layout.accumulator.qubits):
            b.phase(ag * (1 << j), q, controls=(layout.flag,))
        b.phase(-ag * (1 << layout.threshold_exp), layout.flag)
    return b.build()


def build_phase_separator_relaxed(
    inst: BatteryInstance, layout: RelaxedLayout, gamma: float
) -> Circuit:
    """Full separator: return phase, penalty machinery, uncompute.

    Net effect on the choice register is exp(-i*gamma*f(z)) up to global
    phase; every ancilla exits exactly |0> for every input, so the block can
    be repeated across QAOA layers without fresh ancillas.
    """
    ret = build_return_phase(
        inst, gamma, num_qubits=layout.num_qubits, choices=layout.choices
    )
    cost = build_cost_calc(inst, layout)
    test = build_constraint_test(layout)
    dephase = build_penalty_dephase(layout, gamma)
    b = CircuitBuilder(layout.num_qubits)
    b.extend(ret)
    b.extend(cost)
    b.extend(test)
    b.extend(dephase)
    b.extend(inverse(test))
    b.extend(inverse(cost))
    return b.build()
