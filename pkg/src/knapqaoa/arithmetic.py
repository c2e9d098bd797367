"""Reversible ripple-carry adders.

Three builders: add a power of two to a register, add an arbitrary constant
(one power-of-two block per set bit), and add one register into another
(one controlled power-of-two block per source bit).  All addition is modular
in the target width.  Carry qubits are a caller-owned pool that every block
leaves in |0>, so a single pool can be reused across sequential blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, CircuitBuilder
from .errors import CapacityError, ValidationError


@dataclass(frozen=True)
class QuantumRegister:
    """Named ordered qubit group; bit j of the stored integer is qubits[j]."""

    name: str
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        qubits = tuple(self.qubits)
        if len(qubits) < 1:
            raise ValidationError(f"register {self.name!r} must hold >= 1 qubit")
        if len(set(qubits)) != len(qubits):
            raise ValidationError(f"register {self.name!r} repeats a qubit index")
        object.__setattr__(self, "qubits", qubits)

    def __len__(self) -> int:
        return len(self.qubits)


def _check_disjoint(*groups: tuple[int, ...]) -> None:
    seen: set[int] = set()
    for g in groups:
        for q in g:
            if q in seen:
                raise ValidationError(f"registers overlap on qubit {q}")
            seen.add(q)


def _emit_add_pow2(
    b: CircuitBuilder,
    reg: QuantumRegister,
    k: int,
    carries: QuantumRegister,
    control: int | None,
) -> None:
    q = reg.qubits
    m = len(q)
    g = carries.qubits

    if k == m - 1:
        # adding 2^(m-1) mod 2^m just flips the top bit
        b.x(q[k], controls=(control,) if control is not None else ())
        return

    def carry(j: int) -> int:
        # carry out of position j, for j in [k, m-2]
        return g[j - k]

    if control is None:
        b.cx(q[k], carry(k))
    else:
        b.ccx(control, q[k], carry(k))
    for j in range(k + 1, m - 1):
        b.ccx(q[j], carry(j - 1), carry(j))
    b.cx(carry(m - 2), q[m - 1])
    for j in reversed(range(k + 1, m - 1)):
        b.ccx(q[j], carry(j - 1), carry(j))
        b.cx(carry(j - 1), q[j])
    if control is None:
        b.cx(q[k], carry(k))
        b.x(q[k])
    else:
        b.ccx(control, q[k], carry(k))
        b.cx(control, q[k])


def build_add_pow2(
    num_qubits: int,
    reg: QuantumRegister,
    k: int,
    carries: QuantumRegister,
    control: int | None = None,
) -> Circuit:
    """Map |z> to |(z + 2^k) mod 2^width>, optionally under one control.

    Carries must enter as |0>; they are restored to |0> by the block itself.
    """
    if not 0 <= k < len(reg):
        raise ValidationError(f"bit position {k} out of range for width {len(reg)}")
    if len(carries) < len(reg) - k:
        raise CapacityError(
            f"carry register too narrow: need {len(reg) - k}, got {len(carries)}"
        )
    ctrl = () if control is None else (control,)
    _check_disjoint(reg.qubits, carries.qubits, ctrl)
    b = CircuitBuilder(num_qubits)
    with b.span(f"add_pow2({k})"):
        _emit_add_pow2(b, reg, k, carries, control)
    return b.build()


def build_add_const(
    num_qubits: int,
    reg: QuantumRegister,
    x: int,
    carries: QuantumRegister,
    control: int | None = None,
) -> Circuit:
    """Map |z> to |(z + x) mod 2^width> by adding each set bit of ``x``."""
    if x < 0:
        raise ValidationError("constant must be non-negative")
    if x >= 1 << len(reg):
        raise ValidationError(f"constant {x} does not fit in width {len(reg)}")
    ctrl = () if control is None else (control,)
    _check_disjoint(reg.qubits, carries.qubits, ctrl)
    if x and len(carries) < len(reg):
        # lowest set bit of x dictates the deepest carry chain we may need
        low = (x & -x).bit_length() - 1
        if len(carries) < len(reg) - low:
            raise CapacityError(
                f"carry register too narrow: need {len(reg) - low}, got {len(carries)}"
            )
    b = CircuitBuilder(num_qubits)
    with b.span(f"add_const({x})"):
        for k in range(len(reg)):
            if (x >> k) & 1:
                _emit_add_pow2(b, reg, k, carries, control)
    return b.build()


def build_add_register(
    num_qubits: int,
    a: QuantumRegister,
    b_reg: QuantumRegister,
    carries: QuantumRegister,
) -> Circuit:
    """Map |A>|B> to |(A + B) mod 2^width(a)>|B>.

    Realized as one power-of-two block per source bit, block j adding 2^j to
    ``a`` under control of ``b_reg.qubits[j]``; source bits at or above
    width(a) contribute 0 modulo the target width and are skipped.
    """
    _check_disjoint(a.qubits, b_reg.qubits, carries.qubits)
    if len(carries) < len(a):
        raise CapacityError(
            f"carry register too narrow: need {len(a)}, got {len(carries)}"
        )
    b = CircuitBuilder(num_qubits)
    with b.span(f"add_register({a.name}+={b_reg.name})"):
        for j in range(len(b_reg)):
            if j < len(a):
                _emit_add_pow2(b, a, j, carries, b_reg.qubits[j])
    return b.build()
