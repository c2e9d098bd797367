"""Gate-level circuit IR: a small reversible gate set with positive controls.

Gates are immutable records and circuits are immutable gate sequences with a
declared qubit count.  Only positive controls exist; builders that need a
negative control conjugate it with X gates.  Qubit indexing is little-endian
everywhere in this package: qubit ``j`` is bit ``j`` of a basis-state index.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

from .errors import CapacityError, ValidationError

GATE_KINDS = ("h", "x", "rx", "phase")
_PARAMETRIC = frozenset({"rx", "phase"})


@dataclass(frozen=True)
class Gate:
    """A single gate application.

    ``phase(theta)`` acts as diag(1, e^{i*theta}) on the target and ``rx(theta)``
    as exp(-i*(theta/2)*sigma_x); ``h`` and ``x`` ignore ``theta``.  Controls are
    all positive-polarity and must be distinct from the target.
    """

    kind: str
    target: int
    controls: tuple[int, ...] = ()
    theta: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        controls = tuple(sorted(self.controls))
        if len(set(controls)) != len(controls):
            raise ValidationError("duplicate control qubits")
        if self.target in controls:
            raise ValidationError("target listed among controls")
        if self.target < 0 or (controls and controls[0] < 0):
            raise ValidationError("negative qubit index")
        object.__setattr__(self, "controls", controls)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (*self.controls, self.target)

    def adjoint(self) -> Gate:
        if self.kind in _PARAMETRIC:
            return Gate(self.kind, self.target, self.controls, -self.theta)
        return self  # h, x (and their controlled forms) are self-adjoint


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence on ``num_qubits`` qubits.

    ``spans`` optionally labels half-open gate ranges ``(name, start, stop)``
    for debugging dumps; they carry no semantics.
    """

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    spans: tuple[tuple[str, int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "spans", tuple(self.spans))
        if self.num_qubits < 0:
            raise ValidationError("negative qubit count")
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise ValidationError(
                    f"gate on qubit {max(g.qubits)} exceeds declared count {self.num_qubits}"
                )

    def __len__(self) -> int:
        return len(self.gates)

    def dump(self) -> str:
        """One gate per line: KIND [theta=..] [controls=..] target=..

        Debugging aid only; the format is documented but not version-stable.
        """
        lines = [f"# qubits={self.num_qubits} gates={len(self.gates)}"]
        for name, start, stop in self.spans:
            lines.append(f"# span {name}: [{start}:{stop})")
        for g in self.gates:
            parts = [g.kind.upper()]
            if g.kind in _PARAMETRIC:
                parts.append(f"theta={g.theta!r}")
            if g.controls:
                parts.append("controls=" + ",".join(map(str, g.controls)))
            parts.append(f"target={g.target}")
            lines.append(" ".join(parts))
        return "\n".join(lines)


@dataclass(frozen=True)
class ResourceReport:
    gate_count: int
    depth: int
    qubit_count: int


class CircuitBuilder:
    """Mutable gate accumulator that freezes into a Circuit."""

    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits
        self._gates: list[Gate] = []
        self._spans: list[tuple[str, int, int]] = []

    def append(self, gate: Gate) -> None:
        if max(gate.qubits) >= self.num_qubits:
            raise ValidationError("gate index out of range for builder")
        self._gates.append(gate)

    def h(self, target: int, controls: tuple[int, ...] = ()) -> None:
        self.append(Gate("h", target, controls))

    def x(self, target: int, controls: tuple[int, ...] = ()) -> None:
        self.append(Gate("x", target, controls))

    def cx(self, control: int, target: int) -> None:
        self.append(Gate("x", target, (control,)))

    def ccx(self, c1: int, c2: int, target: int) -> None:
        self.append(Gate("x", target, (c1, c2)))

    def rx(self, theta: float, target: int, controls: tuple[int, ...] = ()) -> None:
        self.append(Gate("rx", target, controls, theta))

    def phase(self, theta: float, target: int, controls: tuple[int, ...] = ()) -> None:
        self.append(Gate("phase", target, controls, theta))

    def extend(self, other: Circuit) -> None:
        if other.num_qubits != self.num_qubits:
            raise ValidationError("qubit-count mismatch in extend")
        offset = len(self._gates)
        self._gates.extend(other.gates)
        self._spans.extend((n, a + offset, b + offset) for n, a, b in other.spans)

    @contextmanager
    def span(self, name: str):
        start = len(self._gates)
        yield
        self._spans.append((name, start, len(self._gates)))

    def build(self) -> Circuit:
        return Circuit(self.num_qubits, tuple(self._gates), tuple(self._spans))


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Gates of ``a`` followed by gates of ``b``; qubit counts must match."""
    if a.num_qubits != b.num_qubits:
        raise ValidationError(
            f"cannot compose circuits on {a.num_qubits} and {b.num_qubits} qubits"
        )
    offset = len(a.gates)
    spans = a.spans + tuple((n, i + offset, j + offset) for n, i, j in b.spans)
    return Circuit(a.num_qubits, a.gates + b.gates, spans)


def inverse(c: Circuit) -> Circuit:
    """Reversed gate order with every gate replaced by its adjoint."""
    total = len(c.gates)
    gates = tuple(g.adjoint() for g in reversed(c.gates))
    spans = tuple(
        (name, total - stop, total - start) for name, start, stop in reversed(c.spans)
    )
    return Circuit(c.num_qubits, gates, spans)


def multi_controlled_x(
    num_qubits: int,
    controls: tuple[int, ...],
    target: int,
    work: tuple[int, ...] = (),
) -> Circuit:
    """X on ``target`` iff all ``controls`` are 1, via a Toffoli cascade.

    ``work`` qubits must be |0> at entry; the cascade is mirrored so they are
    restored to |0> before the circuit ends.  Needs max(0, len(controls) - 2)
    work qubits.
    """
    controls = tuple(controls)
    work = tuple(work)
    touched = (*controls, target, *work)
    if len(set(touched)) != len(touched):
        raise ValidationError("controls, target and work qubits must be distinct")
    need = max(0, len(controls) - 2)
    if len(work) < need:
        raise CapacityError(f"need {need} work qubits, got {len(work)}")

    b = CircuitBuilder(num_qubits)
    m = len(controls)
    if m == 0:
        b.x(target)
    elif m == 1:
        b.cx(controls[0], target)
    elif m == 2:
        b.ccx(controls[0], controls[1], target)
    else:
        # forward cascade of partial ANDs, final Toffoli, mirrored uncompute
        b.ccx(controls[0], controls[1], work[0])
        for i in range(2, m - 1):
            b.ccx(controls[i], work[i - 2], work[i - 1])
        b.ccx(controls[m - 1], work[m - 3], target)
        for i in reversed(range(2, m - 1)):
            b.ccx(controls[i], work[i - 2], work[i - 1])
        b.ccx(controls[0], controls[1], work[0])
    return b.build()


def resources(c: Circuit) -> ResourceReport:
    """Exact gate count plus depth under greedy qubit-disjoint layering."""
    frontier = [0] * c.num_qubits
    depth = 0
    for g in c.gates:
        layer = 1 + max(frontier[q] for q in g.qubits)
        for q in g.qubits:
            frontier[q] = layer
        depth = max(depth, layer)
    return ResourceReport(gate_count=len(c.gates), depth=depth, qubit_count=c.num_qubits)
