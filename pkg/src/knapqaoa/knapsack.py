"""Battery scheduling domain: instances, knapsack reduction, classical oracles.

A battery can serve one of two markets per time window.  Window ``t`` on
market 1 yields return ``lambda1[t]`` at cycle cost ``cost1[t]``; market 2
yields ``lambda2[t]`` at ``cost2[t]``.  A schedule is a bitstring ``z`` (bit
``t`` = 1 means market 2) and must keep the total cycle cost within ``c_max``.

This module also defines the three objective flavours the QAOA circuits
target (return only, linear overshoot penalty, quadratic slack penalty) and
the exact diagonal phase oracle used to verify gate-level phase separators.
All data is integer; schedules and slack assignments are packed little-endian
into plain ints, matching the simulator's basis indexing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ValidationError
from .sim import Statevector

#: Largest window count accepted by exhaustive objective enumeration.
BRUTE_FORCE_CAP = 20

INSTANCE_FORMAT_VERSION = "1"

OBJECTIVE_KINDS = ("return_only", "relaxed", "constrained")


def _check_int_seq(name: str, values) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise ValidationError(f"{name} entries must be integers, got {v!r}")
        if v < 0:
            raise ValidationError(f"{name} entries must be non-negative, got {v}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class BatteryInstance:
    """Per-window returns and cycle costs for the two markets."""

    lambda1: tuple[int, ...]
    lambda2: tuple[int, ...]
    cost1: tuple[int, ...]
    cost2: tuple[int, ...]
    c_max: int
    seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda1", _check_int_seq("lambda1", self.lambda1))
        object.__setattr__(self, "lambda2", _check_int_seq("lambda2", self.lambda2))
        object.__setattr__(self, "cost1", _check_int_seq("cost1", self.cost1))
        object.__setattr__(self, "cost2", _check_int_seq("cost2", self.cost2))
        n = len(self.lambda1)
        if n < 1:
            raise ValidationError("instance needs at least one time window")
        for name in ("lambda2", "cost1", "cost2"):
            if len(getattr(self, name)) != n:
                raise ValidationError(f"{name} length differs from lambda1")
        if isinstance(self.c_max, bool) or not isinstance(self.c_max, (int, np.integer)):
            raise ValidationError("c_max must be an integer")
        if self.c_max < 0:
            raise ValidationError("c_max must be non-negative")
        object.__setattr__(self, "c_max", int(self.c_max))

    @property
    def n(self) -> int:
        return len(self.lambda1)

    @property
    def max_window_cost(self) -> int:
        """Largest single-window cycle cost over both markets."""
        return max(max(c1, c2) for c1, c2 in zip(self.cost1, self.cost2))

    def schedule_return(self, z: int) -> int:
        return sum(
            l2 if (z >> t) & 1 else l1
            for t, (l1, l2) in enumerate(zip(self.lambda1, self.lambda2))
        )

    def schedule_cost(self, z: int) -> int:
        return sum(
            c2 if (z >> t) & 1 else c1
            for t, (c1, c2) in enumerate(zip(self.cost1, self.cost2))
        )


@dataclass
class KnapsackInstance:
    """Reduced 0/1 knapsack: strictly positive profits and weights.

    ``forced`` maps trivially decided windows to their choice.  ``orientation``
    records, per emitted item, whether picking it means market 2 ("direct") or
    market 1 ("flipped").  ``base_return``/``base_cost`` are the totals of the
    no-item baseline schedule, so any selection evaluates to
    ``base + sum(selected)`` in both coordinates.
    """

    profits: tuple[int, ...]
    weights: tuple[int, ...]
    capacity: int
    base_return: int
    base_cost: int
    item_windows: tuple[int, ...]
    forced: dict[int, int]
    orientation: dict[int, str]


def reduce_to_knapsack(inst: BatteryInstance) -> KnapsackInstance:
    """Force dominated windows, emit one item per genuinely contested window.

    A window where one market is at least as profitable and no more costly is
    forced to that market (ties go to market 1).  Otherwise the window emits
    an item whose profit/weight are the return gain and extra cost of the
    expensive market relative to the cheap one.
    """
    profits: list[int] = []
    weights: list[int] = []
    item_windows: list[int] = []
    forced: dict[int, int] = {}
    orientation: dict[int, str] = {}
    base_return = 0
    base_cost = 0
    for t in range(inst.n):
        l1, l2 = inst.lambda1[t], inst.lambda2[t]
        c1, c2 = inst.cost1[t], inst.cost2[t]
        if l1 >= l2 and c1 <= c2:
            forced[t] = 0
            base_return += l1
            base_cost += c1
        elif l2 >= l1 and c2 <= c1:
            forced[t] = 1
            base_return += l2
            base_cost += c2
        elif l2 > l1 and c2 > c1:
            item_windows.append(t)
            orientation[t] = "direct"
            profits.append(l2 - l1)
            weights.append(c2 - c1)
            base_return += l1
            base_cost += c1
        else:  # l1 > l2 and c1 > c2: mirror image of the previous case
            item_windows.append(t)
            orientation[t] = "flipped"
            profits.append(l1 - l2)
            weights.append(c1 - c2)
            base_return += l2
            base_cost += c2
    return KnapsackInstance(
        profits=tuple(profits),
        weights=tuple(weights),
        capacity=inst.c_max - base_cost,
        base_return=base_return,
        base_cost=base_cost,
        item_windows=tuple(item_windows),
        forced=forced,
        orientation=orientation,
    )


def reconstruct_schedule(kp: KnapsackInstance, selection: int) -> int:
    """Map an item-selection bitmask back to a full schedule bitmask."""
    z = 0
    for t, choice in kp.forced.items():
        z |= choice << t
    for i, t in enumerate(kp.item_windows):
        picked = (selection >> i) & 1
        if kp.orientation[t] == "direct":
            z |= picked << t
        else:
            z |= (1 - picked) << t
    return z


def solve_dp(kp: KnapsackInstance) -> tuple[int, int]:
    """Exact optimum by dynamic programming over capacities.

    Returns (optimal value, selection bitmask).  Negative capacity admits no
    selection at all, so the empty selection with value 0 is returned.
    """
    n = len(kp.profits)
    if kp.capacity < 0 or n == 0:
        return 0, 0
    cap = kp.capacity
    table = [[0] * (cap + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        p, w = kp.profits[i - 1], kp.weights[i - 1]
        prev = table[i - 1]
        row = table[i]
        for c in range(cap + 1):
            best = prev[c]
            if w <= c and prev[c - w] + p > best:
                best = prev[c - w] + p
            row[c] = best
    # backtrack
    selection = 0
    c = cap
    for i in range(n, 0, -1):
        if table[i][c] != table[i - 1][c]:
            selection |= 1 << (i - 1)
            c -= kp.weights[i - 1]
    return table[n][cap], selection


# ---------------------------------------------------------------------------
# Slack completion for the quadratic-penalty objective
# ---------------------------------------------------------------------------


def slack_bit_count(c_max: int) -> int:
    """Number of slack bits needed to represent every value in [0, c_max]."""
    if c_max < 1:
        raise ValidationError("slack encoding requires c_max >= 1")
    return c_max.bit_length()


def slack_coefficients(c_max: int) -> tuple[int, ...]:
    """Binary coefficients whose subset sums are exactly the range [0, c_max].

    Powers of two up to the penultimate bit, then a completion coefficient
    ``c_max + 1 - 2**(e-1)`` so the maximum assignment hits ``c_max`` exactly
    and no assignment overshoots.
    """
    e = slack_bit_count(c_max)
    coeffs = [1 << j for j in range(e - 1)]
    coeffs.append(c_max + 1 - (1 << (e - 1)))
    return tuple(coeffs)


# ---------------------------------------------------------------------------
# Objectives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObjectiveSpec:
    """Which diagonal objective f the QAOA should maximise.

    * ``return_only``: f(z) = return(z).
    * ``relaxed``: f(z) = return(z) - alpha * max(0, cost(z) - c_max).
    * ``constrained``: f(z, b) = return(z) - A * (cost(z) - slack(b))**2 over
      choice bits z and slack bits b; A defaults to the total return mass
      sum(lambda1) + sum(lambda2), which makes every capacity violation cost
      more than any attainable return.
    """

    kind: str
    instance: BatteryInstance
    alpha: float = 1.0
    penalty_weight: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in OBJECTIVE_KINDS:
            raise ValidationError(f"unknown objective kind {self.kind!r}")
        if self.kind == "relaxed" and not self.alpha > 0:
            raise ValidationError("relaxed objective needs alpha > 0")
        if self.kind == "constrained":
            if self.instance.c_max < 1:
                raise ValidationError("constrained objective needs c_max >= 1")
            if self.penalty_weight is None:
                default = sum(self.instance.lambda1) + sum(self.instance.lambda2)
                object.__setattr__(self, "penalty_weight", default)
            elif self.penalty_weight < 0:
                raise ValidationError("penalty weight must be non-negative")

    @property
    def slack_bits(self) -> int:
        if self.kind != "constrained":
            return 0
        return slack_bit_count(self.instance.c_max)

    @property
    def arity(self) -> int:
        """Number of bits f is defined over (choices, plus slack if any)."""
        return self.instance.n + self.slack_bits


def objective(spec: ObjectiveSpec, z: int, b: int | None = None) -> float:
    """Evaluate f on one schedule (and slack assignment, if constrained)."""
    inst = spec.instance
    if not 0 <= z < (1 << inst.n):
        raise ValidationError(f"schedule {z} out of range for {inst.n} windows")
    ret = inst.schedule_return(z)
    cost = inst.schedule_cost(z)
    if spec.kind == "return_only":
        if b is not None:
            raise ValidationError("return_only objective takes no slack bits")
        return float(ret)
    if spec.kind == "relaxed":
        if b is not None:
            raise ValidationError("relaxed objective takes no slack bits")
        overshoot = cost - inst.c_max
        return float(ret - spec.alpha * overshoot) if overshoot >= 0 else float(ret)
    # constrained
    e = spec.slack_bits
    if b is None:
        raise ValidationError("constrained objective requires slack bits")
    if not 0 <= b < (1 << e):
        raise ValidationError(f"slack assignment {b} does not fit {e} bits")
    coeffs = slack_coefficients(inst.c_max)
    slack = sum(c for j, c in enumerate(coeffs) if (b >> j) & 1)
    return float(ret - spec.penalty_weight * (cost - slack) ** 2)


def _bit_matrix(bits: int) -> np.ndarray:
    idx = np.arange(1 << bits, dtype=np.int64)
    return (idx[:, None] >> np.arange(bits)[None, :]) & 1


def objective_table(spec: ObjectiveSpec) -> np.ndarray:
    """f evaluated on every basis assignment, indexed by packed bits.

    For the constrained kind the index packs choices in the low ``n`` bits and
    slack above them, matching the circuit register layout.
    """
    inst = spec.instance
    if inst.n > BRUTE_FORCE_CAP:
        raise CapacityError(
            f"{inst.n} windows exceeds exhaustive cap {BRUTE_FORCE_CAP}"
        )
    zb = _bit_matrix(inst.n)
    lam1 = np.array(inst.lambda1, dtype=np.float64)
    lam2 = np.array(inst.lambda2, dtype=np.float64)
    c1 = np.array(inst.cost1, dtype=np.float64)
    c2 = np.array(inst.cost2, dtype=np.float64)
    ret = zb @ lam2 + (1 - zb) @ lam1
    cost = zb @ c2 + (1 - zb) @ c1
    if spec.kind == "return_only":
        return ret
    if spec.kind == "relaxed":
        return ret - spec.alpha * np.maximum(cost - inst.c_max, 0.0)
    coeffs = np.array(slack_coefficients(inst.c_max), dtype=np.float64)
    slack = _bit_matrix(spec.slack_bits) @ coeffs
    # packed index = z + (b << n): slack-major layout
    f = ret[None, :] - spec.penalty_weight * (cost[None, :] - slack[:, None]) ** 2
    return f.reshape(-1)


def brute_force_max(spec: ObjectiveSpec) -> tuple[float, int]:
    """Exhaustive maximum of f; returns (value, argmax packed bits)."""
    table = objective_table(spec)
    best = int(np.argmax(table))
    return float(table[best]), best


def oracle_phase(
    spec: ObjectiveSpec, gamma: float, state: Statevector, subset
) -> Statevector:
    """Multiply each basis amplitude by exp(-i * gamma * f(bits(subset))).

    This is the ground-truth diagonal oracle: gate-level phase separators must
    match it up to a global phase.  Bits outside ``subset`` are ignored.
    """
    subset = tuple(subset)
    if len(subset) != spec.arity:
        raise ValidationError(
            f"subset width {len(subset)} != objective arity {spec.arity}"
        )
    table = objective_table(spec)
    phases = np.exp(-1j * gamma * table)
    idx = np.arange(len(state.amplitudes), dtype=np.intp)
    key = np.zeros(len(idx), dtype=np.intp)
    for j, q in enumerate(subset):
        if not 0 <= q < state.num_qubits:
            raise IndexError(f"qubit {q} out of range")
        key |= ((idx >> q) & 1) << j
    return Statevector(state.num_qubits, state.amplitudes * phases[key])


# ---------------------------------------------------------------------------
# Instance files (version "1"): JSON with integer fields and arrays
# ---------------------------------------------------------------------------


def instance_to_json(inst: BatteryInstance) -> str:
    doc = {
        "version": INSTANCE_FORMAT_VERSION,
        "n": inst.n,
        "lambda1": list(inst.lambda1),
        "lambda2": list(inst.lambda2),
        "cost1": list(inst.cost1),
        "cost2": list(inst.cost2),
        "c_max": inst.c_max,
    }
    if inst.seed is not None:
        doc["seed"] = inst.seed
    return json.dumps(doc, indent=2) + "\n"


def instance_from_json(text: str) -> BatteryInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed instance document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object")
    if doc.get("version") != INSTANCE_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported instance version {doc.get('version')!r}"
        )
    for key in ("n", "lambda1", "lambda2", "cost1", "cost2", "c_max"):
        if key not in doc:
            raise ValidationError(f"instance document missing field {key!r}")
    inst = BatteryInstance(
        lambda1=tuple(doc["lambda1"]),
        lambda2=tuple(doc["lambda2"]),
        cost1=tuple(doc["cost1"]),
        cost2=tuple(doc["cost2"]),
        c_max=doc["c_max"],
        seed=doc.get("seed"),
    )
    if inst.n != doc["n"]:
        raise ValidationError("declared n does not match array lengths")
    return inst


def save_instance(inst: BatteryInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(instance_to_json(inst))


def load_instance(path) -> BatteryInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(fh.read())
