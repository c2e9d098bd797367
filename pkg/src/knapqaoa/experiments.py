"""Experiment harness: random instances, (n, p) sweeps, CSV and SVG output.

Instances are drawn per trial from inclusive integer ranges with a seeded
PCG64 generator; the per-trial seed mixes (base seed, n, p, trial index)
through a SeedSequence so any cell can be reproduced in isolation.  Cells
whose register layout exceeds the simulator cap are recorded as NO-DATA rows
rather than dropped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .charts import line_chart_svg
from .driver import run_qaoa, run_qaoa_oracle
from .errors import CapacityError, ValidationError
from .knapsack import BatteryInstance, ObjectiveSpec, brute_force_max

APPROACHES = ("constrained", "relaxed_nopenalty", "relaxed_penalty")

#: Inclusive integer ranges for instance generation.
DEFAULT_RANGES = {
    "lambda1": (0, 5),
    "lambda2": (0, 3),
    "cost1": (0, 2),
    "cost2": (0, 1),
}

#: Exploration bounds for the quadratic-penalty approach (qubit budget).
CONSTRAINED_MAX_P = 50
CONSTRAINED_MAX_N = 8

CSV_HEADER = "n,p,approach,variant,trials,mean_ratio,std_ratio,mean_runtime_ms,seed"


@dataclass(frozen=True)
class SweepConfig:
    approach: str
    variant: int | str = 1  # 1, 2 or "oracle"
    n_values: tuple[int, ...] = (2,)
    p_values: tuple[int, ...] = (1,)
    trials: int = 1000
    alpha: float = 1.0
    base_seed: int = 0
    ranges: dict = field(default_factory=lambda: dict(DEFAULT_RANGES))
    c_max_rule: str | int = "n"

    def __post_init__(self) -> None:
        if self.approach not in APPROACHES:
            raise ValidationError(f"unknown approach {self.approach!r}")
        if self.variant not in (1, 2, "oracle"):
            raise ValidationError(f"variant must be 1, 2 or 'oracle', got {self.variant!r}")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.approach == "constrained":
            if max(self.p_values) > CONSTRAINED_MAX_P:
                raise ValidationError(
                    f"constrained sweeps cap at p = {CONSTRAINED_MAX_P}"
                )
            if max(self.n_values) > CONSTRAINED_MAX_N:
                raise ValidationError(
                    f"constrained sweeps cap at n = {CONSTRAINED_MAX_N}"
                )
        for key, (lo, hi) in self.ranges.items():
            if hi < lo:
                raise ValidationError(f"empty range for {key}: [{lo}, {hi}]")


@dataclass
class SweepRecord:
    """Aggregated ratios for one (n, p) cell; mean/std None marks NO-DATA."""

    n: int
    p: int
    approach: str
    variant: int | str
    trials: int
    mean_ratio: float | None
    std_ratio: float | None
    mean_runtime_ms: float | None
    seed: int


def trial_seed(base_seed: int, n: int, p: int, trial: int) -> int:
    """Stable 64-bit seed mixing the cell coordinates and trial index."""
    ss = np.random.SeedSequence([base_seed, n, p, trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def gen_instance(
    n: int,
    ranges: dict | None = None,
    c_max_rule: str | int = "n",
    seed: int = 0,
) -> BatteryInstance:
    """Draw one instance; every entry uniform over its inclusive range."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if ranges is None:
        ranges = DEFAULT_RANGES
    for key in ("lambda1", "lambda2", "cost1", "cost2"):
        lo, hi = ranges[key]
        if hi < lo:
            raise ValidationError(f"empty range for {key}: [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    draws = {}
    for key in ("lambda1", "lambda2", "cost1", "cost2"):
        lo, hi = ranges[key]
        draws[key] = tuple(int(v) for v in rng.integers(lo, hi + 1, size=n))
    if c_max_rule == "n":
        c_max = n
    elif isinstance(c_max_rule, int):
        c_max = c_max_rule
    else:
        raise ValidationError(f"unknown c_max rule {c_max_rule!r}")
    return BatteryInstance(c_max=c_max, seed=seed, **draws)


def _objective_for(cfg: SweepConfig, inst: BatteryInstance) -> ObjectiveSpec:
    if cfg.approach == "constrained":
        return ObjectiveSpec("constrained", inst)
    if cfg.approach == "relaxed_nopenalty":
        return ObjectiveSpec("return_only", inst)
    return ObjectiveSpec("relaxed", inst, alpha=cfg.alpha)


def _reference_positive(cfg: SweepConfig, inst: BatteryInstance) -> bool:
    if cfg.approach == "constrained":
        value, _ = brute_force_max(ObjectiveSpec("constrained", inst))
        return value > 0  # best feasible return
    return max(inst.lambda1) > 0 or max(inst.lambda2) > 0


def run_trial(cfg: SweepConfig, n: int, p: int, trial: int) -> float:
    """One trial of a cell: fresh instance, one QAOA run, its ratio.

    Instances whose benchmark reference is zero (nothing to earn, so no
    meaningful ratio) are redrawn with a retry-salted seed; under the default
    ranges they are rare (probability (1/24)**n for the relaxed approaches).
    """
    inst = None
    for retry in range(100):
        seed = trial_seed(cfg.base_seed, n, p, trial + (retry << 32))
        inst = gen_instance(n, cfg.ranges, cfg.c_max_rule, seed)
        if _reference_positive(cfg, inst):
            break
    spec = _objective_for(cfg, inst)
    if cfg.variant == "oracle":
        result = run_qaoa_oracle(spec, p=p, shots=1, seed=seed)
    else:
        approach = "constrained" if cfg.approach == "constrained" else "relaxed"
        result = run_qaoa(
            spec, approach, p=p, shots=1, seed=seed, variant=int(cfg.variant)
        )
    return result.ratio


def run_sweep(cfg: SweepConfig, progress=None) -> list[SweepRecord]:
    """Run every (n, p) cell; emit records in (n, p) order.

    ``progress`` may be a callable taking the finished record, for logging.
    """
    records: list[SweepRecord] = []
    for n in cfg.n_values:
        for p in cfg.p_values:
            ratios = []
            t_start = time.perf_counter()
            try:
                for trial in range(cfg.trials):
                    ratios.append(run_trial(cfg, n, p, trial))
            except CapacityError:
                record = SweepRecord(
                    n=n,
                    p=p,
                    approach=cfg.approach,
                    variant=cfg.variant,
                    trials=cfg.trials,
                    mean_ratio=None,
                    std_ratio=None,
                    mean_runtime_ms=None,
                    seed=cfg.base_seed,
                )
                records.append(record)
                if progress is not None:
                    progress(record)
                continue
            elapsed_ms = (time.perf_counter() - t_start) * 1000.0
            arr = np.array(ratios, dtype=np.float64)
            record = SweepRecord(
                n=n,
                p=p,
                approach=cfg.approach,
                variant=cfg.variant,
                trials=cfg.trials,
                mean_ratio=float(arr.mean()),
                std_ratio=float(arr.std(ddof=1)) if len(arr) > 1 else 0.0,
                mean_runtime_ms=elapsed_ms / cfg.trials,
                seed=cfg.base_seed,
            )
            records.append(record)
            if progress is not None:
                progress(record)
    return records


def _fmt(value: float | None) -> str:
    return "" if value is None else format(value, ".6g")


def emit_csv(records, path) -> None:
    """Write records under the fixed header; NO-DATA cells leave floats empty."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                [
                    str(r.n),
                    str(r.p),
                    r.approach,
                    str(r.variant),
                    str(r.trials),
                    _fmt(r.mean_ratio),
                    _fmt(r.std_ratio),
                    _fmt(r.mean_runtime_ms),
                    str(r.seed),
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> list[SweepRecord]:
    """Parse a file produced by emit_csv back into records."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ValidationError("unrecognized sweep CSV header")
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 9:
            raise ValidationError(f"malformed sweep CSV row: {ln!r}")
        n, p, approach, variant, trials, mean, std, runtime, seed = parts
        records.append(
            SweepRecord(
                n=int(n),
                p=int(p),
                approach=approach,
                variant=variant if variant == "oracle" else int(variant),
                trials=int(trials),
                mean_ratio=float(mean) if mean else None,
                std_ratio=float(std) if std else None,
                mean_runtime_ms=float(runtime) if runtime else None,
                seed=int(seed),
            )
        )
    return records


def emit_plot(records, path, x: str = "p", series_key: str = "n") -> None:
    """Line chart of mean ratio, one series per ``series_key`` value.

    Output is a standalone SVG, byte-identical for identical inputs.
    NO-DATA records are skipped.
    """
    records = list(records)
    if not records:
        raise ValidationError("no records to plot")
    if x not in ("p", "n") or series_key not in ("p", "n") or x == series_key:
        raise ValidationError("x and series_key must be 'p' and 'n' in some order")
    series: dict[str, list[tuple[float, float]]] = {}
    for r in sorted(records, key=lambda r: (getattr(r, series_key), getattr(r, x))):
        if r.mean_ratio is None:
            continue
        label = f"{series_key}={getattr(r, series_key)}"
        series.setdefault(label, []).append(
            (float(getattr(r, x)), float(r.mean_ratio))
        )
    if not all(series.values()) or not series:
        raise ValidationError("no plottable records (all NO-DATA)")
    svg = line_chart_svg(series, x_label=x, y_label="ratio")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
