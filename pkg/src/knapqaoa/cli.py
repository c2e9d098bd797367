"""Command-line harness.

Subcommands:

* ``gen``    write a random instance file
* ``run``    run one QAOA instance and print the result as key/value text
* ``sweep``  run an (n, p) grid, write CSV and optionally an SVG chart
* ``verify`` run the oracle-equivalence and ancilla-hygiene suites

Exit codes: 0 success, 1 validation error, 2 capacity error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .driver import run_qaoa, run_qaoa_oracle
from .errors import CapacityError, ValidationError
from .experiments import (
    APPROACHES,
    SweepConfig,
    emit_csv,
    emit_plot,
    gen_instance,
    run_sweep,
)
from .knapsack import ObjectiveSpec, instance_to_json, load_instance, save_instance
from .verification import verify

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CAPACITY = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 means "capacity" here,
    # so reroute argument errors to the validation exit code.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _parse_range(text: str) -> tuple[int, ...]:
    """'3' -> (3,); '2..5' -> (2, 3, 4, 5)."""
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ValidationError(f"empty range {text!r}")
        return tuple(range(lo, hi + 1))
    return (int(text),)


def _variant(text: str):
    if text == "oracle":
        return "oracle"
    if text in ("1", "2"):
        return int(text)
    raise ValidationError(f"variant must be 1, 2 or oracle, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="knapqaoa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a random instance file")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", default=None, help="path; stdout when omitted")

    p_run = sub.add_parser("run", help="run one QAOA instance")
    p_run.add_argument("--instance", required=True)
    p_run.add_argument("--approach", choices=APPROACHES, required=True)
    p_run.add_argument("--variant", type=_variant, default=1)
    p_run.add_argument("--p", type=int, required=True)
    p_run.add_argument("--shots", type=int, default=1000)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--alpha", type=float, default=1.0)

    p_sweep = sub.add_parser("sweep", help="sweep an (n, p) grid")
    p_sweep.add_argument("--approach", choices=APPROACHES, required=True)
    p_sweep.add_argument("--variant", type=_variant, default=1)
    p_sweep.add_argument("--n", type=_parse_range, required=True, metavar="A..B")
    p_sweep.add_argument("--p", type=_parse_range, required=True, metavar="A..B")
    p_sweep.add_argument("--trials", type=int, default=1000)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--alpha", type=float, default=1.0)
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument("--plot", default=None, help="optional SVG output path")
    p_sweep.add_argument("--x", choices=("p", "n"), default="p")

    p_verify = sub.add_parser("verify", help="run correctness suites")
    p_verify.add_argument(
        "--module", choices=("all", "arith", "relaxed", "constrained"), default="all"
    )
    return parser


def _cmd_gen(args) -> int:
    inst = gen_instance(args.n, seed=args.seed)
    if args.out is None:
        sys.stdout.write(instance_to_json(inst))
    else:
        save_instance(inst, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def _spec_for(approach: str, inst, alpha: float) -> ObjectiveSpec:
    if approach == "constrained":
        return ObjectiveSpec("constrained", inst)
    if approach == "relaxed_nopenalty":
        return ObjectiveSpec("return_only", inst)
    return ObjectiveSpec("relaxed", inst, alpha=alpha)


def _cmd_run(args) -> int:
    inst = load_instance(args.instance)
    spec = _spec_for(args.approach, inst, args.alpha)
    if args.variant == "oracle":
        result = run_qaoa_oracle(spec, p=args.p, shots=args.shots, seed=args.seed)
    else:
        approach = "constrained" if args.approach == "constrained" else "relaxed"
        result = run_qaoa(
            spec, approach, p=args.p, shots=args.shots, seed=args.seed,
            variant=args.variant,
        )
    width = spec.arity
    best_bits, best_value = result.best_sampled
    print(f"n: {result.n}")
    print(f"p: {result.p}")
    print(f"approach: {args.approach}")
    print(f"variant: {result.variant}")
    print(f"expectation: {result.expectation:.6g}")
    print(f"optimum: {result.optimum:.6g}")
    print(f"reference: {result.reference:.6g}")
    print(f"ratio: {result.ratio:.6g}")
    print(f"best_sampled: {best_bits:0{width}b} value={best_value:.6g}")
    print(f"shots: {result.shots}")
    print(f"seed: {result.seed}")
    print(
        "resources: gates={0.gate_count} depth={0.depth} qubits={0.qubit_count}".format(
            result.resources
        )
    )
    top = sorted(result.distribution.items(), key=lambda kv: -kv[1])[:8]
    print("top_outcomes:")
    for bits, prob in top:
        print(f"  {bits:0{width}b}: {prob:.6f}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = SweepConfig(
        approach=args.approach,
        variant=args.variant,
        n_values=args.n,
        p_values=args.p,
        trials=args.trials,
        alpha=args.alpha,
        base_seed=args.seed,
    )

    def progress(record):
        if record.mean_ratio is None:
            print(f"n={record.n} p={record.p}: NO-DATA (capacity)")
        else:
            print(
                f"n={record.n} p={record.p}: mean_ratio={record.mean_ratio:.4f} "
                f"std={record.std_ratio:.4f}"
            )

    records = run_sweep(cfg, progress=progress)
    emit_csv(records, args.out)
    print(f"wrote {args.out}")
    if args.plot is not None:
        series_key = "n" if args.x == "p" else "p"
        emit_plot(records, args.plot, x=args.x, series_key=series_key)
        print(f"wrote {args.plot}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = verify(args.module)
    failed = 0
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {name}: {detail}")
        if not passed:
            failed += 1
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "gen": _cmd_gen,
            "run": _cmd_run,
            "sweep": _cmd_sweep,
            "verify": _cmd_verify,
        }[args.command]
        return handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
