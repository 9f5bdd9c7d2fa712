"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 computation failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ThreadPoolExecutor

from .decomposition import lemma1_decompose
from .instances import ParseError, ProblemInstance, load_instance, builtin
from .prob import ValidationError
from .rates import RateReport, helper_scheme_rates, theorem1_rates, theorem2_rates, baselines
from .sim import SimConfig, UndecodableError, run_protocol

EXIT_OK, EXIT_VALIDATION, EXIT_COMPUTE, EXIT_IO = 0, 1, 2, 3

SWEEP_COLUMNS = ("delta", "H_f", "helper_sum_rate", "fully_distributed", "trivial_upper",
                 "slepian_wolf", "gain_vs_fully_distributed", "loss_vs_Hf")


class ComputationError(RuntimeError):
    pass


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` with inclusive stop, or a comma-separated list."""
    text = text.strip()
    if not text:
        raise ValidationError("empty grid")
    if ":" in text:
        try:
            start, stop, step = (float(x) for x in text.split(":"))
        except ValueError:
            raise ValidationError(f"grid must look like start:stop:step, got {text!r}") from None
        if step <= 0:
            raise ValidationError("grid step must be positive")
        count = int(round((stop - start) / step)) + 1
        grid = [round(start + k * step, 12) for k in range(max(count, 0))]
    else:
        grid = [float(x) for x in text.split(",") if x.strip()]
    if not grid:
        raise ValidationError("empty grid")
    bad = [x for x in grid if not 0 < x < 0.5]
    if bad:
        raise ValidationError(f"grid values must lie in (0, 0.5); got {bad[0]}")
    return grid


def sweep_row(family: str, delta: float) -> dict[str, float]:
    inst = builtin(family, delta)
    report = helper_scheme_rates(lemma1_decompose(inst.joint), inst.joint, inst.function)
    b = report.baselines
    return {
        "delta": delta,
        "H_f": b["functionEntropy"],
        "helper_sum_rate": report.sum_rate,
        "fully_distributed": b["fullyDistributed"],
        "trivial_upper": b["trivialUpper"],
        "slepian_wolf": b["slepianWolf"],
        "gain_vs_fully_distributed": 1 - report.sum_rate / b["fullyDistributed"],
        "loss_vs_Hf": (report.sum_rate - b["functionEntropy"]) / b["functionEntropy"],
    }


def sweep(family: str, grid: list[float], jobs: int = 1) -> list[dict[str, float]]:
    if not grid:
        raise ValidationError("empty grid")
    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as pool:
        return list(pool.map(lambda x: sweep_row(family, x), grid))


def sweep_csv(rows: list[dict[str, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([f"{r[c]:.9f}" for c in SWEEP_COLUMNS])
    return buf.getvalue()


def format_report(inst: ProblemInstance, report: RateReport) -> str:
    lines = [f"instance: {inst.name}", f"scheme: {report.scheme}",
             f"helper rate      {report.helper_rate:.6f}",
             f"source 1 rate    {report.source_rates[0]:.6f}",
             f"source 2 rate    {report.source_rates[1]:.6f}",
             f"sum rate         {report.sum_rate:.6f}"]
    for k, v in report.baselines.items():
        lines.append(f"{k:<17}{v:.6f}")
    lines.extend(f"note: {n}" for n in report.notes)
    return "\n".join(lines)


def _instance(args) -> ProblemInstance:
    return load_instance(args.instance, args.delta)


def cmd_rates(args) -> int:
    inst = _instance(args)
    d = lemma1_decompose(inst.joint)
    if args.scheme == "helper":
        report = helper_scheme_rates(d, inst.joint, inst.function)
    elif args.scheme == "theorem1":
        report = theorem1_rates(d, inst.function)
        report = RateReport(report.helper_rate, report.source_rates, report.sum_rate,
                            baselines(inst.joint, inst.function), report.scheme)
    else:
        report = theorem2_rates(d, inst.joint)
    print(format_report(inst, report))
    if args.out:
        row = {"instance": inst.name, "scheme": report.scheme,
               "helper_rate": report.helper_rate, "source1_rate": report.source_rates[0],
               "source2_rate": report.source_rates[1], "sum_rate": report.sum_rate,
               **report.baselines}
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(row)
            writer.writerow([v if isinstance(v, str) else f"{v:.9f}" for v in row.values()])
    return EXIT_OK


def cmd_decompose(args) -> int:
    inst = _instance(args)
    d = lemma1_decompose(inst.joint)
    print(f"instance: {inst.name}")
    print(f"components: {len(d)}   H({d.helper_name}) = {d.helper_entropy():.6f}")
    for k, c in enumerate(d.components):
        kind = ("matching " + " ".join(f"{i + 1}->{j + 1}" for i, j in c.matching.cells())
                if c.matching else "non-matched")
        print(f"[{d.helper_name}={k}] weight {c.weight:.6f}  {kind}")
        for row in c.pmf.matrix:
            print("    " + " ".join(f"{x:.6f}" for x in row))
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    family = args.instance or "example1"
    text = sweep_csv(sweep(family, grid, args.jobs))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst = _instance(args)
    cfg = SimConfig(num_samples=args.samples, seed=args.seed, scheme=args.scheme,
                    block_length=args.block)
    d = lemma1_decompose(inst.joint)
    res = run_protocol(d, inst.function, cfg)
    print(f"instance: {inst.name}")
    print(f"scheme: {cfg.scheme}  samples: {cfg.num_samples}  seed: {cfg.seed}  "
          f"block: {cfg.block_length}")
    print(f"errors={res.errors}")
    print(f"{'link':<9}{'theoretical':>13}{'empirical':>13}")
    for link in ("helper", "source1", "source2"):
        print(f"{link:<9}{res.theoretical_bits[link]:>13.6f}{res.empirical_bits[link]:>13.6f}")
    total_t = sum(res.theoretical_bits.values())
    total_e = sum(res.empirical_bits.values())
    print(f"{'total':<9}{total_t:>13.6f}{total_e:>13.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matchhelper",
                                description="Rates for helper-aided distributed function computation")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_instance=True):
        sp.add_argument("--instance", required=needs_instance,
                        help="JSON file or built-in name such as example1:delta=0.25")
        sp.add_argument("--delta", type=float, help="delta for a built-in family")

    sp = sub.add_parser("rates", help="evaluate rate expressions and baselines")
    common(sp)
    sp.add_argument("--scheme", choices=("helper", "theorem1", "theorem2"), default="helper")
    sp.add_argument("--out", help="write a one-row CSV here")
    sp.set_defaults(func=cmd_rates)

    sp = sub.add_parser("decompose", help="print the matching decomposition")
    common(sp)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("sweep", help="example1 family over a delta grid, as CSV")
    common(sp, needs_instance=False)
    sp.add_argument("--grid", default="0.01:0.49:0.01", help="start:stop:step (inclusive)")
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("simulate", help="Monte-Carlo run of the coding protocol")
    common(sp)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scheme", choices=("helper", "fullyDistributed"), default="helper")
    sp.add_argument("--block", type=int, default=1, help="Huffman block length (1-3)")
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (UndecodableError, ComputationError, RuntimeError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
