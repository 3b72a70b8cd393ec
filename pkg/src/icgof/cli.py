"""Command-line entry point: ``icgof {test,simulate,genex,oracle}``.

Exit codes: 0 success, 2 input error, 3 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import datagen as dg
from . import oracle, pipeline, simharness
from .errors import InvalidInput, NotPSD, ZeroDenominator
from .gof import run_test
from .seeding import derive_seed

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
DEFAULT_SEED = 0


def canonical_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("ICGOF_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidInput(f"ICGOF_THREADS must be an integer, got {env!r}")
    return 1


def _emit(data: bytes | str, output: str | None, stdout) -> list[str]:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if output in (None, "-"):
        stdout.buffer.write(data) if hasattr(stdout, "buffer") else stdout.write(data.decode("utf-8"))
        return []
    Path(output).write_bytes(data)
    return [output]


def _read_dataset(path: str, has_header: bool, transpose: bool) -> pipeline.ExprDataset:
    orient = (pipeline.Orientation.COLUMNS_ARE_OBSERVATIONS if transpose
              else pipeline.Orientation.ROWS_ARE_OBSERVATIONS)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return pipeline.ingest_csv(fh, has_header=has_header, orientation=orient)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror or exc}") from exc


def cmd_test(args, stdout) -> int:
    ds = _read_dataset(args.input, args.has_header, args.transpose)
    if args.center:
        ds = pipeline.center_rows(ds)
    result = run_test(ds.values, args.alpha, shuffle_seed=args.shuffle_seed)
    _emit(canonical_json(result.to_dict()), args.output, stdout)
    return EXIT_OK


def cmd_simulate(args, stdout) -> int:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInput(f"cannot read {args.config}: {exc.strerror or exc}") from exc
    cfg = simharness.SimConfig.from_json(text)
    if args.full_scale:
        cfg = simharness.full_scale(cfg)
    if args.threads is not None or "ICGOF_THREADS" in os.environ:
        cfg = simharness.SimConfig(**{**cfg.__dict__, "parallelism": _threads(args.threads)})
    report = simharness.run_grid(cfg)
    data = simharness.report_to_csv(report, timing=args.timing)
    _emit(data, args.output, stdout)
    if args.output not in (None, "-"):
        Path(args.output + ".meta.json").write_text(canonical_json(report.metadata), encoding="utf-8")
        lines = [f"{'structure':<9} {'dist':<12} {'p':>5} {'g':>5} {'reject':>7} {'mc_se':>7}"]
        for row in report.rows:
            c = row.cell
            g = "-" if c.g is None else f"{c.g:.2f}"
            lines.append(f"{c.structure:<9} {c.dist:<12} {c.p:>5} {g:>5} "
                         f"{row.reject_rate:>7.3f} {row.mc_se:>7.3f}")
        for err in report.metadata["errors"]:
            lines.append(f"error in cell {err['cell']}: {err['error']}")
        stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def parse_dims(spec: str) -> list[int]:
    """``start:stop:step`` with ``stop`` inclusive, or a comma list."""
    try:
        if ":" in spec:
            parts = [int(x) for x in spec.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            if step < 1 or start < 1 or stop < start:
                raise ValueError
            return list(range(start, stop + 1, step))
        dims = [int(x) for x in spec.split(",")]
        if not dims or min(dims) < 1:
            raise ValueError
        return dims
    except ValueError:
        raise InvalidInput(f"invalid --dims {spec!r}; expected start:stop:step") from None


def cmd_genex(args, stdout) -> int:
    dims = parse_dims(args.dims)
    ds = _read_dataset(args.input, args.has_header, args.transpose)
    if max(dims) > ds.p:
        raise InvalidInput(f"--dims requests d={max(dims)} but the data has p={ds.p}; max d is {ds.p}")
    variants = [pipeline.Variant.ORIGINAL]
    if args.noisy_frac > 0:
        variants.append(pipeline.Variant.NOISY)
    report = pipeline.pvalue_curves(
        ds, dims, reps=args.reps, alpha=args.alpha, seed=args.seed, variants=variants,
        top_frac=args.noisy_frac if args.noisy_frac > 0 else 0.2, threads=_threads(args.threads),
    )
    _emit(pipeline.curves_to_csv(report), args.output, stdout)
    for err in report.errors:
        sys.stderr.write(f"warning: d={err['d']} rep={err['rep']} {err['variant']}: {err['error']}\n")
    return EXIT_OK


def _oracle_rows(check: str, draws: int, seed: int) -> list[dict]:
    rows = []
    if check == "covformula":
        cases = [
            ("I5,I5", np.eye(5), np.eye(5)),
            ("diag(1,2),diag(3,4)", np.diag([1.0, 2.0]), np.diag([3.0, 4.0])),
            ("AR5,I5", dg.build_cov(dg.CovStructure.preset("II", 5))[0], np.eye(5)),
        ]
        for law in (dg.ComponentDist.GAUSSIAN, dg.ComponentDist.LAPLACE):
            for label, a, b in cases:
                rep = oracle.mc_quadform_cov(a, b, law, draws, derive_seed(seed, label, law.value))
                rows.append({"case": f"{law.value}:{label}", **rep.__dict__, "ok": abs(rep.z_score) <= 5})
    elif check == "constraint":
        sigmas = {
            "I10": np.eye(10),
            "AR(0.3),p=10": dg.build_cov(dg.CovStructure.preset("II", 10))[0],
            "spiked,p=10": dg.build_cov(dg.CovStructure.preset("III", 10, seed=seed))[0],
        }
        for law in dg.ComponentDist:
            k4 = oracle.analytic_kappa4(law)
            for label, sigma in sigmas.items():
                lhs, rhs = oracle.constraint_sides(sigma, k4)
                target = k4 - 3.0
                ok = _close(lhs, rhs) and _close(lhs, target)
                rows.append({"case": f"{law.value}:{label}", "lhs": lhs, "rhs": rhs,
                             "kappa4_minus_3": target, "ok": ok})
    else:
        for law in dg.ComponentDist:
            rep = oracle.mc_kappa4(law, draws, derive_seed(seed, "kurtosis", law.value))
            rows.append({"case": law.value, **rep.__dict__, "ok": abs(rep.z_score) <= 5})
    return rows


def _close(a: float, b: float, rel: float = 1e-12) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def cmd_oracle(args, stdout) -> int:
    if args.draws < 10_000 and args.check != "constraint":
        raise InvalidInput("--draws must be at least 10000")
    rows = _oracle_rows(args.check, args.draws, args.seed)
    for row in rows:
        stdout.write(json.dumps(row) + "\n")
    return EXIT_OK if all(r["ok"] for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="icgof", description="Goodness-of-fit test for IC models.")
    sub = ap.add_subparsers(dest="command", required=True)

    def threads_flag(p):
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (fallback: $ICGOF_THREADS, else 1); output is thread-count independent")

    def ingest_flags(p):
        p.add_argument("--has-header", action="store_true", help="first CSV line is a header")
        p.add_argument("--transpose", action="store_true", help="CSV columns are observations")

    t = sub.add_parser("test", help="run the test on one CSV data matrix, emit JSON")
    t.add_argument("--input", required=True, help="CSV file, rows are observations")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--center", action="store_true", help="subtract the sample mean first")
    ingest_flags(t)
    t.add_argument("--shuffle-seed", type=int, default=None, help="shuffle rows before halving")
    t.add_argument("--output", default="-", help="JSON output path ('-' for stdout)")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="Monte Carlo size/power grid from a JSON config, emit CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--output", default="-")
    s.add_argument("--full-scale", action="store_true", help="n=400, p in {100,400,600}, 500 trials")
    s.add_argument("--timing", action="store_true", help="record wall_ms (output no longer byte-reproducible)")
    threads_flag(s)
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("genex", help="median p-value curves over column-subset sizes, emit CSV")
    g.add_argument("--input", required=True)
    g.add_argument("--dims", default="10:300:10", help="start:stop:step, stop inclusive")
    g.add_argument("--reps", type=int, default=100)
    g.add_argument("--alpha", type=float, default=0.05)
    g.add_argument("--noisy-frac", type=float, default=0.2,
                   help="fraction of top singular values removed for the noisy variant; 0 disables it")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g.add_argument("--output", default="-")
    ingest_flags(g)
    threads_flag(g)
    g.set_defaults(func=cmd_genex)

    o = sub.add_parser("oracle", help="check moment identities analytically and by Monte Carlo")
    o.add_argument("--check", choices=("covformula", "constraint", "kurtosis"), required=True)
    o.add_argument("--draws", type=int, default=10**6)
    o.add_argument("--seed", type=int, default=DEFAULT_SEED)
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, stdout)
    except (InvalidInput, ValueError) as exc:
        sys.stderr.write(f"icgof: error: {exc}\n")
        return EXIT_INPUT
    except (ZeroDenominator, NotPSD) as exc:
        sys.stderr.write(f"icgof: numerical error: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
