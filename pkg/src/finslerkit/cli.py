"""Command-line front end.

Exit codes: 0 success / conjecture holds, 1 golden mismatch or failed check,
2 invalid input, 3 conjecture refuted.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .conjecture import REFUTATION_TOL, CounterexampleCertificate, sweep_family, test_conjecture
from .energy import (
    DEFAULT_N_ANGLES,
    energy_profile,
    find_critical_points,
    scalar_multiple_angles,
)
from .errors import FinslerError, MetricFormatError
from .norms import MinkowskiNorm, counterexample_metric, load_metric, make_quartic_family
from .tensor import check_strong_convexity

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INVALID = 2
EXIT_REFUTED = 3

GOLDEN_TOL = 1e-9
ROOT5 = math.sqrt(5.0)

# (label, locus angle, exact value) for the two worked examples
GOLDEN = {
    "example1": ((1.0, 0.0), [
        ("E_X(X)", 0.0, 0.5),
        ("E_X(y1,0)", 0.0, 0.5),
        ("E_X(0,y2)", math.pi / 2, 0.75),
        ("E_X(y1,y1)", math.pi / 4, 1.0 / ROOT5),
        ("E_X(y1,-y1)", 3 * math.pi / 4, 1.0 / ROOT5),
    ]),
    "example2": ((1.0, 3.0), [
        ("E_X(X)", math.atan(3.0), math.sqrt(109.0) / 2),
        ("E_X(y1,0)", 0.0, 29.0 / 4),
        ("E_X(0,y2)", math.pi / 2, 21.0 / 4),
        ("E_X(y1,y1)", math.pi / 4, 23.0 / (2 * ROOT5)),
        ("E_X(y1,-y1)", 3 * math.pi / 4, 17.0 / (2 * ROOT5)),
    ]),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    norm: MinkowskiNorm | None
    X: np.ndarray | None
    n_angles: int
    output: str | None
    fmt: str
    tol: float | None


def _refutation_tol(cfg: RunConfig) -> float:
    return REFUTATION_TOL if cfg.tol is None else cfg.tol


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _parse_vector(text: str) -> np.ndarray:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc
    if len(parts) != 2:
        raise UsageError(f"expected two comma-separated components, got {text!r}")
    X = np.array(parts)
    if not np.all(np.isfinite(X)):
        raise UsageError("vector components must be finite")
    if not np.any(X):
        raise UsageError("X must be nonzero")
    return X


def _parse_c_list(text: str) -> list[float]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError("--c-list is empty")
    try:
        return [float(t) for t in items]
    except ValueError as exc:
        raise UsageError(f"cannot parse --c-list {text!r}") from exc


def _norm_from_args(args, required: bool) -> MinkowskiNorm | None:
    if args.metric is not None:
        try:
            return load_metric(args.metric)
        except OSError as exc:
            raise UsageError(f"cannot read metric file: {exc}") from exc
    if args.family_c is not None:
        return make_quartic_family(args.family_c)
    if args.paper_metric:
        return counterexample_metric()
    if required:
        raise UsageError("one of --paper-metric, --family-c or --metric is required")
    return None


def build_config(args) -> RunConfig:
    needs_metric = args.command in ("profile", "conjecture", "convexity")
    norm = _norm_from_args(args, needs_metric) if needs_metric else None
    X = None
    if args.command in ("profile", "conjecture"):
        if args.x is None:
            raise UsageError("--x is required")
        X = _parse_vector(args.x)
    if args.tol is not None and not args.tol > 0.0:
        raise UsageError("--tol must be positive")
    if args.n < 256:
        raise UsageError("--n must be at least 256")
    if norm is not None and norm.dimension != 2:
        raise UsageError("only 2-dimensional metrics are supported by this command")
    return RunConfig(args.command, norm, X, args.n, args.output, args.format, args.tol)


# -- subcommands ----------------------------------------------------------------

def cmd_reproduce_paper(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    outdir = Path(cfg.output or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    tol = GOLDEN_TOL if cfg.tol is None else cfg.tol
    norm = counterexample_metric()
    mismatches: list[str] = []

    conv = check_strong_convexity(norm, cfg.n_angles)
    print("metric: F(y) = (y1^4 + 3 y1^2 y2^2 + y2^4)^(1/4)", file=out)
    print(f"convexity: pass={conv.passed} min_eigenvalue={_fmt(conv.min_eigenvalue)} "
          f"trace(1,0)={_fmt(conv.closed_form['trace_at_axis'])} det(1,0)={_fmt(conv.closed_form['det_at_axis'])}",
          file=out)
    if not conv.passed:
        mismatches.append("convexity: expected pass")
    for key in ("trace_max_rel_error", "det_max_rel_error"):
        if conv.closed_form[key] > 1e-10:
            mismatches.append(f"convexity: {key} = {conv.closed_form[key]:.3e}")

    for name, (X, rows) in GOLDEN.items():
        X = np.array(X)
        points = find_critical_points(norm, X, cfg.n_angles)
        print(f"\n{name}: X = ({_fmt(X[0])}, {_fmt(X[1])})", file=out)
        for label, locus, expected in rows:
            point = min(points, key=lambda p: abs((p.theta - locus + math.pi) % (2 * math.pi) - math.pi))
            distance = abs((point.theta - locus + math.pi) % (2 * math.pi) - math.pi)
            got = point.energy if distance < 1e-4 else float("nan")
            rel = abs(got - expected) / abs(expected)
            ok = rel <= tol
            print(f"  {label:<12} = {_fmt(got):<10} expected {_fmt(expected):<10} "
                  f"[{point.kind if distance < 1e-4 else 'missing'}] {'ok' if ok else 'MISMATCH'}", file=out)
            if not ok:
                mismatches.append(f"{name} {label}: got {got!r}, expected {expected!r}")

        energy_profile(norm, X, cfg.n_angles).to_csv(outdir / f"{name}.csv")
        report = test_conjecture(norm, X, cfg.n_angles)
        print(f"  verdict: {report.verdict} (self {_fmt(report.self_energy)}, "
              f"min {_fmt(report.global_min)} at theta {_fmt(report.global_min_theta)}, "
              f"margin {_fmt(report.margin)})", file=out)
        if not report.refuted:
            mismatches.append(f"{name}: expected verdict refuted, got {report.verdict}")
        elif report.certificate is not None:
            report.certificate.save(outdir / f"{name}_certificate.json")
            check = report.certificate.verify()
            if not check.ok:
                mismatches.extend(f"{name} certificate: {f}" for f in check.failures)

    if mismatches:
        print("\nMISMATCHES:", file=out)
        for line in mismatches:
            print(f"  - {line}", file=out)
        return EXIT_MISMATCH
    print("\nall golden values reproduced", file=out)
    return EXIT_OK


def cmd_profile(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    profile = energy_profile(cfg.norm, cfg.X, cfg.n_angles)
    markers = {"X": cfg.X.tolist(), "scalar_multiple_angles": scalar_multiple_angles(cfg.X)}
    if cfg.output is None:
        if cfg.fmt == "json":
            json.dump(profile.to_dict(), out)
            out.write("\n")
        else:
            profile.to_csv(out)
        return EXIT_OK
    path = Path(cfg.output)
    if cfg.fmt == "json":
        path.write_text(json.dumps(profile.to_dict()) + "\n")
    else:
        profile.to_csv(path)
    path.with_suffix(".markers.json").write_text(json.dumps(markers, indent=2) + "\n")
    return EXIT_OK


def cmd_conjecture(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    report = test_conjecture(cfg.norm, cfg.X, cfg.n_angles, _refutation_tol(cfg))
    if cfg.fmt == "json":
        json.dump(report.to_dict(), out, indent=2)
        out.write("\n")
    else:
        print(f"metric:          {report.metric_id}", file=out)
        print(f"X:               ({_fmt(report.X[0])}, {_fmt(report.X[1])})", file=out)
        print(f"convexity_pass:  {report.convexity_pass}", file=out)
        print(f"self_energy:     {_fmt(report.self_energy)}", file=out)
        print(f"global_min:      {_fmt(report.global_min)} at theta={_fmt(report.global_min_theta)} "
              f"y=({_fmt(report.global_min_y[0])}, {_fmt(report.global_min_y[1])})", file=out)
        print(f"margin:          {_fmt(report.margin)}", file=out)
        print(f"verdict:         {report.verdict}", file=out)
        for p in report.critical_points:
            print(f"  critical theta={_fmt(p.theta):<10} E={_fmt(p.energy):<10} {p.kind}", file=out)
        if report.note:
            print(f"note: {report.note}", file=out)
    if report.refuted:
        if report.certificate is not None:
            path = Path(cfg.output or "certificate.json")
            report.certificate.save(path)
            print(f"certificate written to {path}", file=sys.stderr)
        return EXIT_REFUTED
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if args.c_list is None:
        raise UsageError("--c-list is required")
    c_values = _parse_c_list(args.c_list)
    if args.dirs < 4:
        raise UsageError("--dirs must be at least 4")
    summary = sweep_family(c_values, args.dirs, cfg.n_angles, _refutation_tol(cfg))
    text = json.dumps(summary.to_dict(), indent=2) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_convexity(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    report = check_strong_convexity(cfg.norm, cfg.n_angles)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_verify(args, out=None) -> int:
    out = out or sys.stdout
    try:
        cert = CounterexampleCertificate.load(args.certificate)
        check = cert.verify()
    except (OSError, json.JSONDecodeError, FinslerError) as exc:
        raise UsageError(f"cannot verify certificate: {exc}") from exc
    print(f"F(witness) = {check.witness_norm!r}", file=out)
    print(f"E_X(witness) = {check.witness_energy!r}", file=out)
    print(f"F(X)^2/2 = {check.self_energy!r}", file=out)
    print(f"margin = {check.margin!r}", file=out)
    for f in check.failures:
        print(f"FAIL: {f}", file=out)
    print("certificate valid" if check.ok else "certificate INVALID", file=out)
    return EXIT_OK if check.ok else EXIT_MISMATCH


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=DEFAULT_N_ANGLES, help="number of angles (default 4096)")
    common.add_argument("--tol", type=float, default=None,
                        help="relative refutation margin (default 1e-8); for reproduce-paper, "
                             "the golden-value relative tolerance (default 1e-9)")
    common.add_argument("-o", "--output", default=None, help="output file (directory for reproduce-paper)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    metric = argparse.ArgumentParser(add_help=False)
    group = metric.add_mutually_exclusive_group()
    group.add_argument("--paper-metric", action="store_true", help="(y1^4 + 3 y1^2 y2^2 + y2^4)^(1/4)")
    group.add_argument("--family-c", type=float, default=None, help="quartic family parameter c")
    group.add_argument("--metric", default=None, help="metric definition JSON file")

    vector = argparse.ArgumentParser(add_help=False)
    vector.add_argument("--x", default=None, help="tangent vector 'X1,X2' (use --x=-1,2 for negatives)")

    parser = argparse.ArgumentParser(prog="finslerkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("reproduce-paper", parents=[common], help="reproduce both worked counterexamples")
    sub.add_parser("profile", parents=[common, metric, vector], help="E_X along the indicatrix as CSV")
    sub.add_parser("conjecture", parents=[common, metric, vector], help="test Matsumoto's conjecture for X")
    sw = sub.add_parser("sweep", parents=[common], help="sweep the quartic family over c values")
    sw.add_argument("--c-list", default=None, help="comma-separated c values")
    sw.add_argument("--dirs", type=int, default=8, help="number of unit directions per c")
    sub.add_parser("convexity", parents=[common, metric], help="strong-convexity scan")
    ver = sub.add_parser("verify", help="re-check a counterexample certificate file")
    ver.add_argument("certificate")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        cfg = build_config(args)
        if args.command == "reproduce-paper":
            return cmd_reproduce_paper(cfg)
        if args.command == "profile":
            return cmd_profile(cfg)
        if args.command == "conjecture":
            return cmd_conjecture(cfg)
        if args.command == "sweep":
            return cmd_sweep(args, cfg)
        return cmd_convexity(cfg)
    except (UsageError, MetricFormatError, FinslerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
