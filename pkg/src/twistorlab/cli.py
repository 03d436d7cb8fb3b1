"""Command line entry point: `twistorlab verify <suite>` with reporting.

Configuration precedence is flags over config file over per-suite defaults.
Exit codes: 0 when every requested suite passes, 1 when any suite fails or a
numeric failure occurs inside one, 2 on configuration errors (unknown suite
or metric, malformed flags, unwritable output path).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .errors import ConfigError, DomainError, NumericError
from .suites import ALL_MATRIX, SUITES, VerificationReport, make_config, run_suite


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="twistorlab",
        description="Numerical verification of twistor-space identities.")
    sub = parser.add_subparsers(dest="command", required=True)
    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=sorted(SUITES) + ["all"],
                     help="suite id, or 'all' for the full passing matrix")
    ver.add_argument("--metric", help="metric spec, e.g. flat, s4:1.41, "
                                      "conformal_bump:0.1, xy_bump:0.1")
    ver.add_argument("--samples", type=int)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--fd-step", type=float, dest="fd_step")
    ver.add_argument("--tol", type=float, dest="tolerance")
    ver.add_argument("--quadrature", help="sphere grid as NT,NP (default 64,128)")
    ver.add_argument("--config", help="JSON config file; flags override it")
    ver.add_argument("--json", dest="json_path", help="write JSON report here")
    ver.add_argument("--csv", dest="csv_path", help="write CSV report here")
    return parser


def _load_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    allowed = {"metric", "samples", "seed", "fd_step", "tolerance",
               "quadrature", "json", "csv"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def _parse_quadrature(raw):
    if raw is None:
        return None
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return int(raw[0]), int(raw[1])
    try:
        nt, nphi = str(raw).split(",")
        return int(nt), int(nphi)
    except ValueError:
        raise ConfigError(f"quadrature must be NT,NP, got {raw!r}")


def parse_config(argv):
    """Resolve argv (+ optional config file) into suite configs and outputs."""
    ns = _build_parser().parse_args(argv)
    filecfg = _load_config_file(ns.config) if ns.config else {}

    def pick(flag, key):
        return flag if flag is not None else filecfg.get(key)

    metric = pick(ns.metric, "metric")
    samples = pick(ns.samples, "samples")
    seed = pick(ns.seed, "seed")
    fd_step = pick(ns.fd_step, "fd_step")
    tolerance = pick(ns.tolerance, "tolerance")
    quad = _parse_quadrature(pick(ns.quadrature, "quadrature"))
    json_path = pick(ns.json_path, "json")
    csv_path = pick(ns.csv_path, "csv")

    common = dict(seed=int(seed) if seed is not None else 42)
    if samples is not None:
        common["samples"] = int(samples)
    if fd_step is not None:
        common["fd_step"] = float(fd_step)
    if tolerance is not None:
        common["tolerance"] = float(tolerance)
    if quad is not None:
        common["n_theta"], common["n_phi"] = quad

    if ns.suite == "all":
        if metric is not None:
            raise ConfigError("'all' runs a fixed suite/metric matrix; "
                              "drop --metric or pick a single suite")
        configs = [make_config(s, metric=m, **common) for s, m in ALL_MATRIX]
    else:
        configs = [make_config(ns.suite, metric=metric, **common)]
    return configs, json_path, csv_path


def emit_report(reports, fmt):
    """Render reports as bytes: 'json', 'csv', or aligned 'text' lines."""
    if isinstance(reports, VerificationReport):
        reports = [reports]
    rows = [r.as_dict() for r in reports]
    if fmt == "json":
        return (json.dumps(rows, indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=VerificationReport.FIELD_ORDER)
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue().encode()
    if fmt == "text":
        lines = []
        for r in rows:
            extras = "".join(
                f" {k}={r[k]:.10g}" if isinstance(r[k], float) else f" {k}={r[k]}"
                for k in ("sigma", "V0", "kappa") if r[k] is not None)
            lines.append(
                f"{'PASS' if r['pass'] else 'FAIL'} {r['suite']:<12} "
                f"metric={r['metric']:<24} samples={r['n_samples']:<5} "
                f"max_abs={r['max_abs_err']:.3e} max_rel={r['max_rel_err']:.3e} "
                f"tol={r['tolerance']:.0e}{extras} ({r['wall_time_ms']:.0f} ms)")
        return ("\n".join(lines) + "\n").encode()
    raise ConfigError(f"unknown report format {fmt!r}")


def _write(path, payload):
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise ConfigError(f"cannot write report to {path}: {exc}")


def main(argv=None):
    try:
        configs, json_path, csv_path = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    reports = []
    for cfg in configs:
        try:
            reports.append(run_suite(cfg))
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except (DomainError, NumericError, FloatingPointError) as exc:
            print(f"numeric failure in suite {cfg.suite}: {exc}", file=sys.stderr)
            reports.append(VerificationReport(
                suite=cfg.suite, metric=cfg.metric, n_samples=cfg.samples,
                max_abs_err=math.inf, max_rel_err=math.inf,
                tolerance=cfg.tolerance, passed=False, seed=cfg.seed))

    sys.stdout.write(emit_report(reports, "text").decode())
    try:
        if json_path:
            _write(json_path, emit_report(reports, "json"))
        if csv_path:
            _write(csv_path, emit_report(reports, "csv"))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
