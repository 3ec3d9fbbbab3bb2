"""Command-line interface: mlsurf <verify|sample|curve-info|theta> [flags]."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .report import (GridSpec, curve_info_text, env_threads, sample_rows,
                     verify_cone, verify_spectral, write_csv)
from .spectral_curve import derive_constants
from .surface_families import (cone_family_jet, cone_metric_field,
                               spectral_family_jet, spectral_metric_field)
from .theta import LatticeTruncation, quasi_periodicity_defect, read_period_matrix, riemann_theta


def _parse_grid(text: str) -> GridSpec:
    try:
        nx, ny = text.lower().split("x")
        return GridSpec(nx=int(nx), ny=int(ny))
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"grid must look like 64x64, got {text!r}")


def _family_flags(sub, cone_allowed: bool = True):
    families = ["spectral", "cone"] if cone_allowed else ["spectral"]
    sub.add_argument("--family", choices=families,
                     default="spectral" if not cone_allowed else None,
                     required=cone_allowed)
    sub.add_argument("--a", type=float)
    sub.add_argument("--b", type=float)
    sub.add_argument("--q1", type=float)
    sub.add_argument("--gamma-im", type=float, dest="gamma_im")
    sub.add_argument("--scenario", help="key = value file with a, b, q1, gamma_im")
    if cone_allowed:
        sub.add_argument("--m", type=int)
        sub.add_argument("--n", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlsurf",
        description="Construct minimal Lagrangian surfaces in CP^2 from spectral "
                    "data and verify the geometric identities on a grid.")
    subs = parser.add_subparsers(dest="command", required=True)

    verify = subs.add_parser("verify", help="run the verification suite")
    _family_flags(verify)
    verify.add_argument("--grid", type=_parse_grid, default=GridSpec(64, 64))
    verify.add_argument("--h", type=float, default=1e-4, help="finite-difference step")
    verify.add_argument("--tol-profile", choices=["strict", "fd"], default="strict",
                        dest="tol_profile")
    verify.add_argument("--json-out", dest="json_out", help="write machine-readable report")

    sample = subs.add_parser("sample", help="sample the surface to CSV")
    _family_flags(sample)
    sample.add_argument("--grid", type=_parse_grid, default=GridSpec(64, 64))
    sample.add_argument("--h", type=float, default=1e-4)
    sample.add_argument("--tol-profile", choices=["strict", "fd"], default="strict",
                        dest="tol_profile")
    sample.add_argument("--out", required=True, help="CSV output path")

    info = subs.add_parser("curve-info", help="dump derived curve constants")
    _family_flags(info, cone_allowed=False)

    theta = subs.add_parser("theta", help="evaluate the Riemann theta function")
    theta.add_argument("--period-file", required=True, dest="period_file",
                       help="text file: genus line, then g rows of g complex entries")
    theta.add_argument("--z", required=True,
                       help="comma-separated complex entries, e.g. 0.1+0.2j,0.3j")
    theta.add_argument("--radius", type=int, help="lattice truncation |m|_inf <= R")
    theta.add_argument("--shift-m", dest="shift_m",
                       help="integer vector: also print the quasi-periodicity defect")
    return parser


def _read_scenario(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            ln = raw.split("#")[0].strip()
            if not ln:
                continue
            if "=" not in ln:
                raise ValueError(f"{path}: expected 'key = value', got {ln!r}")
            key, _, val = ln.partition("=")
            out[key.strip()] = float(val.strip())
    return out


def _spectral_curve_from_args(args):
    params = {"a": args.a, "b": args.b, "q1": args.q1, "gamma_im": args.gamma_im}
    if args.scenario:
        scen = _read_scenario(args.scenario)
        unknown = set(scen) - {"a", "b", "q1", "gamma_im"}
        if unknown:
            raise ValueError(f"scenario has unknown keys: {sorted(unknown)}")
        for key, val in scen.items():
            if params[key] is None:
                params[key] = val
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise ValueError(f"missing spectral parameters: {', '.join(missing)}")
    return derive_constants(params["a"], params["b"], params["q1"], params["gamma_im"])


def _cone_params_from_args(args):
    if args.m is None or args.n is None:
        raise ValueError("cone family needs --m and --n")
    return args.m, args.n


def _cmd_verify(args) -> int:
    if args.family == "spectral":
        curve = _spectral_curve_from_args(args)
        report = verify_spectral(curve, args.grid, h=args.h,
                                 tol_profile=args.tol_profile, threads=env_threads())
    else:
        m, n = _cone_params_from_args(args)
        report = verify_cone(m, n, args.grid, h=args.h,
                             tol_profile=args.tol_profile, threads=env_threads())
    print(report.format_text())
    if args.json_out:
        report.write_json(args.json_out)
    return 0 if report.overall else 1


def _cmd_sample(args) -> int:
    if args.family == "spectral":
        curve = _spectral_curve_from_args(args)
        jet_field = lambda x, y: spectral_family_jet(curve, x, y)
        m_field = spectral_metric_field(curve)
        tube = curve
    else:
        m, n = _cone_params_from_args(args)
        jet_field = lambda x, y: cone_family_jet(m, n, x, y)
        m_field = cone_metric_field(m, n)
        tube = None
    if args.tol_profile == "fd":
        m_field = m_field.without_derivatives()
    rows = sample_rows(jet_field, m_field, args.grid, args.h, tube)
    try:
        write_csv(args.out, rows)
    except OSError as exc:
        raise ValueError(f"cannot write {args.out}: {exc}") from None
    return 0


def _cmd_curve_info(args) -> int:
    curve = _spectral_curve_from_args(args)
    print(curve_info_text(curve))
    return 0


def _parse_complex_vector(text: str) -> np.ndarray:
    return np.array([complex(tok) for tok in text.split(",") if tok.strip()])


def _cmd_theta(args) -> int:
    B = read_period_matrix(args.period_file)
    z = _parse_complex_vector(args.z)
    trunc = LatticeTruncation(args.radius) if args.radius else None
    val = riemann_theta(z, B, trunc)
    print(f"theta = {val.real:.17g}{val.imag:+.17g}j")
    if args.shift_m:
        m = np.array([int(tok) for tok in args.shift_m.split(",") if tok.strip()])
        defect = quasi_periodicity_defect(z, m, B, trunc)
        print(f"quasi_periodicity_defect = {defect:.17g}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return exc.code if isinstance(exc.code, int) else 2
    commands = {"verify": _cmd_verify, "sample": _cmd_sample,
                "curve-info": _cmd_curve_info, "theta": _cmd_theta}
    try:
        return commands[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
