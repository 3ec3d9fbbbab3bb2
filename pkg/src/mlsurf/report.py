"""Grid-scale verification runs, report records and CSV sampling."""

from __future__ import annotations

import cmath
import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import diffgeo
from .diffgeo import (angle_defect, angle_defect_mod_pi, gram_defects,
                      lagrangian_angle)
from .spectral_curve import (ReducibleCurveData, expansion_at_infinity,
                             regularity_defect)
from .surface_families import (MetricField, cone_family_jet, cone_metric_field,
                               in_degeneracy_tube, spectral_family_jet,
                               spectral_metric_field)

TUBE_RADIUS = 1e-2
TUBE_G_TOL = 1e-3

# tolerance tiers: analytic identities / derived identities / single-FD / curvature
TOL_ANALYTIC = 1e-10
TOL_IDENTITY = 1e-8
TOL_FRAME = 1e-6
TOL_CURVATURE = {"strict": 1e-4, "fd": 1e-3}
TOL_RESIDUE_IDENTITY = 1e-9


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    x_range: tuple = (0.0, 2.0 * math.pi)
    y_range: tuple = (0.0, 2.0 * math.pi)

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid must have at least one point per axis")

    def xs(self) -> np.ndarray:
        x0, x1 = self.x_range
        return x0 + (x1 - x0) * np.arange(self.nx) / self.nx

    def ys(self) -> np.ndarray:
        y0, y1 = self.y_range
        return y0 + (y1 - y0) * np.arange(self.ny) / self.ny

    def to_dict(self) -> dict:
        return {"nx": self.nx, "ny": self.ny,
                "x_range": list(self.x_range), "y_range": list(self.y_range)}


@dataclass
class CheckRecord:
    """One verified identity: measured value against its pinned tolerance.

    kind "upper" passes when value <= tolerance (defect checks); kind "lower"
    passes when value > tolerance (nondegeneracy checks).
    """

    name: str
    value: float
    tolerance: float
    kind: str = "upper"
    excluded_points: int = 0

    @property
    def passed(self) -> bool:
        if math.isnan(self.value):
            return False
        if self.kind == "lower":
            return self.value > self.tolerance
        return self.value <= self.tolerance

    def to_dict(self) -> dict:
        return {"name": self.name, "max_defect": self.value,
                "tolerance": self.tolerance, "kind": self.kind,
                "excluded_points": self.excluded_points, "passed": self.passed}


@dataclass
class VerificationReport:
    family: str
    parameters: dict
    grid: GridSpec
    h: float
    tol_profile: str
    checks: list = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"family": self.family, "parameters": self.parameters,
                "grid": self.grid.to_dict(), "h": self.h,
                "tol_profile": self.tol_profile,
                "checks": [c.to_dict() for c in self.checks],
                "overall": self.overall}

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def format_text(self) -> str:
        pars = " ".join(f"{k}={v}" for k, v in self.parameters.items())
        lines = [
            f"family={self.family} {pars} grid={self.grid.nx}x{self.grid.ny} "
            f"h={self.h:g} profile={self.tol_profile}",
            f"  {'check':<28} {'value':>12} {'tolerance':>10} {'excl':>5}  status",
        ]
        for c in self.checks:
            rel = "<=" if c.kind == "upper" else "> "
            lines.append(
                f"  {c.name:<28} {c.value:>12.3e} {rel}{c.tolerance:>8.1e} "
                f"{c.excluded_points:>5}  {'PASS' if c.passed else 'FAIL'}"
            )
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


class _MaxAggregator:
    """Associative max-reduction of per-point defects plus exclusion counts."""

    def __init__(self):
        self.values = {}
        self.excluded = {}

    def see(self, name: str, value: float) -> None:
        value = float(value)
        if name not in self.values or value > self.values[name]:
            self.values[name] = value

    def fail(self, *names: str) -> None:
        for name in names:
            self.see(name, math.inf)

    def exclude(self, *names: str) -> None:
        for name in names:
            self.excluded[name] = self.excluded.get(name, 0) + 1

    def merge(self, other: "_MaxAggregator") -> None:
        for name, value in other.values.items():
            self.see(name, value)
        for name, count in other.excluded.items():
            self.excluded[name] = self.excluded.get(name, 0) + count


_GRAM_NAMES = ("gram_norm", "gram_phi_phix", "gram_phi_phiy", "gram_phix_phiy")
_FRAME_NAMES = ("unitarity", "det_unit", "A_antiherm", "B_antiherm", "A_trace",
                "B_trace", "A_pattern", "B_pattern", "f_real", "h_real")
_CHRISTOFFEL_NAMES = ("christoffel_b11", "christoffel_b12", "christoffel_b22",
                      "gradient_identity_x", "gradient_identity_y", "minimality_im_x", "minimality_im_y")


@dataclass(frozen=True)
class _SweepConfig:
    jet_field: object
    metric_field: MetricField
    beta_ref: float
    h: float
    tube_curve: ReducibleCurveData | None = None   # enables tube exclusion
    residue_curve: ReducibleCurveData | None = None
    curvature_field: MetricField | None = None     # K must equal 1 where set
    check_beta_squared: bool = False
    check_anisotropy: bool = False
    beta_mod: str = "2pi"

    def angle_check_names(self) -> tuple:
        names = ["beta_constant"] + list(_CHRISTOFFEL_NAMES)
        names += ["frame_" + n for n in _FRAME_NAMES]
        if self.check_beta_squared:
            names.append("beta_e2i_plus_one")
        if self.curvature_field is not None:
            names.append("curvature_K_minus_1")
        return tuple(names)


def _point_checks(cfg: _SweepConfig, agg: _MaxAggregator, x: float, y: float) -> None:
    jet = cfg.jet_field(x, y)
    g = gram_defects(jet)
    for name, val in zip(_GRAM_NAMES, g):
        agg.see(name, val)

    E = float(np.sum(np.abs(jet.phi_x) ** 2))
    G = float(np.sum(np.abs(jet.phi_y) ** 2))
    agg.see("metric_E_closed_form", abs(E - cfg.metric_field.E(x, y)))
    agg.see("metric_G_closed_form", abs(G - cfg.metric_field.G(x, y)))

    if cfg.residue_curve is not None:
        t1 = diffgeo.residue_identity_defects(cfg.residue_curve, jet)
        for k, val in enumerate(t1):
            agg.see(f"residue_identity_{k + 1}", val)

    in_tube = (cfg.tube_curve is not None
               and in_degeneracy_tube(cfg.tube_curve, x, y, TUBE_RADIUS))
    if in_tube:
        agg.see("tube_G_bound", G)
        agg.exclude(*cfg.angle_check_names())
        return

    try:
        beta = lagrangian_angle(jet)
    except ValueError:
        agg.fail(*cfg.angle_check_names())
        return
    if cfg.check_beta_squared:
        agg.see("beta_e2i_plus_one", abs(cmath.exp(2j * beta) + 1.0))
    if cfg.beta_mod == "pi":
        agg.see("beta_constant", angle_defect_mod_pi(beta, cfg.beta_ref))
    else:
        agg.see("beta_constant", angle_defect(beta, cfg.beta_ref))

    if cfg.check_anisotropy:
        md = diffgeo.metric_from_jet(jet)
        agg.see("metric_anisotropy", abs(md.v1 - md.v2))

    try:
        md = diffgeo.metric_from_jet(jet)
        ch = diffgeo.christoffel_solve(jet)
        for name, val in zip(("christoffel_b11", "christoffel_b12", "christoffel_b22"),
                             diffgeo.christoffel_b_defects(ch, md)):
            agg.see(name, val)
        grads = diffgeo.metric_gradients_from_jet(jet)
        beta_grads = diffgeo.beta_gradient_fd(cfg.jet_field, x, y, cfg.h)
        for name, val in zip(("gradient_identity_x", "gradient_identity_y"),
                             diffgeo.gradient_identity_defects(ch, grads, beta_grads)):
            agg.see(name, val)
        for name, val in zip(("minimality_im_x", "minimality_im_y"),
                             diffgeo.minimality_defects(ch)):
            agg.see(name, val)
    except ValueError:
        agg.fail(*_CHRISTOFFEL_NAMES)

    try:
        fr = diffgeo.frame_and_connection(cfg.jet_field, x, y, cfg.h)
        for name, val in diffgeo.frame_defects(fr).items():
            agg.see("frame_" + name, val)
    except ValueError:
        agg.fail(*("frame_" + n for n in _FRAME_NAMES))

    if cfg.curvature_field is not None:
        try:
            K = diffgeo.gauss_curvature(cfg.curvature_field, x, y, cfg.h)
            agg.see("curvature_K_minus_1", abs(K - 1.0))
        except ValueError:
            agg.fail("curvature_K_minus_1")


def _sweep(cfg: _SweepConfig, grid: GridSpec, threads: int) -> _MaxAggregator:
    xs, ys = grid.xs(), grid.ys()

    def run_row(y):
        agg = _MaxAggregator()
        for x in xs:
            _point_checks(cfg, agg, float(x), float(y))
        return agg

    total = _MaxAggregator()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for agg in pool.map(run_row, ys):
                total.merge(agg)
    else:
        for y in ys:
            total.merge(run_row(float(y)))
    return total


def _reference_beta(cfg_jet_field, grid: GridSpec, tube_curve) -> float:
    for y in grid.ys():
        for x in grid.xs():
            if tube_curve is not None and in_degeneracy_tube(tube_curve, float(x),
                                                             float(y), TUBE_RADIUS):
                continue
            return lagrangian_angle(cfg_jet_field(float(x), float(y)))
    raise ValueError("no grid point outside the degeneracy tube")


def env_threads() -> int:
    raw = os.environ.get("MLSURF_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def verify_spectral(curve: ReducibleCurveData, grid: GridSpec, h: float = 1e-4,
                    tol_profile: str = "strict", threads: int | None = None) -> VerificationReport:
    """Run the full spectral-family check suite over the grid."""
    if tol_profile not in TOL_CURVATURE:
        raise ValueError(f"unknown tol profile {tol_profile!r}")
    threads = env_threads() if threads is None else threads
    jet_field = lambda x, y: spectral_family_jet(curve, x, y)
    m_field = spectral_metric_field(curve)
    k_field = m_field if tol_profile == "strict" else m_field.without_derivatives()
    cfg = _SweepConfig(
        jet_field=jet_field, metric_field=m_field,
        beta_ref=_reference_beta(jet_field, grid, curve), h=h,
        tube_curve=curve, residue_curve=curve, curvature_field=k_field,
        check_beta_squared=True, beta_mod="pi",
    )
    agg = _sweep(cfg, grid, threads)

    report = VerificationReport(
        family="spectral",
        parameters={"a": curve.a, "b": curve.b, "q1": curve.Q1,
                    "gamma_im": curve.gamma_im},
        grid=grid, h=h, tol_profile=tol_profile,
    )
    checks = report.checks
    for name in _GRAM_NAMES:
        checks.append(CheckRecord(name, agg.values[name], TOL_ANALYTIC))
    checks.append(CheckRecord("metric_E_closed_form",
                              agg.values["metric_E_closed_form"], TOL_ANALYTIC))
    checks.append(CheckRecord("metric_G_closed_form",
                              agg.values["metric_G_closed_form"], TOL_ANALYTIC))
    for k in range(6):
        name = f"residue_identity_{k + 1}"
        checks.append(CheckRecord(name, agg.values[name], TOL_RESIDUE_IDENTITY))
    _append_angle_checks(checks, agg, cfg)
    checks.append(CheckRecord("curvature_K_minus_1",
                              agg.values["curvature_K_minus_1"],
                              TOL_CURVATURE[tol_profile],
                              excluded_points=agg.excluded.get("curvature_K_minus_1", 0)))
    if "tube_G_bound" in agg.values:
        checks.append(CheckRecord("tube_G_bound", agg.values["tube_G_bound"], TUBE_G_TOL))
    checks.extend(curve_checks(curve))
    return report


def _append_angle_checks(checks: list, agg: _MaxAggregator, cfg: _SweepConfig) -> None:
    def rec(name, tol):
        checks.append(CheckRecord(name, agg.values[name], tol,
                                  excluded_points=agg.excluded.get(name, 0)))

    if cfg.check_beta_squared:
        rec("beta_e2i_plus_one", TOL_ANALYTIC)
    rec("beta_constant", TOL_IDENTITY)
    for name in _CHRISTOFFEL_NAMES:
        rec(name, TOL_IDENTITY)
    for name in _FRAME_NAMES:
        rec("frame_" + name, TOL_FRAME)


def verify_cone(m: int, n: int, grid: GridSpec, h: float = 1e-4,
                tol_profile: str = "strict", threads: int | None = None) -> VerificationReport:
    """Run the cone-family check suite over the grid."""
    if tol_profile not in TOL_CURVATURE:
        raise ValueError(f"unknown tol profile {tol_profile!r}")
    if m < 1 or n < 1:
        raise ValueError(f"m, n must be positive integers, got {m}, {n}")
    threads = env_threads() if threads is None else threads
    jet_field = lambda x, y: cone_family_jet(m, n, x, y)
    cfg = _SweepConfig(
        jet_field=jet_field, metric_field=cone_metric_field(m, n),
        beta_ref=lagrangian_angle(jet_field(float(grid.xs()[0]), float(grid.ys()[0]))),
        h=h, check_anisotropy=True, beta_mod="2pi",
    )
    agg = _sweep(cfg, grid, threads)

    report = VerificationReport(
        family="cone", parameters={"m": m, "n": n},
        grid=grid, h=h, tol_profile=tol_profile,
    )
    checks = report.checks
    for name in _GRAM_NAMES:
        checks.append(CheckRecord(name, agg.values[name], TOL_ANALYTIC))
    checks.append(CheckRecord("metric_E_closed_form",
                              agg.values["metric_E_closed_form"], TOL_ANALYTIC))
    checks.append(CheckRecord("metric_G_closed_form",
                              agg.values["metric_G_closed_form"], TOL_ANALYTIC))
    _append_angle_checks(checks, agg, cfg)
    checks.append(CheckRecord("metric_anisotropy", agg.values["metric_anisotropy"],
                              0.1, kind="lower"))
    return report


def curve_checks(curve: ReducibleCurveData) -> list:
    """Curve-level records: regularity, puncture expansions, residue signs."""
    w1 = expansion_at_infinity(curve.omega1(), 2)
    w2 = expansion_at_infinity(curve.omega2(), 2)
    return [
        CheckRecord("curve_regularity", regularity_defect(curve), 1e-13),
        CheckRecord("curve_w2_P1_rel", float(abs(w1[1]) / abs(w1[0])), 1e-12),
        CheckRecord("curve_w2_P2_rel", float(abs(w2[1]) / abs(w2[0])), 1e-12),
        CheckRecord("curve_Q_sum", abs(curve.Q1 + curve.Q2 + curve.Q3), 1e-13),
        CheckRecord("curve_residues_positive", min(curve.res_Q), 0.0, kind="lower"),
    ]


CSV_HEADER = ["x", "y", "re_phi1", "im_phi1", "re_phi2", "im_phi2",
              "re_phi3", "im_phi3", "E", "G", "beta", "K"]


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def sample_rows(jet_field, metric_field: MetricField,
                grid: GridSpec, h: float, tube_curve=None):
    """Yield CSV rows; beta and K are empty at excluded degenerate points."""
    for y in grid.ys():
        for x in grid.xs():
            x, y2 = float(x), float(y)
            jet = jet_field(x, y2)
            E = float(np.sum(np.abs(jet.phi_x) ** 2))
            G = float(np.sum(np.abs(jet.phi_y) ** 2))
            excluded = (tube_curve is not None
                        and in_degeneracy_tube(tube_curve, x, y2, TUBE_RADIUS))
            beta_s = ""
            k_s = ""
            if not excluded:
                try:
                    beta_s = _fmt(lagrangian_angle(jet))
                except ValueError:
                    beta_s = ""
                try:
                    k_s = _fmt(diffgeo.gauss_curvature(metric_field, x, y2, h))
                except ValueError:
                    k_s = ""
            row = [_fmt(x), _fmt(y2)]
            for comp in jet.phi:
                row.extend([_fmt(comp.real), _fmt(comp.imag)])
            row.extend([_fmt(E), _fmt(G), beta_s, k_s])
            yield row


def write_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row)


def curve_info_text(curve: ReducibleCurveData) -> str:
    """Human-readable dump of every derived curve constant."""
    omega1 = curve.omega1()
    omega2 = curve.omega2()
    w2 = expansion_at_infinity(omega2, 2)
    from .spectral_curve import residue_simple
    lines = [
        f"a        = {_fmt(curve.a)}",
        f"b        = {_fmt(curve.b)}",
        f"Q1       = {_fmt(curve.Q1)}",
        f"Q2       = {_fmt(curve.Q2)}",
        f"Q3       = {_fmt(curve.Q3)}",
        f"gamma    = {_fmt(curve.gamma_im)}j",
        f"c        = {_fmt(curve.c)}",
        f"d        = {_fmt(curve.d)}",
    ]
    for i in range(3):
        lines.append(f"alpha_{i + 1}  = {_fmt(curve.alpha[i])}")
    for i in range(3):
        lines.append(f"Res_Q{i + 1}   = {_fmt(curve.res_Q[i])}")
    lines += [
        f"Res_r    = {_fmt(curve.res_r)}",
        f"c1_exp   = {_fmt(curve.c1_exp)}",
        f"c2_exp   = {_fmt(curve.c2_exp)}",
        f"w2_coeff_P2      = {_fmt(abs(w2[1]))}",
        f"regularity(+a,+b) = {_fmt(abs(residue_simple(omega1, curve.a) + residue_simple(omega2, curve.b)))}",
        f"regularity(-a,-b) = {_fmt(abs(residue_simple(omega1, -curve.a) + residue_simple(omega2, -curve.b)))}",
    ]
    return "\n".join(lines)
