"""Baker-Akhiezer function: closed form on the reducible curve, theta assembly in general.

On the reducible curve the function is a pair (psi_1, psi_2), one rational
piece per component:

    psi_1 = e^{i x z1} f1,
    psi_2 = e^{i y z2} (f2 + g2 / (z2 - gamma)),

with f1 = d and, writing theta = a*x - b*y,

    f2 = d/(2b) * ((b - gamma) e^{i theta} + (b + gamma) e^{-i theta}),
    g2 = d (b^2 - gamma^2)/(2b) * (e^{i theta} - e^{-i theta}).

The relative minus sign in g2 is pinned by the gluing conditions
psi_1(+-a) = psi_2(+-b); with gamma = i*gamma_im both f2 and the expansion
coefficients at the punctures come out real.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .spectral_curve import ReducibleCurveData
from .theta import LatticeTruncation, PeriodMatrix, riemann_theta

# theta denominators below this magnitude signal a degenerate divisor
DIVISOR_DEGENERACY_TOL = 1e-13


class DivisorDegeneracyError(ArithmeticError):
    """A theta denominator in the assembly formula is numerically zero."""


@dataclass(frozen=True)
class BARationalValue:
    """Value of the rational-model function together with its building blocks.

    f1 and f2 are stored as reals: both are real identically in (x, y) under
    the reality conditions (checked to 1e-12 at construction).
    """

    f1: float
    f2: float
    g2: complex
    psi: complex


def _f2_g2(curve: ReducibleCurveData, x: float, y: float) -> tuple:
    d, b, gamma = curve.d, curve.b, curve.gamma
    theta = curve.a * x - b * y
    ep = cmath.exp(1j * theta)
    em = cmath.exp(-1j * theta)
    f2 = d / (2.0 * b) * ((b - gamma) * ep + (b + gamma) * em)
    g2 = d * (b * b - gamma * gamma) / (2.0 * b) * (ep - em)
    return f2, g2


def f_coefficients(curve: ReducibleCurveData, x: float, y: float) -> tuple:
    """(f1, f2) as reals; the leading expansion coefficients at the punctures."""
    f2, _ = _f2_g2(curve, x, y)
    return curve.d, f2.real


def ba_rational_eval(curve: ReducibleCurveData, x: float, y: float,
                     component: int, coord: complex) -> BARationalValue:
    """Evaluate the Baker-Akhiezer function at a point of the given component."""
    f2c, g2 = _f2_g2(curve, x, y)
    if abs(f2c.imag) > 1e-12 * (1.0 + abs(f2c)):
        raise ArithmeticError(f"f2 lost reality: {f2c}")
    coord = complex(coord)
    if component == 1:
        psi = cmath.exp(1j * x * coord) * curve.d
    elif component == 2:
        if coord == curve.gamma:
            raise ValueError(f"psi_2 has its pole at coord = gamma = {curve.gamma}")
        psi = cmath.exp(1j * y * coord) * (f2c + g2 / (coord - curve.gamma))
    else:
        raise ValueError(f"component must be 1 or 2, got {component}")
    return BARationalValue(f1=curve.d, f2=f2c.real, g2=g2, psi=psi)


def consistency_defect(curve: ReducibleCurveData, x: float, y: float) -> float:
    """Max gluing defect max(|psi1(a) - psi2(b)|, |psi1(-a) - psi2(-b)|)."""
    p1p = ba_rational_eval(curve, x, y, 1, curve.a).psi
    p2p = ba_rational_eval(curve, x, y, 2, curve.b).psi
    p1m = ba_rational_eval(curve, x, y, 1, -curve.a).psi
    p2m = ba_rational_eval(curve, x, y, 2, -curve.b).psi
    return float(max(abs(p1p - p2p), abs(p1m - p2m)))


def ba_conjugation_defect(curve: ReducibleCurveData, x: float, y: float,
                          component: int, coord: complex) -> float:
    """|psi(x, y, tau(P)) - conj(psi(x, y, P))| with tau(z) = -conj(z).

    tau is the composition of the antiholomorphic involution z -> conj(z) with
    the holomorphic involution z -> -z; the reality conditions make the defect
    vanish identically.
    """
    coord = complex(coord)
    tau_coord = -coord.conjugate()
    lhs = ba_rational_eval(curve, x, y, component, tau_coord).psi
    rhs = ba_rational_eval(curve, x, y, component, coord).psi.conjugate()
    return float(abs(lhs - rhs))


def ba_essential_singularity_coeffs(curve: ReducibleCurveData, x: float, y: float,
                                    puncture: str, order: int) -> np.ndarray:
    """Expansion coefficients of psi * e^{-i k t} in powers of 1/(i k) at a puncture.

    Local parameters are k1 = z1 at P1 and k2 = z2 at P2.  At P1 the series is
    (d, 0, 0, ...).  At P2 the geometric expansion of 1/(z2 - gamma) gives
    coefficient g2 * gamma^(n-1) * i^n in the (1/(i k2))^n slot for n >= 1.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    out = np.zeros(order + 1, dtype=complex)
    if puncture == "P1":
        out[0] = curve.d
    elif puncture == "P2":
        f2c, g2 = _f2_g2(curve, x, y)
        out[0] = f2c
        gamma = curve.gamma
        for n in range(1, order + 1):
            out[n] = g2 * gamma ** (n - 1) * (1j) ** n
    else:
        raise ValueError(f"puncture must be 'P1' or 'P2', got {puncture!r}")
    return out


@dataclass(frozen=True)
class ThetaBAInputs:
    """Precomputed period data for the generic theta-form assembly.

    z_vec already contains the Riemann-constant shift minus the Abel images of
    the divisor; U and V are the b-period vectors of the two normalized
    second-kind differentials; exp1_*/exp2_* are the values of their
    exponential path integrals at the evaluation point P and at the
    normalization point r.  All of these are opaque inputs: computing Abel
    maps or period integrals from a curve equation is out of scope here.
    """

    B: PeriodMatrix
    z_vec: np.ndarray
    U: np.ndarray
    V: np.ndarray
    abel_P: np.ndarray
    abel_r: np.ndarray
    exp1_P: complex
    exp2_P: complex
    exp1_r: complex
    exp2_r: complex
    d: float

    def __post_init__(self):
        g = self.B.genus
        for name in ("z_vec", "U", "V", "abel_P", "abel_r"):
            vec = np.asarray(getattr(self, name), dtype=complex)
            if vec.shape != (g,):
                raise ValueError(f"{name} has shape {vec.shape}, expected ({g},)")
            vec.setflags(write=False)
            object.__setattr__(self, name, vec)


def ba_theta_assembly(inp: ThetaBAInputs, x: float, y: float,
                      trunc: LatticeTruncation | None = None) -> complex:
    """psi(x, y, P) = psi_tilde(P) / psi_tilde(r) * d in the theta form.

    psi_tilde(P) = theta(A(P) + xU + yV + z) / theta(A(P) + z)
                   * exp(2 pi i (x * exp1_P + y * exp2_P)).
    """
    def tilde(abel, e1, e2):
        den = riemann_theta(abel + inp.z_vec, inp.B, trunc)
        if abs(den) < DIVISOR_DEGENERACY_TOL:
            raise DivisorDegeneracyError(
                f"theta(A + z) = {den}: divisor hits the evaluation point"
            )
        num = riemann_theta(abel + x * inp.U + y * inp.V + inp.z_vec, inp.B, trunc)
        return num / den * cmath.exp(2j * math.pi * (x * e1 + y * e2))

    psi_r = tilde(inp.abel_r, inp.exp1_r, inp.exp2_r)
    if abs(psi_r) < DIVISOR_DEGENERACY_TOL:
        raise DivisorDegeneracyError(f"psi_tilde(r) = {psi_r}: normalization degenerates")
    return tilde(inp.abel_P, inp.exp1_P, inp.exp2_P) / psi_r * inp.d


def read_theta_ba_inputs(path) -> ThetaBAInputs:
    """Parse theta-assembly inputs from a labeled plain-text file.

    Lines are ``key value...`` with '#' comments.  Keys: ``genus`` (first),
    ``B`` repeated genus times (one matrix row per line), the vectors
    ``z_vec U V abel_P abel_r`` (genus complex entries each), the scalars
    ``exp1_P exp2_P exp1_r exp2_r`` and the real ``d``.
    """
    rows = {"B": []}
    with open(path) as fh:
        for raw in fh:
            ln = raw.split("#")[0].strip()
            if not ln:
                continue
            key, *toks = ln.split()
            if key == "B":
                rows["B"].append([complex(t) for t in toks])
            else:
                rows[key] = toks
    try:
        g = int(rows["genus"][0])
        B = PeriodMatrix(rows["B"])
        if B.genus != g:
            raise ValueError(f"genus {g} does not match {len(rows['B'])} B rows")
        vecs = {k: np.array([complex(t) for t in rows[k]])
                for k in ("z_vec", "U", "V", "abel_P", "abel_r")}
        scalars = {k: complex(rows[k][0])
                   for k in ("exp1_P", "exp2_P", "exp1_r", "exp2_r")}
        d = float(rows["d"][0])
    except KeyError as exc:
        raise ValueError(f"{path}: missing key {exc}") from None
    return ThetaBAInputs(B=B, d=d, **vecs, **scalars)
