"""Differential-geometric identity checks on surface jets.

Everything here is a pure per-point computation producing defect numbers;
the conventions are fixed once:

  * Hermitian product <u, w> = sum_i u_i * conj(w_i) (second slot conjugated).
  * Metric notation |phi_x|^2 = 2 e^{v1}, |phi_y|^2 = 2 e^{v2}; E and G are
    the diagonal metric coefficients themselves.
  * Christoffel system phi_xx = G111 phi_x + G112 phi_y + b11 phi (and the
    xy / yy analogues); field names are G{i}{j}{k} for the coefficient of the
    k-th basis direction in the (i, j) equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baker_akhiezer import f_coefficients
from .spectral_curve import ReducibleCurveData
from .surface_families import MetricField, SurfaceJet

CONDITION_LIMIT = 1e8
UNITARITY_GATE = 1e-6


def herm(u, w) -> complex:
    """Hermitian product conjugating the second slot."""
    return complex(np.vdot(w, u))


def gram_defects(jet: SurfaceJet) -> np.ndarray:
    """(|<phi,phi>-1|, |<phi,phi_x>|, |<phi,phi_y>|, |<phi_x,phi_y>|)."""
    return np.array([
        abs(herm(jet.phi, jet.phi) - 1.0),
        abs(herm(jet.phi, jet.phi_x)),
        abs(herm(jet.phi, jet.phi_y)),
        abs(herm(jet.phi_x, jet.phi_y)),
    ])


@dataclass(frozen=True)
class MetricData:
    v1: float
    v2: float
    E: float
    G: float


def metric_from_jet(jet: SurfaceJet) -> MetricData:
    E = float(np.sum(np.abs(jet.phi_x) ** 2))
    G = float(np.sum(np.abs(jet.phi_y) ** 2))
    if E == 0.0 or G == 0.0:
        raise ValueError("degenerate immersion point: a first derivative vanishes")
    return MetricData(v1=math.log(E / 2.0), v2=math.log(G / 2.0), E=E, G=G)


def metric_gradients_from_jet(jet: SurfaceJet) -> dict:
    """Analytic v1/v2 gradients via E_x = 2 Re<phi_xx, phi_x> etc."""
    md = metric_from_jet(jet)
    Ex = 2.0 * herm(jet.phi_xx, jet.phi_x).real
    Ey = 2.0 * herm(jet.phi_xy, jet.phi_x).real
    Gx = 2.0 * herm(jet.phi_xy, jet.phi_y).real
    Gy = 2.0 * herm(jet.phi_yy, jet.phi_y).real
    return {"v1x": Ex / md.E, "v1y": Ey / md.E, "v2x": Gx / md.G, "v2y": Gy / md.G}


def lagrangian_angle(jet: SurfaceJet) -> float:
    """beta = arg det of the unitary frame (phi, phi_x/|phi_x|, phi_y/|phi_y|).

    Raises when |det| strays from the unit circle by more than 1e-6, which
    signals a non-Lagrangian jet or a degenerate point.
    """
    nx = np.linalg.norm(jet.phi_x)
    ny = np.linalg.norm(jet.phi_y)
    if nx == 0.0 or ny == 0.0:
        raise ValueError("degenerate immersion point: a first derivative vanishes")
    frame = np.array([jet.phi, jet.phi_x / nx, jet.phi_y / ny])
    det = np.linalg.det(frame)
    if abs(abs(det) - 1.0) > UNITARITY_GATE:
        raise ValueError(f"frame determinant off the unit circle: |det| = {abs(det)}")
    return float(np.angle(det))


def angle_defect_mod_pi(beta: float, beta_ref: float) -> float:
    """Distance from beta - beta_ref to the nearest multiple of pi.

    The frame's derivative rows reverse orientation across metric-degeneracy
    lines, flipping beta by pi; e^{2 i beta} (the quantity the construction
    pins down) is insensitive to that flip.
    """
    return abs(math.remainder(beta - beta_ref, math.pi))


def angle_defect(beta: float, beta_ref: float) -> float:
    """Distance from beta - beta_ref to the nearest multiple of 2 pi."""
    return abs(math.remainder(beta - beta_ref, 2.0 * math.pi))


@dataclass(frozen=True)
class ChristoffelData:
    """Connection coefficients of the moving basis (phi_x, phi_y, phi)."""

    G111: complex
    G112: complex
    G121: complex
    G122: complex
    G221: complex
    G222: complex
    b11: complex
    b12: complex
    b22: complex


def christoffel_solve(jet: SurfaceJet) -> ChristoffelData:
    """Solve the three 3x3 systems phi_ss = G^1 phi_x + G^2 phi_y + b phi.

    Requires (phi_x, phi_y, phi) linearly independent; the basis condition
    number is rejected above 1e8.
    """
    basis = np.column_stack([jet.phi_x, jet.phi_y, jet.phi])
    cond = np.linalg.cond(basis)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ValueError(f"moving basis ill-conditioned: cond = {cond:.3e}")
    rhs = np.column_stack([jet.phi_xx, jet.phi_xy, jet.phi_yy])
    sol = np.linalg.solve(basis, rhs)
    return ChristoffelData(
        G111=sol[0, 0], G112=sol[1, 0], b11=sol[2, 0],
        G121=sol[0, 1], G122=sol[1, 1], b12=sol[2, 1],
        G221=sol[0, 2], G222=sol[1, 2], b22=sol[2, 2],
    )


def christoffel_residual(jet: SurfaceJet, ch: ChristoffelData) -> float:
    """Componentwise backward error of the solved linear systems."""
    res = 0.0
    for rhs, g1, g2, b in ((jet.phi_xx, ch.G111, ch.G112, ch.b11),
                           (jet.phi_xy, ch.G121, ch.G122, ch.b12),
                           (jet.phi_yy, ch.G221, ch.G222, ch.b22)):
        res = max(res, float(np.max(np.abs(
            rhs - g1 * jet.phi_x - g2 * jet.phi_y - b * jet.phi))))
    return res


def christoffel_b_defects(ch: ChristoffelData, metric: MetricData) -> np.ndarray:
    """Relative defects of b11 = -2e^{v1}, b12 = 0, b22 = -2e^{v2}.

    b12 is scaled by sqrt(E*G), the natural symmetric magnitude of the other
    two targets.
    """
    return np.array([
        abs(ch.b11 + metric.E) / metric.E,
        abs(ch.b12) / math.sqrt(metric.E * metric.G),
        abs(ch.b22 + metric.G) / metric.G,
    ])


def gradient_identity_defects(ch: ChristoffelData, metric_grads: dict, beta_grads: tuple) -> np.ndarray:
    """Defects of G111 + G122 = (v1x + v2x)/2 + i beta_x and the y analogue."""
    bx, by = beta_grads
    d1 = abs(ch.G111 + ch.G122
             - (0.5 * (metric_grads["v1x"] + metric_grads["v2x"]) + 1j * bx))
    d2 = abs(ch.G121 + ch.G222
             - (0.5 * (metric_grads["v1y"] + metric_grads["v2y"]) + 1j * by))
    return np.array([d1, d2])


def minimality_defects(ch: ChristoffelData) -> np.ndarray:
    """(|Im(G111 + G122)|, |Im(G121 + G222)|); both vanish iff minimal."""
    return np.array([
        abs((ch.G111 + ch.G122).imag),
        abs((ch.G121 + ch.G222).imag),
    ])


@dataclass(frozen=True)
class FrameData:
    Phi: np.ndarray
    beta: float
    A: np.ndarray
    B: np.ndarray
    f: float
    h: float


def _twisted_frame(jet: SurfaceJet, beta: float) -> np.ndarray:
    """SU(3) frame: rows phi, e^{-i beta/2} phi_x/|phi_x|, e^{-i beta/2} phi_y/|phi_y|."""
    tw = np.exp(-0.5j * beta)
    return np.array([
        jet.phi,
        tw * jet.phi_x / np.linalg.norm(jet.phi_x),
        tw * jet.phi_y / np.linalg.norm(jet.phi_y),
    ])


def frame_and_connection(jet_field, x: float, y: float, h: float = 1e-4) -> FrameData:
    """Frame Phi at (x, y) and connection matrices A = Phi_x Phi^-1, B = Phi_y Phi^-1.

    jet_field maps (x, y) to a SurfaceJet; Phi derivatives are central finite
    differences with step h.  The Lagrangian angle at the stencil points is
    unwrapped to the nearest value of the center angle so the half-angle twist
    stays continuous.
    """
    center = jet_field(x, y)
    beta_c = lagrangian_angle(center)

    def frame_at(xx, yy):
        j = jet_field(xx, yy)
        if np.linalg.norm(j.phi_y) < 1e-8 or np.linalg.norm(j.phi_x) < 1e-8:
            raise ValueError("stencil crosses a degenerate point")
        b = lagrangian_angle(j)
        b = beta_c + math.remainder(b - beta_c, 2.0 * math.pi)
        return _twisted_frame(j, b)

    Phi = _twisted_frame(center, beta_c)
    Phi_x = (frame_at(x + h, y) - frame_at(x - h, y)) / (2.0 * h)
    Phi_y = (frame_at(x, y + h) - frame_at(x, y - h)) / (2.0 * h)
    inv = np.linalg.inv(Phi)
    A = Phi_x @ inv
    B = Phi_y @ inv
    return FrameData(Phi=Phi, beta=beta_c, A=A, B=B,
                     f=float(A[1, 1].imag), h=float(B[1, 1].imag))


def frame_defects(fd: FrameData) -> dict:
    """Residuals of every FrameData invariant, for reporting."""
    eye = np.eye(3)
    unitarity = float(np.max(np.abs(fd.Phi @ fd.Phi.conj().T - eye)))
    det = np.linalg.det(fd.Phi)
    out = {
        "unitarity": unitarity,
        "det_unit": float(abs(det - 1.0)),
        "A_antiherm": float(np.max(np.abs(fd.A + fd.A.conj().T))),
        "B_antiherm": float(np.max(np.abs(fd.B + fd.B.conj().T))),
        "A_trace": float(abs(np.trace(fd.A))),
        "B_trace": float(abs(np.trace(fd.B))),
        "A_pattern": float(max(abs(fd.A[0, 2]), abs(fd.A[2, 0]))),
        "B_pattern": float(max(abs(fd.B[0, 1]), abs(fd.B[1, 0]))),
        "f_real": float(abs(fd.A[1, 1].real)),
        "h_real": float(abs(fd.B[1, 1].real)),
    }
    return out


def beta_gradient_fd(jet_field, x: float, y: float, h: float = 1e-4) -> tuple:
    """Central-difference gradient of the Lagrangian angle, unwrapped mod 2 pi."""
    def delta(b1, b2):
        return math.remainder(b1 - b2, 2.0 * math.pi)

    bx = delta(lagrangian_angle(jet_field(x + h, y)),
               lagrangian_angle(jet_field(x - h, y))) / (2.0 * h)
    by = delta(lagrangian_angle(jet_field(x, y + h)),
               lagrangian_angle(jet_field(x, y - h))) / (2.0 * h)
    return bx, by


def residue_identity_defects(curve: ReducibleCurveData, jet: SurfaceJet) -> np.ndarray:
    """Absolute values of the six residue-identity sums.

    With A_k = Res_{Q_k} Omega / alpha_k^2 (identically 1 under the
    alpha = sqrt(Res) normalization) the six sums are the residue totals of
    the forms psi(P) conj(psi(mu P)) Omega and their derivative variants;
    each must vanish.
    """
    A = np.array([r / al ** 2 for r, al in zip(curve.res_Q, curve.alpha)])
    f1, f2 = f_coefficients(curve, jet.x, jet.y)
    p, px, py = jet.phi, jet.phi_x, jet.phi_y
    sums = np.array([
        np.sum(p * np.conj(p) * A) + curve.d ** 2 * curve.res_r,
        np.sum(p * np.conj(px) * A),
        np.sum(p * np.conj(py) * A),
        np.sum(px * np.conj(py) * A),
        np.sum(px * np.conj(px) * A) + f1 ** 2 * curve.c1_exp,
        np.sum(py * np.conj(py) * A) + f2 ** 2 * curve.c2_exp,
    ])
    return np.abs(sums)


def gauss_curvature(field: MetricField, x: float, y: float, h: float = 1e-4) -> float:
    """K = -(1/(2 sqrt(EG))) (d/dx (G_x/sqrt(EG)) + d/dy (E_y/sqrt(EG))).

    The outer derivatives are central differences with step h; the inner
    first derivatives G_x, E_y use the field's closed forms when registered
    and nested central differences otherwise.
    """
    def eg(xx, yy):
        E = field.E(xx, yy)
        G = field.G(xx, yy)
        if E <= 0.0 or G <= 0.0:
            raise ValueError(f"metric not positive at ({xx}, {yy}): E={E}, G={G}")
        return E, G

    def p_term(xx, yy):
        E, G = eg(xx, yy)
        if field.G_x is not None:
            gx = field.G_x(xx, yy)
        else:
            gx = (field.G(xx + h, yy) - field.G(xx - h, yy)) / (2.0 * h)
        return gx / math.sqrt(E * G)

    def s_term(xx, yy):
        E, G = eg(xx, yy)
        if field.E_y is not None:
            ey = field.E_y(xx, yy)
        else:
            ey = (field.E(xx, yy + h) - field.E(xx, yy - h)) / (2.0 * h)
        return ey / math.sqrt(E * G)

    E, G = eg(x, y)
    dp = (p_term(x + h, y) - p_term(x - h, y)) / (2.0 * h)
    ds = (s_term(x, y + h) - s_term(x, y - h)) / (2.0 * h)
    return float(-(dp + ds) / (2.0 * math.sqrt(E * G)))
