"""Metric classification predicates and the consolidated identity suites.

Residuals are normalized by 1 + (largest curvature magnitude at the point),
so thresholds behave uniformly across metrics of very different scale.  A
flag is true when the worst normalized residual over the sampled points
stays below the tolerance; the report keeps the worst point per flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chern import (
    chern_at,
    ddbar_omega_form,
    delbar_eta_residual,
    kahler_like_residual,
)
from .levicivita import riemann_at

DEFAULT_TOL = 1e-7

FLAG_NAMES = (
    "kahler",
    "balanced",
    "kahler_like",
    "g_kahler_like",
    "pluriclosed",
    "hermitian_flat",
)

# flags implied by the kahler flag; hermitian_flat is genuinely independent
# (a Kahler metric of nonzero curvature is not Hermitian flat)
KAHLER_IMPLIES = ("balanced", "kahler_like", "g_kahler_like", "pluriclosed")


@dataclass
class FlagResult:
    value: bool
    residual: float
    worst_point: np.ndarray


@dataclass
class ClassificationReport:
    metric_name: str
    tolerance: float
    points: list
    flags: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.flags[name]

    def as_dict(self):
        return {
            "metric": self.metric_name,
            "tolerance": self.tolerance,
            "points": len(self.points),
            "flags": {
                k: {
                    "value": bool(v.value),
                    "residual": float(v.residual),
                    "worst_point": [ [float(z.real), float(z.imag)] for z in v.worst_point ],
                }
                for k, v in sorted(self.flags.items())
            },
        }


def curvature_scale(ch, rd):
    return 1.0 + max(float(np.max(np.abs(ch.Rh))), float(np.max(np.abs(rd.Rc))))


def flag_residuals_at(ch, rd):
    """Raw (unnormalized) flag residuals at one point."""
    scale = curvature_scale(ch, rd)
    ddbar = ddbar_omega_form(ch).max_abs()
    return {
        "kahler": float(np.max(np.abs(ch.T))) if ch.T.size else 0.0,
        "balanced": float(np.max(np.abs(ch.eta))),
        "kahler_like": kahler_like_residual(ch) / scale,
        "g_kahler_like": rd.theta2_norm() / scale,
        "pluriclosed": ddbar / scale,
        "hermitian_flat": float(np.max(np.abs(ch.Rh))) / (1.0 + float(np.max(np.abs(ch.T)))),
    }


def classify_at(metric, points, tol=DEFAULT_TOL, cache=None):
    """Classify a metric over a nonempty list of points."""
    points = [np.asarray(p, dtype=complex) for p in points]
    if not points:
        raise ValueError("classification needs at least one point")
    worst = {name: (-1.0, None) for name in FLAG_NAMES}
    for p in points:
        if cache is not None:
            ch, rd = cache(metric, p)
        else:
            ch = chern_at(metric, p)
            rd = riemann_at(metric, p, chern_data=ch)
        for name, res in flag_residuals_at(ch, rd).items():
            if res > worst[name][0]:
                worst[name] = (res, p)
    report = ClassificationReport(metric.name, tol, points)
    for name in FLAG_NAMES:
        res, p = worst[name]
        report.flags[name] = FlagResult(res < tol, res, p)
    return report


# ----------------------------------------------------------------------
# curvature-torsion difference identities (two independent routes per side)
def curvature_difference_suite(rd):
    """Residuals of the four curvature difference identities at a point.

    Each left side comes from the Christoffel route (or the Chern-curvature
    transform for the first), each right side from torsion data and its
    covariant derivatives; the routes never share intermediate results.
    """
    ch = rd.chern
    n = ch.n
    T, cT, cTb, Rh, Rc = ch.T, ch.covT, ch.covT_bar, ch.Rh, rd.Rc
    scale = curvature_scale(ch, rd)

    res = {}
    lhs = 2 * cTb
    rhs = np.einsum("jlik->kijl", Rh) - np.einsum("iljk->kijl", Rh)
    res["covT_vs_chern"] = float(np.max(np.abs(lhs - rhs))) / scale

    lhs = Rc[:n, :n, :n, n:]
    rhs = (
        np.einsum("lijk->ijkl", cT)
        + np.einsum("lri,rjk->ijkl", T, T)
        - np.einsum("lrj,rik->ijkl", T, T)
    )
    res["mixed_20"] = float(np.max(np.abs(lhs - rhs))) / scale

    lhs = Rc[:n, :n, n:, n:]
    rhs = (
        np.einsum("lijk->ijkl", cTb)
        - np.einsum("kijl->ijkl", cTb)
        + 2 * np.einsum("rij,rkl->ijkl", T, np.conj(T))
        + np.einsum("kri,jrl->ijkl", T, np.conj(T))
        + np.einsum("lrj,irk->ijkl", T, np.conj(T))
        - np.einsum("lri,jrk->ijkl", T, np.conj(T))
        - np.einsum("krj,irl->ijkl", T, np.conj(T))
    )
    res["mixed_02"] = float(np.max(np.abs(lhs - rhs))) / scale

    lhs = Rc[:n, n:, :n, n:]
    rhs = (
        Rh
        - np.einsum("jikl->klij", cTb)
        - np.conj(np.einsum("ijlk->klij", cTb))
        + np.einsum("rik,rjl->klij", T, np.conj(T))
        - np.einsum("jrk,irl->klij", T, np.conj(T))
        - np.einsum("lri,krj->klij", T, np.conj(T))
    )
    res["riemann_vs_chern"] = float(np.max(np.abs(lhs - rhs))) / scale
    return res


# ----------------------------------------------------------------------
# quadratic torsion identities valid on doubly curvature-symmetric metrics
def bothlike_residuals(T, covT=None, covT_bar=None):
    """Residuals of the torsion identities that characterize metrics whose
    Chern and Riemannian curvatures both have full Kahler symmetry.

    Returns raw residuals; on metrics NOT flagged both ways these are
    reported but must not be asserted.
    """
    T = np.asarray(T, dtype=complex)
    cjT = np.conj(T)
    res = {}

    lhs = 2 * np.einsum("rij,rkl->ijkl", T, cjT)
    rhs = (
        np.einsum("lri,jrk->ijkl", T, cjT)
        + np.einsum("krj,irl->ijkl", T, cjT)
        - np.einsum("kri,jrl->ijkl", T, cjT)
        - np.einsum("lrj,irk->ijkl", T, cjT)
    )
    res["quad_full"] = float(np.max(np.abs(lhs - rhs)))

    lhs = np.einsum("rik,rjl->ikjl", T, cjT)
    rhs = np.einsum("jrk,irl->ikjl", T, cjT) + np.einsum("lri,krj->ikjl", T, cjT)
    res["quad_equal_curvature"] = float(np.max(np.abs(lhs - rhs)))

    lhs = 2 * np.einsum("rij,rij->ij", T, cjT)
    rhs = (
        np.einsum("irj,irj->ij", T, cjT)
        + np.einsum("jri,jri->ij", T, cjT)
        - 2 * np.real(np.einsum("iri,jrj->ij", cjT, T))
    )
    res["quad_diag"] = float(np.max(np.abs(lhs - rhs)))

    res["trace_product"] = float(np.max(np.abs(np.einsum("sri,rsk->ik", T, T))))

    if covT_bar is not None:
        res["cov_antiholo"] = float(np.max(np.abs(covT_bar)))
    if covT is not None:
        rhs33 = -np.einsum("kri,rjl->kijl", T, T) + np.einsum("krj,ril->kijl", T, T)
        res["cov_holo"] = float(np.max(np.abs(covT - rhs33)))
        res["cov_symmetry"] = float(
            np.max(
                np.abs(
                    np.einsum("kri,rjl->kijl", T, T) - np.einsum("krj,ril->kijl", T, T)
                )
            )
        )
    return res


def eta_trace_residual(ch):
    """On G-Kahler-like metrics: sum_i eta_{i,ibar} = sum_r |eta_r|^2."""
    lhs = np.einsum("iijj->", ch.covT_bar)
    rhs = np.sum(np.abs(ch.eta) ** 2)
    return float(abs(lhs - rhs)) / (1.0 + float(abs(rhs)))


def klike_sigma_residual(ch):
    """On Kahler-like metrics: i del delbar omega = sigma."""
    lhs = ddbar_omega_form(ch)
    rhs = ch.sigma_form()
    return (lhs - rhs).max_abs() / (1.0 + float(np.max(np.abs(ch.Rh))))


def holomorphic_eta_residual(ch):
    """On Kahler-like metrics the torsion 1-form is holomorphic."""
    return delbar_eta_residual(ch) / (1.0 + float(np.max(np.abs(ch.Rh))))
