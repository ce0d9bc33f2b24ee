"""Local geometry of the support surface and the prescribed vector field.

The support surface is a graph ``p3 = psi(p1, p2)`` over a disc of radius
``r``, with edge curve ``p2 = gamma(p1)``.  Both functions are polynomials in
normalized coordinates: value and first derivatives vanish at the origin.
The vector field ``Q`` is polynomial as well, so its divergence (and hence
the prescribed mean curvature ``H = div(Q)/2``) is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.stats import qmc

from .errors import NormalizationError, OutOfChartError, TransversalityError
from .poly import Poly1, Poly2, Poly3

NORMALIZATION_TOL = 1e-12


# ---------------------------------------------------------------------------
# support chart
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportChart:
    """Graph chart of the support surface near an edge point.

    ``psi`` is the height function over the parameter disc of radius ``r``;
    ``gamma`` describes the edge curve ``p2 = gamma(p1)``.  Construction
    checks the normalization (zero value and gradient of ``psi`` at the
    origin, zero value and slope of ``gamma``) unless ``validate=False``,
    which exists for deliberately un-normalized test data.
    """

    psi: Poly2
    gamma: Poly1
    r: float
    holder_grade: float | None = None
    validate: bool = True

    def __post_init__(self):
        if not self.r > 0:
            raise NormalizationError(f"chart radius must be positive, got r={self.r}")
        if self.holder_grade is not None and not 0 < self.holder_grade < 1:
            raise NormalizationError(f"holder_grade must lie in (0,1), got {self.holder_grade}")
        if self.validate:
            checks = {
                "gamma(0) = 0": float(self.gamma(0.0)),
                "gamma'(0) = 0": float(self.gamma.deriv()(0.0)),
                "psi(0,0) = 0": float(self.psi(0.0, 0.0)),
                "psi_p1(0,0) = 0": float(self.psi.deriv(dx=1)(0.0, 0.0)),
                "psi_p2(0,0) = 0": float(self.psi.deriv(dy=1)(0.0, 0.0)),
            }
            for name, val in checks.items():
                if abs(val) > NORMALIZATION_TOL:
                    raise NormalizationError(
                        f"chart is not normalized: {name} violated (value {val:.3e})"
                    )

    # -- broadcasting-friendly raw evaluations (no domain checks) ----------

    def psi_val(self, p1, p2):
        return self.psi(p1, p2)

    def psi_grad(self, p1, p2):
        return self.psi.deriv(dx=1)(p1, p2), self.psi.deriv(dy=1)(p1, p2)

    def psi_hess(self, p1, p2):
        return (
            self.psi.deriv(dx=2)(p1, p2),
            self.psi.deriv(dx=1, dy=1)(p1, p2),
            self.psi.deriv(dy=2)(p1, p2),
        )

    def gamma_val(self, s):
        return self.gamma(s)

    def gamma_d1(self, s):
        return self.gamma.deriv(1)(s)

    def gamma_d2(self, s):
        return self.gamma.deriv(2)(s)

    def contains(self, p1, p2, tol: float = 1e-12) -> bool:
        return bool(np.all(np.asarray(p1) ** 2 + np.asarray(p2) ** 2 <= self.r**2 * (1 + tol)))

    def require_inside(self, p1, p2):
        if not self.contains(p1, p2):
            raise OutOfChartError(
                f"point ({np.max(p1)}, {np.max(p2)}) outside chart disc of radius {self.r}"
            )


def flat_chart(r: float = 1.0) -> SupportChart:
    return SupportChart(psi=Poly2.zero(), gamma=Poly1.zero(), r=r)


# ---------------------------------------------------------------------------
# vector field Q
# ---------------------------------------------------------------------------

def _poly3_sum(polys) -> Poly3:
    shapes = np.array([p.coeffs.shape for p in polys])
    out = np.zeros(shapes.max(axis=0))
    for p in polys:
        c = p.coeffs
        out[: c.shape[0], : c.shape[1], : c.shape[2]] += c
    return Poly3(out)


@dataclass(frozen=True)
class FieldQ:
    """Polynomial vector field with symbolically derived divergence.

    The prescribed mean curvature is ``H = div(Q) / 2``; because the
    components are polynomials the divergence is computed on coefficients,
    so ``H - div(Q)/2 = 0`` holds to machine precision by construction.
    """

    components: tuple[Poly3, Poly3, Poly3]
    holder_grade: float | None = None
    div: Poly3 = field(init=False)

    def __post_init__(self):
        q1, q2, q3 = self.components
        object.__setattr__(
            self, "div", _poly3_sum([q1.deriv(0), q2.deriv(1), q3.deriv(2)])
        )

    def __call__(self, p):
        """Evaluate Q at points of shape (..., 3); returns shape (..., 3)."""
        p = np.asarray(p, dtype=float)
        vals = [c(p[..., 0], p[..., 1], p[..., 2]) for c in self.components]
        return np.stack(np.broadcast_arrays(*vals), axis=-1)

    def div_at(self, p):
        p = np.asarray(p, dtype=float)
        return self.div(p[..., 0], p[..., 1], p[..., 2])

    def mean_curvature(self, p):
        return 0.5 * self.div_at(p)

    def jacobian(self, p):
        """d(Q_i)/d(p_j) at points of shape (..., 3); returns (..., 3, 3)."""
        p = np.asarray(p, dtype=float)
        rows = []
        for c in self.components:
            row = [c.deriv(ax)(p[..., 0], p[..., 1], p[..., 2]) for ax in range(3)]
            rows.append(np.stack(np.broadcast_arrays(*row), axis=-1))
        return np.stack(rows, axis=-2)


def zero_field() -> FieldQ:
    return FieldQ((Poly3.zero(), Poly3.zero(), Poly3.zero()))


def constant_field(v) -> FieldQ:
    comps = []
    for vi in v:
        c = np.zeros((1, 1, 1))
        c[0, 0, 0] = vi
        comps.append(Poly3(c))
    return FieldQ(tuple(comps))


# ---------------------------------------------------------------------------
# pointwise operations
# ---------------------------------------------------------------------------

def eval_chart(chart: SupportChart, p1: float, p2: float):
    """Value, gradient and Hessian of the chart height function at a point."""
    chart.require_inside(p1, p2)
    val = float(chart.psi_val(p1, p2))
    g1, g2 = chart.psi_grad(p1, p2)
    h11, h12, h22 = chart.psi_hess(p1, p2)
    grad = np.array([g1, g2], dtype=float)
    hess = np.array([[h11, h12], [h12, h22]], dtype=float)
    return val, grad, hess


def eval_gamma(chart: SupportChart, s: float):
    """Value and first two derivatives of the edge curve at parameter s."""
    if abs(s) > chart.r * (1 + 1e-12):
        raise OutOfChartError(f"edge parameter s={s} outside [-r, r] with r={chart.r}")
    return float(chart.gamma_val(s)), float(chart.gamma_d1(s)), float(chart.gamma_d2(s))


def coupling_q(chart: SupportChart, fieldq: FieldQ, p):
    """Coupling scalar q = Q3 - psi_p1*Q1 - psi_p2*Q2, broadcasting over p.

    No chart-disc check; use :func:`eval_q` for the checked scalar form.
    """
    p = np.asarray(p, dtype=float)
    qv = fieldq(p)
    g1, g2 = chart.psi_grad(p[..., 0], p[..., 1])
    return qv[..., 2] - g1 * qv[..., 0] - g2 * qv[..., 1]


def eval_q(chart: SupportChart, fieldq: FieldQ, p) -> float:
    p = np.asarray(p, dtype=float)
    chart.require_inside(p[..., 0], p[..., 1])
    return float(coupling_q(chart, fieldq, p))


def unit_normal(chart: SupportChart, p1, p2):
    """Upward unit normal of the graph at (p1, p2); broadcasts over arrays."""
    g1, g2 = chart.psi_grad(p1, p2)
    g1, g2 = np.broadcast_arrays(g1, g2)
    denom = np.sqrt(1.0 + g1**2 + g2**2)
    return np.stack([-g1 / denom, -g2 / denom, np.ones_like(denom) / denom], axis=-1)


# ---------------------------------------------------------------------------
# transversality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransversalityReport:
    """Sampled supremum of |q| over the chart ball and the admissibility flag."""

    q0: float
    sample_count: int
    admissible: bool
    argmax: np.ndarray

    def __post_init__(self):
        if self.q0 < 0:
            raise TransversalityError("q0 must be nonnegative")


def ball_sample(radius: float, n: int) -> np.ndarray:
    """Deterministic low-discrepancy sample of the closed ball of given radius."""
    h = qmc.Halton(d=3, scramble=False)
    u = h.random(n)
    rho = radius * np.cbrt(u[:, 0])
    cz = 1.0 - 2.0 * u[:, 1]
    phi = 2.0 * np.pi * u[:, 2]
    s = np.sqrt(np.maximum(0.0, 1.0 - cz**2))
    pts = np.column_stack([rho * s * np.cos(phi), rho * s * np.sin(phi), rho * cz])
    pts[0] = 0.0  # Halton's first point is the origin anyway; pin it exactly
    return pts


def validate_transversality(
    chart: SupportChart, fieldq: FieldQ, samples: int = 4096
) -> TransversalityReport:
    """Estimate q0 = sup |q| over the chart ball on a deterministic sample."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pts = ball_sample(chart.r, samples)
    qv = np.abs(coupling_q(chart, fieldq, pts))
    k = int(np.argmax(qv))
    q0 = float(qv[k])
    return TransversalityReport(
        q0=q0, sample_count=samples, admissible=q0 < 1.0, argmax=pts[k]
    )


# ---------------------------------------------------------------------------
# chart normalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RigidFrame:
    """Rigid motion between raw coordinates and normalized chart coordinates."""

    rotation: np.ndarray   # (3, 3), rows are the chart axes in raw coordinates
    origin: np.ndarray     # basepoint in raw coordinates

    def to_chart(self, p):
        p = np.asarray(p, dtype=float)
        return (p - self.origin) @ self.rotation.T

    def to_raw(self, y):
        y = np.asarray(y, dtype=float)
        return y @ self.rotation + self.origin

    @property
    def is_identity(self) -> bool:
        return bool(
            np.allclose(self.rotation, np.eye(3), atol=1e-12)
            and np.allclose(self.origin, 0.0, atol=1e-12)
        )


@dataclass(frozen=True)
class RawGraph:
    """Un-normalized graph data: p3 = psi(p1, p2) with edge p2 = gamma(p1)."""

    psi: Poly2
    gamma: Poly1
    r: float


def _fit_poly2(x, y, z, degree: int, scale: float) -> Poly2:
    vand = P.polyvander2d(x / scale, y / scale, [degree, degree])
    sol, *_ = np.linalg.lstsq(vand, z, rcond=None)
    c = sol.reshape(degree + 1, degree + 1)
    div = scale ** (np.arange(degree + 1)[:, None] + np.arange(degree + 1)[None, :])
    return Poly2(c / div)


def _fit_poly1(x, y, degree: int, scale: float) -> Poly1:
    vand = P.polyvander(x / scale, degree)
    sol, *_ = np.linalg.lstsq(vand, y, rcond=None)
    return Poly1(sol / scale ** np.arange(degree + 1))


def normalize_chart(
    raw: RawGraph,
    basepoint,
    radius: float | None = None,
    fit_degree: int = 12,
    residual_tol: float = 1e-10,
):
    """Rotate/translate raw graph data into a normalized chart.

    The frame sends the basepoint to the origin, the edge tangent to the
    first axis and the surface normal to the third axis.  The rotated
    surface and edge are re-expanded as polynomials by least squares; the
    fit residual is verified against ``residual_tol`` on held-out samples.
    """
    x0 = np.asarray(basepoint, dtype=float)
    b1, b2 = x0[0], x0[1]
    if abs(b2 - raw.gamma(b1)) > 1e-9 or abs(x0[2] - raw.psi(b1, b2)) > 1e-9:
        raise NormalizationError("basepoint does not lie on the raw surface edge")

    g1 = float(raw.psi.deriv(dx=1)(b1, b2))
    g2 = float(raw.psi.deriv(dy=1)(b1, b2))
    gd = float(raw.gamma.deriv()(b1))

    tangent = np.array([1.0, gd, g1 + g2 * gd])
    normal = np.array([-g1, -g2, 1.0])
    if np.linalg.norm(np.cross(tangent, normal)) < 1e-10:
        raise NormalizationError("degenerate tangent data: rank-deficient frame")
    e1 = tangent / np.linalg.norm(tangent)
    e3 = normal / np.linalg.norm(normal)
    e2 = np.cross(e3, e1)
    interior = np.array([-gd, 1.0, g2 - gd * g1])
    if float(e2 @ interior) < 0.0:
        e1, e2 = -e1, -e2
    frame = RigidFrame(rotation=np.vstack([e1, e2, e3]), origin=x0)

    r_new = radius if radius is not None else 0.3 * raw.r
    if not 0 < r_new:
        raise ValueError("radius must be positive")

    # surface fit: push raw graph samples through the frame, regress y3 on (y1, y2)
    n_grid = 2 * (fit_degree + 1) + 8
    tt = np.linspace(-2.0 * r_new, 2.0 * r_new, n_grid)
    t1, t2 = np.meshgrid(b1 + tt, b2 + tt, indexing="ij")
    t1, t2 = t1.ravel(), t2.ravel()
    pts = np.column_stack([t1, t2, raw.psi(t1, t2)])
    y = frame.to_chart(pts)
    keep = y[:, 0] ** 2 + y[:, 1] ** 2 <= (1.2 * r_new) ** 2
    if keep.sum() < (fit_degree + 1) ** 2:
        raise NormalizationError("not enough surface samples inside the target chart disc")
    psi_fit = _fit_poly2(y[keep, 0], y[keep, 1], y[keep, 2], fit_degree, r_new)
    c = psi_fit.coeffs.copy()
    c[0, 0] = 0.0
    c[1, 0] = 0.0
    c[0, 1] = 0.0
    psi_fit = Poly2(c)

    # edge fit: the rotated edge curve as a graph y2 = gamma(y1)
    ss = b1 + np.linspace(-2.0 * r_new, 2.0 * r_new, 4 * n_grid)
    edge = np.column_stack([ss, raw.gamma(ss), raw.psi(ss, raw.gamma(ss))])
    ye = frame.to_chart(edge)
    keep_e = np.abs(ye[:, 0]) <= 1.2 * r_new
    if keep_e.sum() < fit_degree + 1:
        raise NormalizationError("not enough edge samples inside the target chart disc")
    gamma_fit = _fit_poly1(ye[keep_e, 0], ye[keep_e, 1], fit_degree, r_new)
    cg = gamma_fit.coeffs.copy()
    cg[0] = 0.0
    cg[1] = 0.0
    gamma_fit = Poly1(cg)

    chart = SupportChart(psi=psi_fit, gamma=gamma_fit, r=r_new)

    # round-trip verification on held-out surface and edge samples
    th = np.linspace(0.0, 2.0 * np.pi, 37)[:-1]
    rr = np.linspace(0.05, 0.95, 12)[:, None] * r_new
    yy1 = (rr * np.cos(th)).ravel()
    yy2 = (rr * np.sin(th)).ravel()
    back = frame.to_raw(np.column_stack([yy1, yy2, psi_fit(yy1, yy2)]))
    res_surf = np.max(np.abs(back[:, 2] - raw.psi(back[:, 0], back[:, 1])))
    se = np.linspace(-0.95 * r_new, 0.95 * r_new, 41)
    back_e = frame.to_raw(np.column_stack([se, gamma_fit(se), psi_fit(se, gamma_fit(se))]))
    res_edge = np.max(np.abs(back_e[:, 1] - raw.gamma(back_e[:, 0])))
    if max(res_surf, res_edge) > residual_tol:
        raise NormalizationError(
            "normalization failed: polynomial re-expansion residual "
            f"{max(res_surf, res_edge):.3e} exceeds {residual_tol:.1e} "
            "(surface too curved for the requested radius/degree)"
        )
    return chart, frame
