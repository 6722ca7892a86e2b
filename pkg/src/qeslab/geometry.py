"""Metric, gauge field, and potential of a second-order plane operator.

A Hamiltonian enters in the convention where minus the operator has the
positive leading symbol on the physical domain, i.e. writing

    H = -(gxx*Dxx + 2*gxy*Dxy + gyy*Dyy) + c_x*Dx + c_y*Dy + c0,

the symmetric polynomial matrix (gxx, gxy, gyy) is the inverse metric.
Its determinant cuts out the domain boundary.

The gauge field returned here is the logarithmic gradient of the scalar
gauge factor: the factor u with H = u o (Laplace-type operator) o u^{-1}
satisfies d(log u) = A.  When A is curl-free (the closure condition) the
factor exists and the operator admits a Schrodinger reduction; closure is
also the necessary condition for hermiticity.  All identities here are
verified in exact rational-function arithmetic, never numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .poly import MultiPoly, RatFun
from .operators import DiffOp


class NotSecondOrderError(ValueError):
    pass


class SingularMetricError(ValueError):
    pass


@dataclass(frozen=True)
class InverseMetric:
    """Symmetric 2x2 polynomial matrix (upper triangle stored)."""

    gxx: MultiPoly
    gxy: MultiPoly
    gyy: MultiPoly

    def det(self) -> MultiPoly:
        return self.gxx * self.gyy - self.gxy * self.gxy

    def scaled(self, c: Fraction) -> "InverseMetric":
        return InverseMetric(self.gxx * c, self.gxy * c, self.gyy * c)


@dataclass(frozen=True)
class GaugeField:
    """Covariant components (A_x, A_y) as exact rational functions."""

    a_x: RatFun
    a_y: RatFun


@dataclass(frozen=True)
class PotentialV:
    v: RatFun


def extract_metric(op: DiffOp) -> InverseMetric:
    """Read the inverse metric off the second-order part of -op.

    The mixed entry is HALF the Dxy coefficient, so that the leading
    symbol is gxx*p^2 + 2*gxy*p*q + gyy*q^2.
    """
    if op.order() != 2:
        raise NotSecondOrderError(f"operator order {op.order()}, expected 2")
    bad = [idx for idx in op.terms
           if sum(idx) == 2 and any(v not in ("x", "y") for v, k in
                                    zip(op.vars, idx) if k)]
    if bad:
        raise NotSecondOrderError("second-order part involves variables "
                                  "other than x, y")
    gxx = -op.coefficient(x=2)
    gyy = -op.coefficient(y=2)
    gxy = -op.coefficient(x=1, y=1) * Fraction(1, 2)
    vs = ("x", "y")
    return InverseMetric(gxx.on_vars(vs), gxy.on_vars(vs), gyy.on_vars(vs))


def det_metric(g: InverseMetric) -> MultiPoly:
    return g.det()


def first_order_coeffs(op: DiffOp) -> tuple:
    """Coefficients (c_x, c_y) of Dx and Dy in the operator itself."""
    vs = ("x", "y")
    return (op.coefficient(x=1).on_vars(vs), op.coefficient(y=1).on_vars(vs))


def gauge_field(op: DiffOp, g: InverseMetric | None = None) -> GaugeField:
    """Logarithmic gradient of the gauge factor of ``op``.

    With op = -g^{uv} d_u d_v + c^l d_l + c0 the contravariant components
    are A^l = -(c^l + d_u g^{ul} - g^{ul} d_u(det)/(2 det)) / 2, and the
    covariant ones follow by lowering with the adjugate over the
    determinant.  Equivalently d(log u) = A for the gauge factor u; for
    example op = -Dxx - Dyy + 2*a*Dx has u = exp(-a*x) and A_x = -a.
    """
    if g is None:
        g = extract_metric(op)
    det = g.det()
    if det.is_zero():
        raise SingularMetricError("inverse metric determinant is identically zero")
    cx, cy = first_order_coeffs(op)
    two_det = RatFun(det * 2)
    dxdet = det.diff("x")
    dydet = det.diff("y")
    # contravariant components of -2A
    m2a_up_x = (RatFun(cx + g.gxx.diff("x") + g.gxy.diff("y"))
                - RatFun(g.gxx * dxdet + g.gxy * dydet) / two_det)
    m2a_up_y = (RatFun(cy + g.gxy.diff("x") + g.gyy.diff("y"))
                - RatFun(g.gxy * dxdet + g.gyy * dydet) / two_det)
    # lower the index with the adjugate / det, and divide by -2
    minus_half = Fraction(-1, 2)
    det_rf = RatFun(det)
    a_x = (RatFun(g.gyy) * m2a_up_x - RatFun(g.gxy) * m2a_up_y) / det_rf * minus_half
    a_y = (RatFun(g.gxx) * m2a_up_y - RatFun(g.gxy) * m2a_up_x) / det_rf * minus_half
    return GaugeField(a_x, a_y)


def closure_check(a: GaugeField) -> bool:
    """Exact curl test d_x A_y - d_y A_x == 0."""
    return (a.a_y.diff("x") - a.a_x.diff("y")).is_zero()


def potential(g: InverseMetric, a: GaugeField) -> PotentialV:
    """Gauge contribution to the potential: g^{uv} A_u A_v + div A.

    div A = d_u A^u - A^u d_u(det)/(2 det) is the metric divergence with
    A^u = g^{uv} A_v.  In the log-gradient convention used by
    ``gauge_field`` the divergence enters with a plus sign; substituting
    A -> -A recovers the familiar quadratic-minus-divergence form.
    """
    det = g.det()
    if det.is_zero():
        raise SingularMetricError("inverse metric determinant is identically zero")
    a_up_x = RatFun(g.gxx) * a.a_x + RatFun(g.gxy) * a.a_y
    a_up_y = RatFun(g.gxy) * a.a_x + RatFun(g.gyy) * a.a_y
    quad = a_up_x * a.a_x + a_up_y * a.a_y
    two_det = RatFun(det * 2)
    div = (a_up_x.diff("x") + a_up_y.diff("y")
           - (a_up_x * RatFun(det.diff("x")) + a_up_y * RatFun(det.diff("y"))) / two_det)
    return PotentialV(quad + div)


def schrodinger_potential(op: DiffOp) -> PotentialV:
    """Full potential of the gauge-reduced operator: gauge part + zeroth order.

    With u the gauge factor (d log u = gauge_field(op)), the conjugated
    operator u o op o u^{-1} is minus the metric Laplacian plus this
    scalar; verified numerically by the finite-difference suite.
    """
    g = extract_metric(op)
    a = gauge_field(op, g)
    c0 = op.coefficient().on_vars(("x", "y"))
    return PotentialV(potential(g, a).v + RatFun(c0))


def gauge_factor_check(a: GaugeField, prefactor_log_grad: tuple) -> bool:
    """True iff the supplied (d_x log u, d_y log u) equals the gauge field."""
    gx, gy = prefactor_log_grad
    return a.a_x.equal(gx) and a.a_y.equal(gy)
