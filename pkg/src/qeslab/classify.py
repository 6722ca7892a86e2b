"""Hermiticity and normalizability analysis with exact thresholds.

All decisions reduce to exact rational comparisons on the gauge-factor
exponents:

* a boundary piece admits the hermiticity flux condition iff the
  explicit exponent on it exceeds 1/2 (strictly);
* the squared weight is locally integrable across a boundary iff twice
  the explicit exponent exceeds -1 (strictly);
* along each unbounded coordinate direction the squared weight must
  decay faster than the -1 power, unless a certified-negative
  exponential dominates.

The determinant quarter-power cancels against the volume element in the
squared weight, so only explicit exponents matter here; reports also
carry the effective exponent (explicit plus a quarter of the
determinant's vanishing order) for reference.  Directions whose sign
analysis cannot be certified are reported as inconclusive rather than
guessed.  A floating-point quadrature trend over nested truncations
cross-checks every decided verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .poly import MultiPoly, rat_str
from .operators import DiffOp
from . import geometry
from .domains import DomainSpec, UnmatchedBoundaryError
from .families import (FamilyInstance, Prefactor, build_h2, prefactor_of,
                       DET_POWER)
from .spaces import (SpectralPattern, matrix_of, eigenvalues, space_fmn,
                     space_rect)

HERMITICITY_THRESHOLD = Fraction(1, 2)
INTEGRABILITY_THRESHOLD = Fraction(-1, 2)

_Y = MultiPoly.var("y")
_Z = MultiPoly.var("z")


@dataclass(frozen=True)
class BoundaryCheck:
    name: str                      # e.g. "curve x = y + 1" or "edge y = 0"
    base: MultiPoly                # polynomial vanishing on the boundary
    explicit_exponent: Fraction
    det_order: int
    hermitian_ok: bool             # explicit > 1/2
    integrable_ok: bool            # 2*explicit > -1

    def effective_exponent(self) -> Fraction:
        return self.explicit_exponent + DET_POWER * self.det_order


@dataclass(frozen=True)
class DirectionCheck:
    direction: str                 # "x+", "x-", "y+", "y-"
    method: str                    # "power", "exponential", "strip-power", ...
    exponent: Fraction | None      # squared-weight power at Pol degree 0
    degree_growth: int             # added squared exponent per unit Pol degree
    exp_sign: int | None           # certified sign of the dominant exponential
    status: str                    # "pass", "fail", "inconclusive"

    def max_degree(self) -> int | None:
        """Largest Pol total degree keeping this direction integrable."""
        if self.status == "fail":
            return -1
        if self.method.endswith("exponential") and self.exp_sign == -1:
            return None
        if self.exponent is None:
            return None
        best = -1
        d = 0
        while self.exponent + self.degree_growth * d < -1:
            best = d
            d += 1
        return best


@dataclass(frozen=True)
class NormReport:
    verdict: str                   # "Normalizable" | "Divergent" | "Inconclusive"
    boundary_conditions: tuple
    asymptotic_conditions: tuple
    max_pol_degree: int | None     # None = unconstrained

    def boundary_all_integrable(self) -> bool:
        return all(b.integrable_ok for b in self.boundary_conditions)


@dataclass(frozen=True)
class QuadratureTrend:
    trend: str                     # "converging" | "diverging" | "inconclusive"
    values: tuple
    ratios: tuple
    failure: str | None = None


@dataclass(frozen=True)
class Verdict:
    outcome: str                   # HermitianQES | PseudoHermitianCandidate |
    #                                NotQES | ExactlySolvableBoundedRegion |
    #                                Inconclusive
    closure_ok: bool
    hermiticity: tuple
    norm_report: NormReport
    spectral: SpectralPattern | None = None
    quadrature: QuadratureTrend | None = None


# -- boundary analysis --------------------------------------------------------


def _det_order(det: MultiPoly, base: MultiPoly) -> int:
    order = 0
    current = det
    while True:
        q = current.divide_exact(base)
        if q is None:
            return order
        order += 1
        current = q


def boundary_checks(pre: Prefactor, domain: DomainSpec) -> list:
    """Per-boundary exponents: domain curves plus finite y edges.

    Raises UnmatchedBoundaryError when a domain curve is not a factor of
    the determinant carried by the prefactor.
    """
    checks = []
    for curve in domain.curves:
        base = curve.base()
        order = _det_order(pre.det, base)
        if order == 0:
            raise UnmatchedBoundaryError(
                f"boundary x = {curve.xi.to_text()} does not lie on the "
                "determinant zero set")
        e = pre.explicit_exponent_on(base)
        checks.append(BoundaryCheck(
            name=f"curve x = {curve.xi.to_text()}", base=base,
            explicit_exponent=e, det_order=order,
            hermitian_ok=e > HERMITICITY_THRESHOLD,
            integrable_ok=e > INTEGRABILITY_THRESHOLD))
    for y0 in domain.y_edges():
        base = (_Y - MultiPoly.const(y0)).on_vars(("y",))
        order = _det_order(pre.det, base.on_vars(("x", "y")))
        e = pre.explicit_exponent_on(base)
        checks.append(BoundaryCheck(
            name=f"edge y = {rat_str(y0)}", base=base,
            explicit_exponent=e, det_order=order,
            hermitian_ok=e > HERMITICITY_THRESHOLD,
            integrable_ok=e > INTEGRABILITY_THRESHOLD))
    return checks


def hermiticity_check(pre: Prefactor, domain: DomainSpec) -> list:
    """Boundary flux test: pass iff every explicit exponent exceeds 1/2."""
    return boundary_checks(pre, domain)


# -- directional decay analysis -------------------------------------------------


def _sign_on_interval(p: MultiPoly, lo: Fraction | None, hi: Fraction | None):
    """Certified sign of a univariate polynomial on an open interval.

    Returns +1, -1, 0 (identically zero), or None when no certificate is
    found.  The certificates are: constant polynomials; two samples of
    opposite sign (certifies 'mixed', reported as None); and all-one-sign
    coefficients after an affine substitution mapping the interval onto
    (0, inf) or (0, 1).
    """
    p = p.compact()
    if p.is_zero():
        return 0
    if p.total_degree() == 0:
        return 1 if p.constant_term() > 0 else -1
    if len(p.vars) != 1:
        return None  # multivariate coefficient: no certificate attempted
    var = p.vars[0]
    # sample a handful of rational points for a quick 'mixed' certificate
    pts: list = []
    if lo is not None and hi is not None:
        span = hi - lo
        pts = [lo + span * Fraction(k, 8) for k in range(1, 8)]
    elif lo is not None:
        pts = [lo + Fraction(k, 2) for k in (1, 2, 4, 8, 20)]
    elif hi is not None:
        pts = [hi - Fraction(k, 2) for k in (1, 2, 4, 8, 20)]
    else:
        pts = [Fraction(k) for k in (-8, -2, 0, 2, 8)]
    signs = {1 if p.eval({var: t}) > 0 else (-1 if p.eval({var: t}) < 0 else 0)
             for t in pts}
    if 1 in signs and -1 in signs:
        return None
    # coefficient certificate after mapping the interval to a normal form
    if lo is not None and hi is None:
        q = p.subst(var, MultiPoly.var(var) + MultiPoly.const(lo))
    elif hi is not None and lo is None:
        q = p.subst(var, MultiPoly.const(hi) - MultiPoly.var(var))
    elif lo is not None and hi is not None:
        q = p.subst(var, MultiPoly.const(lo)
                    + MultiPoly.var(var) * (hi - lo))
    else:
        q = None  # whole line: only even structure would certify; skip
    if q is not None and not q.is_zero():
        coeffs = list(q.terms.values())
        if all(c > 0 for c in coeffs):
            return 1
        if all(c < 0 for c in coeffs):
            return -1
        if lo is not None and hi is not None:
            # on (0,1) a positive-at-both-ends certificate is weaker; give up
            return None
    return None


def _poly_in(p: MultiPoly, var: str) -> int:
    return max(0, p.degree_in(var))


def _direction_check(pre: Prefactor, direction: str, domain: DomainSpec,
                     pol_degree: int) -> DirectionCheck:
    """Decay test along one coordinate direction.

    For directions along which the domain is a product (no curve in the
    way) the squared-weight exponent is pure power counting; when the
    domain hugs curves the bases are re-expanded in a strip coordinate
    first.  A polynomial exponential beats every power when its leading
    coefficient has a certified sign on the transverse range.
    """
    axis = direction[0]
    outward = 1 if direction[1] == "+" else -1
    strip = axis == "y" and len(domain.curves) > 0

    def strip_subst(p: MultiPoly) -> MultiPoly:
        # x -> xi_ref(y) +/- z (single curve) or xi_lo + z*(xi_hi - xi_lo)
        lo, hi = domain.lower_curve(), domain.upper_curve()
        p = p.on_vars(("x", "y")) if "x" not in p.vars else p
        if lo is not None and hi is not None:
            width = hi.xi - lo.xi
            repl = lo.xi.on_vars(("y", "z")) + MultiPoly.var("z") * width.on_vars(("y", "z"))
        elif lo is not None:
            repl = lo.xi.on_vars(("y", "z")) + MultiPoly.var("z")
        else:
            repl = hi.xi.on_vars(("y", "z")) - MultiPoly.var("z")
        return p.on_vars(("x", "y", "z")).subst("x", repl.on_vars(("x", "y", "z")))

    # transverse range for exponential sign tests
    if axis == "x":
        t_lo, t_hi = domain.y_low, domain.y_high
    else:
        t_lo, t_hi = Fraction(0), None if domain.kind != "bounded" else Fraction(1)
        if not strip:
            t_lo, t_hi = None, None  # free x slice; sign test over full line

    # exponential part
    if pre.exp_poly is not None:
        lpoly = strip_subst(pre.exp_poly) if strip else pre.exp_poly.on_vars(("x", "y"))
        deg = lpoly.degree_in(axis)
        if deg >= 1:
            lead = lpoly.coeff_of(**{axis: deg})
            flip = -1 if (outward < 0 and deg % 2 == 1) else 1
            if lead.total_degree() <= 0:
                sign = (1 if lead.constant_term() > 0 else -1) * flip
            else:
                s = _sign_on_interval(lead, t_lo, t_hi)
                sign = None if s in (None, 0) else s * flip
            method = "strip-exponential" if strip else "exponential"
            if sign == -1:
                return DirectionCheck(direction, method, None, 0, -1, "pass")
            if sign == 1:
                return DirectionCheck(direction, method, None, 0, 1, "fail")
            return DirectionCheck(direction, method, None, 0, None, "inconclusive")

    # pure power counting on the squared weight
    exponent = Fraction(0)
    for term in pre.power_terms:
        b = strip_subst(term.base) if strip else term.base.on_vars(("x", "y"))
        exponent += 2 * term.exponent * _poly_in(b, axis)
    if pre.arctan_gamma is not None:
        pass  # bounded angle factor: no growth contribution
    if strip:
        lo, hi = domain.lower_curve(), domain.upper_curve()
        if lo is not None and hi is not None:
            exponent += _poly_in((hi.xi - lo.xi), "y")  # strip width measure
        xgrow = max(_poly_in(strip_subst(MultiPoly.var("x")), "y"), 1)
    else:
        xgrow = 1
    growth = 2 * (xgrow if axis == "y" and strip else 1)
    total = exponent + growth * pol_degree
    status = "pass" if total < -1 else "fail"
    return DirectionCheck(direction, "strip-power" if strip else "power",
                          exponent, growth, None, status)


def _directions(domain: DomainSpec) -> list:
    out = []
    if domain.kind != "bounded":
        if domain.x_unbounded_above():
            out.append("x+")
        if domain.x_unbounded_below():
            out.append("x-")
        if domain.y_high is None:
            out.append("y+")
        if domain.y_low is None:
            out.append("y-")
    return out


def normalizability(pre: Prefactor, domain: DomainSpec,
                    pol_degree: int = 0) -> NormReport:
    """Exact integrability analysis of the squared weight on the domain.

    Verdict semantics: Divergent as soon as one boundary or direction
    test fails exactly; Normalizable when every test passes; otherwise
    Inconclusive (some direction could not be certified).
    """
    bchecks = tuple(boundary_checks(pre, domain))
    dchecks = tuple(_direction_check(pre, d, domain, pol_degree)
                    for d in _directions(domain))
    failed = (not all(b.integrable_ok for b in bchecks)
              or any(d.status == "fail" for d in dchecks))
    inconclusive = any(d.status == "inconclusive" for d in dchecks)
    if failed:
        verdict = "Divergent"
    elif inconclusive:
        verdict = "Inconclusive"
    else:
        verdict = "Normalizable"
    degrees = [d.max_degree() for d in dchecks]
    finite = [d for d in degrees if d is not None]
    max_deg = min(finite) if finite else None  # -1 means no degree survives
    return NormReport(verdict, bchecks, dchecks, max_deg)


def quadrature_crosscheck(pre: Prefactor, domain: DomainSpec,
                          pol: MultiPoly | None = None,
                          box: float = 5.0, offset: float = 1e-4,
                          levels: int = 3) -> QuadratureTrend:
    """Numeric oracle: squared-weight mass over nested truncations.

    Truncation k doubles the box and halves the boundary offset; the
    trend of the successive ratios decides.  Any overflow or non-finite
    value is reported as a failure with a diverging trend.
    """
    import warnings

    import numpy as np
    from scipy import integrate

    def weight(x, y):
        try:
            v = pre.weight_squared(x, y, pol)
        except OverflowError:
            return float("inf")
        return v

    values = []
    failure = None
    for k in range(levels):
        r = box * 2 ** k
        eps = offset / 2 ** k
        y_lo = float(domain.y_low) if domain.y_low is not None else -r
        y_hi = float(domain.y_high) if domain.y_high is not None else r
        y_lo += eps
        y_hi -= eps
        lo_curve, hi_curve = domain.lower_curve(), domain.upper_curve()

        def x_lo(y):
            if lo_curve is not None:
                return lo_curve.xi.eval_float({"y": y}) + eps
            return -r

        def x_hi(y):
            if hi_curve is not None:
                return hi_curve.xi.eval_float({"y": y}) - eps
            return r

        def x_hi_clip(y):
            return max(x_lo(y), min(x_hi(y), r))

        def x_lo_clip(y):
            return min(max(x_lo(y), -r), x_hi_clip(y))

        if y_hi <= y_lo:
            values.append(0.0)
            continue
        with np.errstate(over="ignore", invalid="ignore"), warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                val, _ = integrate.dblquad(weight, y_lo, y_hi,
                                           x_lo_clip, x_hi_clip,
                                           epsabs=0.0, epsrel=1e-8)
            except Exception as exc:   # quadrature breakdown: report, not fatal
                failure = f"quadrature failure at level {k}: {exc}"
                val = float("nan")
        if not (val == val) or val in (float("inf"), -float("inf")):
            failure = failure or f"non-finite integral at level {k}"
            return QuadratureTrend("diverging", tuple(values), (), failure)
        values.append(val)
    ratios = tuple(values[i + 1] / values[i] if values[i] else float("inf")
                   for i in range(len(values) - 1))
    if not ratios:
        return QuadratureTrend("inconclusive", tuple(values), (), failure)
    if all(r <= 1.0 + 1e-3 for r in ratios):
        trend = "converging"
    elif all(r >= 2.0 for r in ratios):
        trend = "diverging"
    else:
        trend = "inconclusive"
    return QuadratureTrend(trend, tuple(values), ratios, failure)


def spectral_pattern_of(inst: FamilyInstance, n: int,
                        tol: float = 1e-9) -> SpectralPattern:
    """Eigenvalue pattern of the instance on its invariant module."""
    op = build_h2(inst)
    if inst.variant == "HexExample":
        nx, ny = 2 * inst.j, 2 * inst.jt
        if nx.denominator != 1 or ny.denominator != 1:
            raise ValueError("module requires integral 2j and 2jt")
        space = space_rect(int(nx), int(ny))
    else:
        space = space_fmn(inst.m, n)
    return eigenvalues(matrix_of(op, space), tol)


def classify(inst: FamilyInstance, domain: DomainSpec, n: int = 1,
             pol_degree: int = 0, with_quadrature: bool = True,
             tol: float = 1e-9) -> Verdict:
    """Full verdict for one instance on one domain.

    Order of decision: Hermitian solvable sector requires closure, all
    hermiticity boundary exponents above 1/2, and a normalizable weight;
    a bounded domain with all boundary exponents above -1/2 is exactly
    solvable once hermiticity is waived; a normalizable weight failing
    hermiticity is the pseudo-Hermitian candidate case (spectral pattern
    attached); anything decided otherwise is not solvable this way, and
    undecided asymptotics are reported as Inconclusive.
    """
    op = build_h2(inst)
    g = geometry.extract_metric(op)
    gauge = geometry.gauge_field(op, g)
    closure_ok = geometry.closure_check(gauge)
    pre = prefactor_of(inst)
    domain.validate(pre.det)
    herm = tuple(hermiticity_check(pre, domain))
    norm = normalizability(pre, domain, pol_degree)
    herm_ok = all(b.hermitian_ok for b in herm)

    if herm_ok and norm.verdict == "Normalizable" and closure_ok:
        outcome = "HermitianQES"
    elif domain.kind == "bounded" and norm.boundary_all_integrable():
        outcome = "ExactlySolvableBoundedRegion"
    elif norm.verdict == "Normalizable":
        outcome = "PseudoHermitianCandidate"
    elif norm.verdict == "Inconclusive":
        outcome = "Inconclusive"
    else:
        outcome = "NotQES"

    spectral = None
    if outcome == "PseudoHermitianCandidate":
        spectral = spectral_pattern_of(inst, n, tol)
    quad = None
    if with_quadrature and norm.verdict in ("Normalizable", "Divergent"):
        quad = quadrature_crosscheck(pre, domain)
    return Verdict(outcome, closure_ok, herm, norm, spectral, quad)
