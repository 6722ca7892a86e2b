"""Domains with polynomial boundary curves and their validation.

A domain is cut out of the plane by up to two curves x = xi(y) together
with a y interval.  Boundaries must lie on the zero set of the
inverse-metric determinant, and the metric must be positive definite in
the interior; both facts are certified exactly (polynomial divisibility
and a rational interior sample).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .poly import MultiPoly, RationalLike, rat, rat_str

DOMAIN_KINDS = ("quadrant", "between_curves", "half_plane", "bounded")

_X = MultiPoly.var("x")


class UnmatchedBoundaryError(ValueError):
    """A boundary curve is not a factor of the determinant."""


class InvalidDomainError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryCurve:
    xi: MultiPoly          # polynomial in y
    side: str              # "ge": domain has x >= xi; "le": x <= xi

    def __post_init__(self):
        if self.side not in ("ge", "le"):
            raise InvalidDomainError(f"side must be 'ge' or 'le', got {self.side!r}")
        if self.xi.vars not in ((), ("y",)):
            raise InvalidDomainError("boundary curves must be polynomials in y")

    def base(self) -> MultiPoly:
        """The linear-in-x polynomial vanishing on the curve."""
        return _X - self.xi

    def to_json_dict(self) -> dict:
        return {"xi": self.xi.to_text(), "side": self.side}


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    curves: tuple
    y_low: Fraction | None     # None = unbounded below
    y_high: Fraction | None    # None = unbounded above

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise InvalidDomainError(f"unknown domain kind {self.kind!r}")
        n = len(self.curves)
        if self.kind == "half_plane" and n != 0:
            raise InvalidDomainError("half_plane takes no boundary curves")
        if self.kind == "quadrant" and n != 1:
            raise InvalidDomainError("quadrant takes exactly one boundary curve")
        if self.kind in ("between_curves", "bounded") and n != 2:
            raise InvalidDomainError(f"{self.kind} takes exactly two boundary curves")
        if self.kind in ("between_curves", "bounded"):
            sides = sorted(c.side for c in self.curves)
            if sides != ["ge", "le"]:
                raise InvalidDomainError("between/bounded need one 'ge' and one 'le' curve")
        if self.y_low is not None and self.y_high is not None and self.y_low >= self.y_high:
            raise InvalidDomainError("empty y range")
        if self.kind == "bounded" and (self.y_low is None or self.y_high is None):
            raise InvalidDomainError("bounded domain needs a finite y range")

    # -- structure -----------------------------------------------------------

    def lower_curve(self) -> BoundaryCurve | None:
        """Curve with the domain on its 'ge' side (the lower x limit)."""
        for c in self.curves:
            if c.side == "ge":
                return c
        return None

    def upper_curve(self) -> BoundaryCurve | None:
        for c in self.curves:
            if c.side == "le":
                return c
        return None

    def x_unbounded_above(self) -> bool:
        return self.upper_curve() is None

    def x_unbounded_below(self) -> bool:
        return self.lower_curve() is None

    def y_edges(self) -> list:
        """Finite y endpoints that bound a slice of positive width."""
        edges = []
        for y0 in (self.y_low, self.y_high):
            if y0 is None:
                continue
            lo, hi = self.lower_curve(), self.upper_curve()
            if lo is not None and hi is not None:
                width = hi.xi.eval({"y": y0}) - lo.xi.eval({"y": y0})
                if width <= 0:
                    continue  # curves meet here: a corner, not an edge
            edges.append(y0)
        return edges

    # -- certification ---------------------------------------------------------

    def interior_sample(self, det: MultiPoly) -> tuple:
        """Exact rational interior point with det > 0, or raise."""
        ys: list = []
        if self.y_low is not None and self.y_high is not None:
            span = self.y_high - self.y_low
            ys = [self.y_low + span * Fraction(k, 8) for k in (4, 2, 6, 1, 7)]
        elif self.y_low is not None:
            ys = [self.y_low + k for k in (1, 2, Fraction(1, 2), 5)]
        elif self.y_high is not None:
            ys = [self.y_high - k for k in (1, 2, Fraction(1, 2), 5)]
        else:
            ys = [Fraction(1), Fraction(-1), Fraction(2), Fraction(-2)]
        for yv in ys:
            lo, hi = self.lower_curve(), self.upper_curve()
            xs: list = []
            if lo is not None and hi is not None:
                a = lo.xi.eval({"y": yv})
                b = hi.xi.eval({"y": yv})
                if a < b:
                    xs = [(a + b) / 2, a + (b - a) / 4, a + 3 * (b - a) / 4]
            elif lo is not None:
                a = lo.xi.eval({"y": yv})
                xs = [a + 1, a + Fraction(1, 2), a + 3]
            elif hi is not None:
                b = hi.xi.eval({"y": yv})
                xs = [b - 1, b - Fraction(1, 2), b - 3]
            else:
                xs = [Fraction(0), Fraction(1), Fraction(-1), Fraction(3)]
            for xv in xs:
                if det.eval({"x": xv, "y": yv}) > 0:
                    return xv, yv
        raise InvalidDomainError("no certified interior point with positive "
                                 "determinant was found")

    def validate(self, det: MultiPoly) -> tuple:
        """Check curves divide det and the interior is metric-positive.

        Returns the certified interior sample point.
        """
        for c in self.curves:
            if det.divide_exact(c.base()) is None:
                raise UnmatchedBoundaryError(
                    f"boundary x = {c.xi.to_text()} is not a factor of the "
                    f"determinant {det.to_text()}")
        return self.interior_sample(det)

    # -- serialization -----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "curves": [c.to_json_dict() for c in self.curves],
            "y_range": [None if self.y_low is None else rat_str(self.y_low),
                        None if self.y_high is None else rat_str(self.y_high)],
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "DomainSpec":
        allowed = {"kind", "curves", "y_range"}
        unknown = set(data) - allowed
        if unknown:
            raise InvalidDomainError(f"unknown domain keys: {sorted(unknown)}")
        kind = data.get("kind")
        curves = []
        for entry in data.get("curves", []):
            extra = set(entry) - {"xi", "side"}
            if extra:
                raise InvalidDomainError(f"unknown curve keys: {sorted(extra)}")
            xi = MultiPoly.parse(str(entry["xi"]))
            if xi.vars not in ((), ("y",)):
                raise InvalidDomainError("curve xi must be a polynomial in y")
            curves.append(BoundaryCurve(xi.on_vars(("y",)), entry["side"]))
        y_range = data.get("y_range", [None, None])
        if not isinstance(y_range, (list, tuple)) or len(y_range) != 2:
            raise InvalidDomainError("y_range must be a two-element list")

        def _bound(v):
            if v is None or v == "inf" or v == "-inf":
                return None
            return rat(v)

        return DomainSpec(kind, tuple(curves), _bound(y_range[0]), _bound(y_range[1]))


def first_quadrant() -> DomainSpec:
    """x >= 0, y >= 0."""
    zero = MultiPoly.zero(("y",))
    return DomainSpec("quadrant", (BoundaryCurve(zero, "ge"),), Fraction(0), None)


def region_beyond(xi: MultiPoly, side: str, y_low=None, y_high=None) -> DomainSpec:
    return DomainSpec("quadrant", (BoundaryCurve(xi, side),),
                      None if y_low is None else rat(y_low),
                      None if y_high is None else rat(y_high))


def half_plane(y_low=None, y_high=None) -> DomainSpec:
    return DomainSpec("half_plane", (),
                      None if y_low is None else rat(y_low),
                      None if y_high is None else rat(y_high))


def between(xi_lo: MultiPoly, xi_hi: MultiPoly, y_low=None, y_high=None,
            bounded: bool = False) -> DomainSpec:
    return DomainSpec("bounded" if bounded else "between_curves",
                      (BoundaryCurve(xi_lo, "ge"), BoundaryCurve(xi_hi, "le")),
                      None if y_low is None else rat(y_low),
                      None if y_high is None else rat(y_high))


# -- boundary-curve plot data -------------------------------------------------


REGION_LABELS = ("I_L", "I_R", "II_L", "II_R", "III_L", "III_R")


def curve_samples(xi: MultiPoly, y_min: Fraction, y_max: Fraction,
                  samples: int) -> list:
    """(y, xi(y)) pairs on a uniform rational grid."""
    if samples < 2 or y_max <= y_min:
        raise InvalidDomainError("need samples >= 2 and a nonempty y range")
    step = (y_max - y_min) / (samples - 1)
    return [(y_min + step * k, xi.eval({"y": y_min + step * k}))
            for k in range(samples)]


def region_label_points(det: MultiPoly, curves: list,
                        y_min: Fraction, y_max: Fraction) -> list:
    """Representative sample points of the six curve-delimited regions.

    Regions I (beyond the larger curve), II (below the smaller) and III
    (between) on each side of y = 0 are probed at rational points; each
    entry reports the label, the point, and the exact sign of det there.
    With a single curve only the I/II labels apply.
    """
    out = []
    for label_side, yv in (("L", min(y_min, Fraction(0)) / 2 - Fraction(1, 2)),
                           ("R", max(y_max, Fraction(0)) / 2 + Fraction(1, 2))):
        values = sorted(c.eval({"y": yv}) for c in curves)
        probes = {}
        if values:
            probes["I_" + label_side] = values[-1] + 1
            probes["II_" + label_side] = values[0] - 1
            if len(values) > 1 and values[0] < values[-1]:
                probes["III_" + label_side] = (values[0] + values[-1]) / 2
        else:
            probes["I_" + label_side] = Fraction(0)
        for label, xv in sorted(probes.items()):
            sign = det.eval({"x": xv, "y": yv})
            out.append({"label": label, "x": xv, "y": yv,
                        "det_positive": sign > 0})
    return out
