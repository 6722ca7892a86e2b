"""Linear differential operators with polynomial coefficients.

An operator is a finite sum of terms ``p(vars) * D^alpha`` where ``alpha``
is a multi-index of derivative orders.  Operators are kept in the normal
form "coefficients to the left of derivatives"; composition normalizes
through iterated Leibniz expansion, so equal operators have equal term
maps and operator equality is decidable exactly.

The module also provides the generator families used throughout: the
ladder triple acting on ``span{1, z, ..., z^n}``, and the two-variable
set acting on the weighted monomial modules ``{x^a y^b : m*a + b <= m*n}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .poly import (MultiPoly, RationalLike, VAR_ORDER, _VAR_RANK, _merge_vars,
                   parse_expression, rat)

DerivIndex = tuple  # derivative order per variable, aligned with op.vars


class DiffOp:
    """Immutable operator: map from derivative multi-index to coefficient."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Iterable[str], terms: Mapping[DerivIndex, MultiPoly]):
        vs = tuple(vars)
        if any(v not in _VAR_RANK for v in vs):
            raise ValueError(f"variables must come from {VAR_ORDER}, got {vs}")
        clean = {}
        for idx, coeff in terms.items():
            if len(idx) != len(vs):
                raise ValueError(f"derivative index {idx} does not match {vs}")
            if any(k < 0 for k in idx):
                raise ValueError(f"negative derivative order in {idx}")
            coeff = coeff.on_vars(vs) if coeff.vars != vs else coeff
            if not coeff.is_zero():
                clean[tuple(idx)] = coeff
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("DiffOp is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(vars: Iterable[str] = ()) -> "DiffOp":
        return DiffOp(vars, {})

    @staticmethod
    def identity(vars: Iterable[str] = ()) -> "DiffOp":
        vs = tuple(vars)
        return DiffOp(vs, {(0,) * len(vs): MultiPoly.const(1, vs)})

    @staticmethod
    def mult(p: MultiPoly) -> "DiffOp":
        """Multiplication operator f -> p * f."""
        return DiffOp(p.vars, {(0,) * len(p.vars): p})

    @staticmethod
    def partial(var: str, order: int = 1) -> "DiffOp":
        return DiffOp((var,), {(order,): MultiPoly.const(1, (var,))})

    # -- alignment ---------------------------------------------------------

    def on_vars(self, vars: Iterable[str]) -> "DiffOp":
        vs = tuple(vars)
        if vs == self.vars:
            return self
        if not set(self.vars) <= set(vs):
            raise ValueError(f"{vs} does not cover {self.vars}")
        pos = [vs.index(v) for v in self.vars]
        width = len(vs)
        terms = {}
        for idx, coeff in self.terms.items():
            vec = [0] * width
            for p, k in zip(pos, idx):
                vec[p] = k
            terms[tuple(vec)] = coeff.on_vars(vs)
        return DiffOp(vs, terms)

    @staticmethod
    def _aligned(a: "DiffOp", b: "DiffOp") -> tuple:
        vs = _merge_vars(a.vars, b.vars)
        return a.on_vars(vs), b.on_vars(vs)

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: "DiffOp") -> "DiffOp":
        a, b = DiffOp._aligned(self, other)
        terms = dict(a.terms)
        for idx, coeff in b.terms.items():
            s = terms.get(idx)
            terms[idx] = coeff if s is None else s + coeff
        return DiffOp(a.vars, terms)

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.vars, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self.__add__(-other)

    def scale(self, c: RationalLike) -> "DiffOp":
        c = rat(c)
        return DiffOp(self.vars, {i: coeff * c for i, coeff in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        a, b = DiffOp._aligned(self, other)
        return a.terms == b.terms

    def __hash__(self):  # pragma: no cover - rarely hashed
        return hash(frozenset((i, c.to_text()) for i, c in self.terms.items()))

    # -- action and composition ----------------------------------------------

    def apply(self, p: MultiPoly) -> MultiPoly:
        """Exact action on a polynomial."""
        vs = _merge_vars(self.vars, p.vars)
        op = self.on_vars(vs)
        p = p.on_vars(vs)
        result = MultiPoly.zero(vs)
        for idx, coeff in op.terms.items():
            d = p
            for v, k in zip(vs, idx):
                for _ in range(k):
                    d = d.diff(v)
                    if d.is_zero():
                        break
            if not d.is_zero():
                result = result + coeff * d
        return result

    def compose(self, other: "DiffOp") -> "DiffOp":
        """Operator product self o other, normalized by Leibniz expansion.

        For each pair of terms p*D^a and q*D^b the product contributes
        sum over g <= a of binom(a, g) * p * D^g(q) * D^(a - g + b).
        """
        a, b = DiffOp._aligned(self, other)
        vs = a.vars
        acc: dict = {}
        for ia, pa in a.terms.items():
            for ib, qb in b.terms.items():
                for gamma, dq in _derivatives_upto(qb, ia, vs):
                    weight = 1
                    for av, gv in zip(ia, gamma):
                        weight *= comb(av, gv)
                    idx = tuple(av - gv + bv for av, gv, bv in zip(ia, gamma, ib))
                    contrib = pa * dq * Fraction(weight)
                    s = acc.get(idx)
                    acc[idx] = contrib if s is None else s + contrib
        return DiffOp(vs, acc)

    def __mul__(self, other) -> "DiffOp":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, MultiPoly):
            other = DiffOp.mult(other)
        return self.compose(other)

    def __rmul__(self, other) -> "DiffOp":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, MultiPoly):
            return DiffOp.mult(other).compose(self)
        return NotImplemented

    def __pow__(self, n: int) -> "DiffOp":
        if n < 0:
            raise ValueError("negative operator power")
        result = DiffOp.identity(self.vars)
        for _ in range(n):
            result = result.compose(self)
        return result

    def commutator(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other) - other.compose(self)

    # -- structure -----------------------------------------------------------

    def order(self) -> int:
        """Maximal total derivative order; -1 for the zero operator."""
        if not self.terms:
            return -1
        return max(sum(i) for i in self.terms)

    def coefficient(self, **orders: int) -> MultiPoly:
        """Coefficient polynomial of a given derivative multi-index."""
        idx = tuple(orders.get(v, 0) for v in self.vars)
        for v in orders:
            if v not in self.vars and orders[v] > 0:
                return MultiPoly.zero(())
        return self.terms.get(idx, MultiPoly.zero(self.vars))

    def is_zero(self) -> bool:
        return not self.terms

    # -- text format -----------------------------------------------------------

    def to_text(self) -> str:
        """Render as a sum of ``(coefficient)*Dxy...`` terms."""
        if not self.terms:
            return "0"
        parts = []
        for idx in sorted(self.terms, key=lambda i: (sum(i), i), reverse=True):
            coeff = self.terms[idx]
            dtok = "D" + "".join(v * k for v, k in zip(self.vars, idx))
            body = coeff.to_text()
            if dtok == "D":
                parts.append(body if "+" not in body and "-" not in body.lstrip("-")
                             else f"({body})")
            elif body == "1":
                parts.append(dtok)
            else:
                parts.append(f"({body})*{dtok}")
        return " + ".join(parts)

    @staticmethod
    def parse(text: str, constants: Mapping[str, RationalLike] | None = None) -> "DiffOp":
        """Parse the operator text format.

        Names ``x, y, z`` are multiplication operators; a token ``D``
        followed by variable letters is the corresponding mixed partial
        (``Dx``, ``Dxx``, ``Dxy``, ...).  Named rational constants are
        resolved before parsing.
        """
        def atom(name: str) -> DiffOp:
            if name in _VAR_RANK:
                return DiffOp.mult(MultiPoly.var(name))
            if name.startswith("D") and all(ch in _VAR_RANK for ch in name[1:]):
                orders = {v: name[1:].count(v) for v in set(name[1:])}
                op = DiffOp.identity()
                for v in sorted(orders, key=_VAR_RANK.get):
                    op = op.compose(DiffOp.partial(v, orders[v]))
                return op
            raise ValueError(f"unknown operator symbol {name!r}")

        result = parse_expression(
            text, atom=atom,
            const=lambda value: DiffOp.identity().scale(value),
            constants=constants)
        if not isinstance(result, DiffOp):  # pragma: no cover - defensive
            raise ValueError(f"not an operator: {text!r}")
        return result

    def __repr__(self) -> str:
        return f"DiffOp({self.to_text()!r})"


def _derivatives_upto(q: MultiPoly, alpha: DerivIndex, vs: tuple):
    """Yield (gamma, D^gamma q) for all gamma <= alpha with nonzero value."""
    stack = [((), q)]
    for pos, amax in enumerate(alpha):
        nxt = []
        for gamma, poly in stack:
            d = poly
            for g in range(amax + 1):
                nxt.append((gamma + (g,), d))
                d = d.diff(vs[pos])
                if d.is_zero():
                    break
        stack = nxt
    return [(g, p) for g, p in stack if not p.is_zero()]


# -- generator families -------------------------------------------------------


@dataclass(frozen=True)
class LadderTriple:
    """First-order operators preserving span{1, z, ..., z^n}."""

    n: int
    j_minus: DiffOp
    j_zero: DiffOp
    j_plus: DiffOp

    def as_list(self) -> list:
        return [self.j_minus, self.j_zero, self.j_plus]


def number_op(var: str) -> DiffOp:
    """The Euler operator var * d/dvar."""
    return DiffOp.mult(MultiPoly.var(var)).compose(DiffOp.partial(var))


def make_sl2(n: int, var: str = "z") -> LadderTriple:
    """Ladder triple on polynomials of degree <= n in one variable.

    j_minus = d/dz, j_zero = N - (n-1)/2, j_plus = z*(N - n), with
    N = z d/dz.  The raising operator annihilates the top power z^n.
    """
    if n < 1:
        raise ValueError("module parameter n must be >= 1")
    nz = number_op(var)
    j_minus = DiffOp.partial(var)
    j_zero = nz - DiffOp.identity((var,)).scale(Fraction(n - 1, 2))
    j_plus = DiffOp.mult(MultiPoly.var(var)).compose(
        nz - DiffOp.identity((var,)).scale(n))
    return LadderTriple(n, j_minus, j_zero, j_plus)


@dataclass(frozen=True)
class PlaneGenerators:
    """Generators acting on the weighted module {x^a y^b : m*a + b <= m*n}.

    ``shears[p]`` is y^p * d/dx for p = 0..m; together with the Euler
    operators and d/dy they preserve every module of the flag.  ``l_mn``
    is the extra operator y*(m*N_x + N_y - m*n), which kills exactly the
    boundary monomials with m*a + b = m*n.
    """

    m: int
    n: int
    n_x: DiffOp
    n_y: DiffOp
    d_y: DiffOp
    shears: tuple
    l_mn: DiffOp

    def as_list(self) -> list:
        return [self.n_x, self.n_y, self.d_y, *self.shears, self.l_mn]


def make_gen2d(m: int, n: int) -> PlaneGenerators:
    if m < 1 or n < 1:
        raise ValueError("parameters m, n must be >= 1")
    n_x = number_op("x")
    n_y = number_op("y")
    d_y = DiffOp.partial("y")
    y = MultiPoly.var("y")
    shears = tuple(DiffOp.mult(y ** p).compose(DiffOp.partial("x"))
                   for p in range(m + 1))
    core = (n_x.scale(m) + n_y - DiffOp.identity(("x", "y")).scale(m * n))
    l_mn = DiffOp.mult(y).compose(core)
    return PlaneGenerators(m, n, n_x, n_y, d_y, shears, l_mn)


def quadratic_combination(c2: Mapping, c1: Mapping, gens: list) -> DiffOp:
    """Build sum c2[a,b]*gens[a]*gens[b] + sum c1[a]*gens[a].

    The quadratic table is symmetrized by averaging c2[a,b] and c2[b,a];
    any antisymmetric part is a first-order correction and must be put
    into ``c1`` explicitly.  Keys may be indices into ``gens``.
    """
    k = len(gens)
    result = DiffOp.zero()
    sym = {}
    for (a, b), coeff in c2.items():
        coeff = rat(coeff)
        if coeff == 0:
            continue
        key = (min(a, b), max(a, b))
        sym[key] = sym.get(key, Fraction(0)) + (coeff if a == b else coeff / 2)
    for (a, b), coeff in sorted(sym.items()):
        if a == b:
            result = result + gens[a].compose(gens[b]).scale(coeff)
        else:
            anti = gens[a].compose(gens[b]) + gens[b].compose(gens[a])
            result = result + anti.scale(coeff)
    for a in sorted(c1, key=lambda i: i if isinstance(i, int) else k):
        coeff = rat(c1[a])
        if coeff != 0:
            result = result + gens[a].scale(coeff)
    return result


def express_in_span(op: DiffOp, basis_ops: list):
    """Exact coefficients writing ``op`` as a combination of given operators.

    Returns the coefficient list, or None when ``op`` is outside the span.
    Used to probe commutator closure without asserting a normalization.
    """
    from .linalg import solve

    vs = op.vars
    for b in basis_ops:
        vs = _merge_vars(vs, b.vars)
    op = op.on_vars(vs)
    aligned = [b.on_vars(vs) for b in basis_ops]
    coords = set()
    for candidate in aligned + [op]:
        for idx, coeff in candidate.terms.items():
            for e in coeff.terms:
                coords.add((idx, e))
    coords = sorted(coords)
    rowmap = {key: i for i, key in enumerate(coords)}

    def vectorize(o: DiffOp):
        v = [Fraction(0)] * len(coords)
        for idx, coeff in o.terms.items():
            for e, c in coeff.terms.items():
                v[rowmap[(idx, e)]] = c
        return v

    matrix = [[Fraction(0)] * len(aligned) for _ in coords]
    for j, b in enumerate(aligned):
        for i, c in enumerate(vectorize(b)):
            matrix[i][j] = c
    target = vectorize(op)
    coeffs = solve(matrix, target)
    if coeffs is None:
        return None
    combo = DiffOp.zero(vs)
    for c, b in zip(coeffs, aligned):
        combo = combo + b.scale(c)
    return coeffs if combo == op else None
