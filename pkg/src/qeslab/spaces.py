"""Finite monomial modules, invariance testing, and the algebraic spectrum.

Three kinds of module appear:

* ``space_1d(n)``       -- span{1, z, ..., z^n};
* ``space_fmn(m, n)``   -- span{x^a y^b : m*a + b <= m*n}, the weighted
  staircase modules preserved by the plane generator family;
* ``space_rect(nx, ny)`` -- span{x^a y^b : a <= nx, b <= ny}, the product
  module preserved by a pair of ladder triples.

A matrix of an invariant operator is exact (Fraction entries); its
characteristic polynomial is computed exactly and only the final root
finding is floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .poly import MultiPoly, rat_str
from .operators import DiffOp


class NotInvariantError(ValueError):
    """Operator maps a basis monomial outside the module."""

    def __init__(self, witness: MultiPoly, image_term: MultiPoly):
        self.witness = witness
        self.image_term = image_term
        super().__init__(
            f"operator leaves the module: {witness.to_text()} -> "
            f"... + {image_term.to_text()}")


class NotAnEigenvalueError(ValueError):
    pass


class RootFindingFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class MonomialSpace:
    """Ordered basis of monomials with a membership predicate."""

    kind: str                  # "1d" | "fmn" | "rect"
    params: tuple
    vars: tuple
    basis: tuple               # exponent vectors, deterministic order

    def dim(self) -> int:
        return len(self.basis)

    def contains(self, exps: tuple) -> bool:
        if self.kind == "1d":
            (n,) = self.params
            return exps[0] <= n
        if self.kind == "fmn":
            m, n = self.params
            return m * exps[0] + exps[1] <= m * n
        nx, ny = self.params
        return exps[0] <= nx and exps[1] <= ny

    def monomial(self, i: int) -> MultiPoly:
        return MultiPoly(self.vars, {self.basis[i]: Fraction(1)})

    def monomials(self) -> list:
        return [self.monomial(i) for i in range(self.dim())]

    def index_of(self, exps: tuple) -> int:
        return self.basis.index(exps)

    def describe(self) -> str:
        if self.kind == "1d":
            return f"1d(n={self.params[0]})"
        if self.kind == "fmn":
            return f"fmn(m={self.params[0]}, n={self.params[1]})"
        return f"rect(nx={self.params[0]}, ny={self.params[1]})"


def space_1d(n: int, var: str = "z") -> MonomialSpace:
    if n < 1:
        raise ValueError("n must be >= 1")
    return MonomialSpace("1d", (n,), (var,), tuple((k,) for k in range(n + 1)))


def space_fmn(m: int, n: int) -> MonomialSpace:
    """Weighted staircase module; basis sorted by (m*a + b, a, b)."""
    if m < 1 or n < 1:
        raise ValueError("m, n must be >= 1")
    exps = [(a, b) for a in range(n + 1) for b in range(m * (n - a) + 1)]
    exps.sort(key=lambda e: (m * e[0] + e[1], e[0], e[1]))
    return MonomialSpace("fmn", (m, n), ("x", "y"), tuple(exps))


def fmn_dim_formula(m: int, n: int) -> int:
    """Closed form (n+1) + m*n*(n+1)/2 for the staircase dimension."""
    return (n + 1) + m * n * (n + 1) // 2


def space_rect(nx: int, ny: int) -> MonomialSpace:
    """Product module x^a y^b with a <= nx, b <= ny; graded-lex order."""
    if nx < 0 or ny < 0:
        raise ValueError("nx, ny must be >= 0")
    exps = [(a, b) for a in range(nx + 1) for b in range(ny + 1)]
    exps.sort(key=lambda e: (e[0] + e[1], e[0], e[1]))
    return MonomialSpace("rect", (nx, ny), ("x", "y"), tuple(exps))


@dataclass(frozen=True)
class InvarianceReport:
    ok: bool
    witness: MultiPoly | None = None
    image_term: MultiPoly | None = None


def is_invariant(op: DiffOp, space: MonomialSpace) -> InvarianceReport:
    """Check that every basis monomial maps back into the module.

    On failure the first offending basis monomial (in basis order) and
    one escaping image term are reported.
    """
    for i in range(space.dim()):
        mono = space.monomial(i)
        image = op.apply(mono)
        aligned = image.on_vars(space.vars) if image.vars != space.vars else image
        for exps in sorted(aligned.terms):
            if not space.contains(exps):
                bad = MultiPoly(space.vars, {exps: aligned.terms[exps]})
                return InvarianceReport(False, mono, bad)
    return InvarianceReport(True)


@dataclass(frozen=True)
class SpectralMatrix:
    """Exact matrix of an operator restricted to a monomial module."""

    entries: tuple            # tuple of row tuples, Fraction
    space: MonomialSpace

    def dim(self) -> int:
        return len(self.entries)

    def rows(self) -> list:
        return [list(r) for r in self.entries]

    def to_csv(self) -> str:
        return "\n".join(",".join(rat_str(v) for v in row)
                         for row in self.entries) + "\n"


def matrix_of(op: DiffOp, space: MonomialSpace) -> SpectralMatrix:
    """Exact matrix: column j holds the expansion of op(basis_j).

    Raises NotInvariantError (with witness) when the module is not
    preserved.
    """
    dim = space.dim()
    index = {e: i for i, e in enumerate(space.basis)}
    cols = []
    for j in range(dim):
        mono = space.monomial(j)
        image = op.apply(mono)
        aligned = image.on_vars(space.vars) if image.vars != space.vars else image
        col = [Fraction(0)] * dim
        for exps, c in aligned.terms.items():
            i = index.get(exps)
            if i is None:
                raise NotInvariantError(mono, MultiPoly(space.vars, {exps: c}))
            col[i] = c
        cols.append(col)
    entries = tuple(tuple(cols[j][i] for j in range(dim)) for i in range(dim))
    return SpectralMatrix(entries, space)


def char_poly(mat: SpectralMatrix) -> MultiPoly:
    """Exact characteristic polynomial det(z*I - M) in the variable z."""
    coeffs = linalg.char_poly_coeffs(mat.rows())
    return MultiPoly(("z",), {(k,): c for k, c in enumerate(coeffs)})


def rational_eigenvalues(mat: SpectralMatrix, max_divisors: int = 200000) -> list:
    """All rational roots of the characteristic polynomial, exactly.

    Candidates come from the rational-root theorem on the integer-cleared
    polynomial when the extreme coefficients are small enough to factor by
    trial division, plus exact verification of rational reconstructions of
    the float roots.  Every returned value satisfies charpoly(v) == 0
    exactly.
    """
    coeffs = linalg.char_poly_coeffs(mat.rows())
    # strip zero roots first: factor out z^k
    mult0 = 0
    while coeffs[mult0] == 0:
        mult0 += 1
    reduced = coeffs[mult0:]
    found = set()
    if mult0:
        found.add(Fraction(0))

    def is_root(v: Fraction) -> bool:
        acc = Fraction(0)
        for c in reversed(reduced):
            acc = acc * v + c
        return acc == 0

    lcm = 1
    for c in reduced:
        lcm = lcm * c.denominator // np.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in reduced]
    lead, tail = abs(ints[-1]), abs(ints[0])
    if tail and tail <= max_divisors and lead <= max_divisors:
        ps = _divisors(tail)
        qs = _divisors(lead)
        for p in ps:
            for q in qs:
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if cand not in found and is_root(cand):
                        found.add(cand)
    # reconstruction from float roots catches large-coefficient cases
    froots = np.roots([float(c) for c in reversed(reduced)]) if len(reduced) > 1 else []
    for r in froots:
        if abs(r.imag) < 1e-8:
            cand = Fraction(r.real).limit_denominator(10 ** 6)
            if cand not in found and is_root(cand):
                found.add(cand)
    return sorted(found)


def _divisors(n: int) -> list:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


@dataclass(frozen=True)
class SpectralPattern:
    """Float eigenvalues split into reals and conjugate pairs."""

    real_eigs: tuple
    pair_eigs: tuple          # tuple of (a+bi, a-bi) with b > 0
    tol: float
    residuals: tuple = field(default=())

    def dim(self) -> int:
        return len(self.real_eigs) + 2 * len(self.pair_eigs)


def eigenvalues(mat: SpectralMatrix, tol: float = 1e-9) -> SpectralPattern:
    """Roots of the exact characteristic polynomial, then pattern split.

    The matrix itself is never converted to floats: the coefficients of
    the exact characteristic polynomial are, and the companion-matrix
    roots of those are classified.  Residuals are checked against
    tol * (1 + |root|)^dim and a RootFindingFailure is raised when the
    bound is violated.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    coeffs = linalg.char_poly_coeffs(mat.rows())
    dim = len(coeffs) - 1
    if dim == 0:
        return SpectralPattern((), (), tol)
    fcoeffs = [float(c) for c in reversed(coeffs)]
    roots = np.roots(fcoeffs)
    residuals = []
    for r in roots:
        val = np.polyval(fcoeffs, r)
        bound = tol * (1.0 + abs(r)) ** dim
        residuals.append(abs(val))
        if abs(val) > bound:
            raise RootFindingFailure(
                f"residual {abs(val):.3e} exceeds {bound:.3e} at root {r}")
    reals = []
    complexes = []
    for r in roots:
        scale = max(1.0, abs(r))
        if abs(r.imag) <= tol * scale:
            reals.append(float(r.real))
        else:
            complexes.append(complex(r))
    pairs = _pair_conjugates(complexes, tol)
    reals.sort()
    return SpectralPattern(tuple(reals), tuple(pairs), tol,
                           tuple(sorted(residuals)))


def _pair_conjugates(roots: list, tol: float) -> list:
    """Greedy nearest-conjugate matching; deterministic tie-breaking."""
    pool = sorted(roots, key=lambda r: (-abs(r), r.real, r.imag))
    pairs = []
    while pool:
        r = pool.pop(0)
        if not pool:
            raise RootFindingFailure(f"unpaired complex root {r}")
        best = min(range(len(pool)), key=lambda i: abs(pool[i] - r.conjugate()))
        mate = pool.pop(best)
        if abs(mate - r.conjugate()) > tol * max(1.0, abs(r)):
            raise RootFindingFailure(
                f"complex roots {r} and {mate} fail conjugate pairing")
        top = r if r.imag > 0 else mate
        pairs.append((top, top.conjugate()))
    pairs.sort(key=lambda p: (p[0].real, p[0].imag))
    return pairs


def eigenpolynomials(mat: SpectralMatrix, eig: Fraction) -> list:
    """Exact kernel basis of (M - eig*I) as polynomials.

    The kernel basis comes from the reduced row echelon form, so the
    representative choice is reproducible; degenerate eigenvalues yield
    one polynomial per kernel dimension.
    """
    rows = mat.rows()
    dim = len(rows)
    for i in range(dim):
        rows[i][i] -= eig
    basis = linalg.kernel_basis(rows)
    if not basis:
        raise NotAnEigenvalueError(f"{eig} is not an exact eigenvalue")
    polys = []
    for vec in basis:
        terms = {mat.space.basis[i]: c for i, c in enumerate(vec) if c}
        polys.append(MultiPoly(mat.space.vars, terms))
    return polys


def eigenpolynomial(mat: SpectralMatrix, eig: Fraction) -> MultiPoly:
    """First kernel polynomial (see eigenpolynomials)."""
    return eigenpolynomials(mat, eig)[0]
