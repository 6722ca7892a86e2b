"""Exact sparse multivariate polynomials and rational functions.

A polynomial is a map from exponent vectors to nonzero rational
coefficients (``fractions.Fraction``).  Variables come from the fixed
universe ``x < y < z``; every polynomial carries the ordered tuple of
variables its exponent vectors refer to, and binary operations align
operands onto the union of their variable sets.  There is no floating
point anywhere in this module: identity testing is fully reliable.

Rational functions are stored as unreduced numerator/denominator pairs;
equality is decided by cross multiplication, so no multivariate GCD is
ever needed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Iterator, Mapping, Union

Rational = Fraction

#: Fixed global variable order; every variable tuple is a subtuple of this.
VAR_ORDER = ("x", "y", "z")

_VAR_RANK = {v: i for i, v in enumerate(VAR_ORDER)}

Exponents = tuple  # exponent vector, one non-negative int per variable
Coeffs = dict      # Exponents -> Fraction, no zero values stored

RationalLike = Union[int, str, Fraction]


def rat(value: RationalLike) -> Fraction:
    """Coerce an int, a ``"p/q"`` string, or a Fraction to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rat_str(value: Fraction) -> str:
    """Render a Fraction as ``"p"`` or ``"p/q"`` (denominator omitted when 1)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _merge_vars(a: tuple, b: tuple) -> tuple:
    if a == b:
        return a
    names = set(a) | set(b)
    return tuple(v for v in VAR_ORDER if v in names)


def _reindex(terms: Coeffs, old: tuple, new: tuple) -> Coeffs:
    if old == new:
        return terms
    pos = [new.index(v) for v in old]
    width = len(new)
    out: Coeffs = {}
    for exps, c in terms.items():
        vec = [0] * width
        for p, e in zip(pos, exps):
            vec[p] = e
        out[tuple(vec)] = c
    return out


class MultiPoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Iterable[str], terms: Mapping[Exponents, RationalLike]):
        vs = tuple(vars)
        if any(v not in _VAR_RANK for v in vs):
            raise ValueError(f"variables must come from {VAR_ORDER}, got {vs}")
        if list(vs) != sorted(vs, key=_VAR_RANK.get):
            raise ValueError(f"variables must follow the global order: {vs}")
        clean: Coeffs = {}
        for exps, c in terms.items():
            if len(exps) != len(vs):
                raise ValueError(f"exponent vector {exps} does not match {vs}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            cf = rat(c)
            if cf != 0:
                clean[tuple(exps)] = cf
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(vars: Iterable[str] = ()) -> "MultiPoly":
        return MultiPoly(vars, {})

    @staticmethod
    def const(value: RationalLike, vars: Iterable[str] = ()) -> "MultiPoly":
        vs = tuple(vars)
        return MultiPoly(vs, {(0,) * len(vs): rat(value)})

    @staticmethod
    def var(name: str) -> "MultiPoly":
        return MultiPoly((name,), {(1,): Fraction(1)})

    @staticmethod
    def monomial(coeff: RationalLike, **powers: int) -> "MultiPoly":
        """Build ``coeff * prod(var**power)``, e.g. ``monomial(2, x=1, y=3)``."""
        vs = tuple(v for v in VAR_ORDER if v in powers)
        exps = tuple(powers[v] for v in vs)
        return MultiPoly(vs, {exps: rat(coeff)})

    # -- alignment ---------------------------------------------------------

    def on_vars(self, vars: Iterable[str]) -> "MultiPoly":
        """Reindex onto a superset variable tuple."""
        vs = tuple(vars)
        if not set(self.vars) <= set(vs):
            raise ValueError(f"{vs} does not cover {self.vars}")
        return MultiPoly(vs, _reindex(self.terms, self.vars, vs))

    def compact(self) -> "MultiPoly":
        """Drop variables that appear with exponent zero everywhere."""
        used = [i for i in range(len(self.vars))
                if any(e[i] for e in self.terms)]
        if len(used) == len(self.vars):
            return self
        vs = tuple(self.vars[i] for i in used)
        return MultiPoly(vs, {tuple(e[i] for i in used): c
                              for e, c in self.terms.items()})

    @staticmethod
    def _aligned(a: "MultiPoly", b: "MultiPoly") -> tuple:
        vs = _merge_vars(a.vars, b.vars)
        return vs, _reindex(a.terms, a.vars, vs), _reindex(b.terms, b.vars, vs)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "MultiPoly":
        other = _as_poly(other)
        vs, ta, tb = MultiPoly._aligned(self, other)
        out = dict(ta)
        for e, c in tb.items():
            s = out.get(e, _ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly(vs, out)

    def __radd__(self, other) -> "MultiPoly":
        return self.__add__(other)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self.__add__(-_as_poly(other))

    def __rsub__(self, other) -> "MultiPoly":
        return _as_poly(other).__sub__(self)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            c = rat(other)
            return MultiPoly(self.vars, {e: c * v for e, v in self.terms.items()})
        other = _as_poly(other)
        vs, ta, tb = MultiPoly._aligned(self, other)
        out: Coeffs = {}
        for ea, ca in ta.items():
            for eb, cb in tb.items():
                e = tuple(i + j for i, j in zip(ea, eb))
                s = out.get(e, _ZERO) + ca * cb
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly(vs, out)

    def __rmul__(self, other) -> "MultiPoly":
        return self.__mul__(other)

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = MultiPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        _, ta, tb = MultiPoly._aligned(self, other)
        return ta == tb

    def __hash__(self):
        used = [i for i, _ in enumerate(self.vars)
                if any(e[i] for e in self.terms)]
        vs = tuple(self.vars[i] for i in used)
        canon = frozenset((tuple(e[i] for i in used), c)
                          for e, c in self.terms.items())
        return hash((vs, canon))

    # -- calculus & evaluation ---------------------------------------------

    def diff(self, var: str) -> "MultiPoly":
        """Formal partial derivative; zero if ``var`` is absent."""
        if var not in self.vars:
            return MultiPoly.zero(self.vars)
        i = self.vars.index(var)
        out: Coeffs = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return MultiPoly(self.vars, out)

    def subst(self, var: str, replacement: "MultiPoly") -> "MultiPoly":
        """Exact substitution of ``replacement`` for ``var``, fully expanded."""
        if var not in self.vars:
            raise ValueError(f"{var} not among {self.vars}")
        i = self.vars.index(var)
        rest = tuple(v for v in self.vars if v != var)
        groups: dict = {}
        for e, c in self.terms.items():
            key = e[:i] + e[i + 1:]
            groups.setdefault(e[i], {})[key] = c
        result = MultiPoly.zero(rest)
        powers: dict = {0: MultiPoly.const(1)}
        for k in sorted(groups):
            if k not in powers:
                prev = max(powers)
                acc = powers[prev]
                for _ in range(prev, k):
                    acc = acc * replacement
                powers[k] = acc
            result = result + MultiPoly(rest, groups[k]) * powers[k]
        return result

    def eval(self, point: Mapping[str, RationalLike]) -> Fraction:
        """Exact value at a rational point covering all variables."""
        vals = [rat(point[v]) for v in self.vars]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(vals, e):
                if k:
                    term *= v ** k
            total += term
        return total

    def eval_float(self, point: Mapping[str, float]) -> float:
        vals = [float(point[v]) for v in self.vars]
        total = 0.0
        for e, c in self.terms.items():
            term = float(c)
            for v, k in zip(vals, e):
                if k:
                    term *= v ** k
            total += term
        return total

    def eval_partial(self, point: Mapping[str, RationalLike]) -> "MultiPoly":
        """Substitute rational values for a subset of the variables."""
        out = self
        for v, val in point.items():
            if v in out.vars:
                out = out.subst(v, MultiPoly.const(rat(val)))
        return out

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, var: str) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var not in self.vars:
            return 0
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def coeff_of(self, **powers: int) -> "MultiPoly":
        """Coefficient of ``prod(var**power)`` as a polynomial in the rest."""
        idx = {self.vars.index(v): k for v, k in powers.items() if v in self.vars}
        for v, k in powers.items():
            if v not in self.vars and k > 0:
                return MultiPoly.zero(())
        rest = tuple(v for i, v in enumerate(self.vars) if i not in idx)
        out: Coeffs = {}
        for e, c in self.terms.items():
            if all(e[i] == k for i, k in idx.items()):
                out[tuple(x for i, x in enumerate(e) if i not in idx)] = c
        return MultiPoly(rest, out)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def sorted_terms(self) -> Iterator[tuple]:
        """Terms in descending graded-lex order (matches the text format)."""
        return iter(sorted(self.terms.items(),
                           key=lambda kv: (sum(kv[0]), kv[0]), reverse=True))

    def leading(self) -> tuple:
        """(exponents, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=lambda k: (sum(k), k))
        return e, self.terms[e]

    def content(self) -> Fraction:
        """GCD of coefficient numerators over LCM of denominators (positive)."""
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = gcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
        return Fraction(num_gcd, den_lcm) if num_gcd else Fraction(0)

    def exponent_shift(self) -> tuple:
        """Componentwise minimum exponent vector (the monomial content)."""
        if not self.terms:
            return (0,) * len(self.vars)
        return tuple(min(e[i] for e in self.terms) for i in range(len(self.vars)))

    def shifted_down(self, shift: tuple) -> "MultiPoly":
        if not any(shift):
            return self
        return MultiPoly(self.vars, {tuple(a - b for a, b in zip(e, shift)): c
                                     for e, c in self.terms.items()})

    # -- division helpers ----------------------------------------------------

    def divide_exact(self, divisor: "MultiPoly"):
        """Return q with self == q * divisor, or None if not exactly divisible."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        vs, tr, td = MultiPoly._aligned(self, divisor)
        r = dict(tr)
        d = MultiPoly(vs, td)
        de, dc = d.leading()
        q: Coeffs = {}
        while r:
            rem = MultiPoly(vs, r)
            re, rc = rem.leading()
            qe = tuple(a - b for a, b in zip(re, de))
            if any(k < 0 for k in qe):
                return None
            qc = rc / dc
            q[qe] = qc
            r = (rem - MultiPoly(vs, {qe: qc}) * d).terms
        return MultiPoly(vs, q)

    def proportional_to(self, other: "MultiPoly"):
        """Return nonzero c with self == c * other, or None."""
        if self.is_zero() or other.is_zero():
            return None
        _, ta, tb = MultiPoly._aligned(self, other)
        ea = max(ta, key=lambda k: (sum(k), k))
        eb = max(tb, key=lambda k: (sum(k), k))
        if ea != eb:
            return None
        c = ta[ea] / tb[eb]
        if self == other * c:
            return c
        return None

    # -- text format ---------------------------------------------------------

    def to_text(self) -> str:
        """Human-readable sum of terms in descending graded-lex order."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for v, k in zip(self.vars, e):
                if k == 1:
                    factors.append(v)
                elif k > 1:
                    factors.append(f"{v}^{k}")
            if not factors:
                body = rat_str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([rat_str(abs(c))] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    @staticmethod
    def parse(text: str, constants: Mapping[str, RationalLike] | None = None) -> "MultiPoly":
        """Parse the text format back into a polynomial.

        ``constants`` maps symbolic names (e.g. ``c``) to exact rationals;
        they are resolved before parsing.
        """
        result = parse_expression(
            text,
            atom=lambda name: MultiPoly.var(name),
            const=lambda value: MultiPoly.const(value),
            constants=constants,
        )
        if not isinstance(result, MultiPoly):  # pragma: no cover - defensive
            raise ValueError(f"not a polynomial: {text!r}")
        return result

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_text()!r})"


_ZERO = Fraction(0)


def _as_poly(value) -> MultiPoly:
    if isinstance(value, MultiPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return MultiPoly.const(value)
    raise TypeError(f"cannot coerce {value!r} to MultiPoly")


# -- generic expression parser ---------------------------------------------
#
# Grammar:  expr   := term (('+'|'-') term)*
#           term   := factor ('*' factor)*
#           factor := primary ('^' integer)?
#           primary:= rational | name | '(' expr ')' | '-' primary
#
# The caller supplies how names and rational literals become ring elements,
# so the same parser serves polynomials and differential operators.

_TOKEN_CHARS = set("+-*^() \t")


def _tokenize(text: str) -> list:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
        elif ch in "+-*^()":
            tokens.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "/"):
                j += 1
            # a '/' only continues the literal when followed by a digit
            lit = text[i:j]
            while lit.endswith("/"):
                lit = lit[:-1]
                j -= 1
            tokens.append(("num", lit))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j]))
            i = j
        else:
            raise ValueError(f"unexpected character {ch!r} in {text!r}")
    return tokens


def parse_expression(text: str, atom: Callable, const: Callable,
                     constants: Mapping[str, RationalLike] | None = None):
    """Parse ``text`` over a commutative-enough ring.

    ``atom(name)`` builds the element for a bare name, ``const(Fraction)``
    wraps a rational literal.  Named constants are substituted first.
    """
    consts = {k: rat(v) for k, v in (constants or {}).items()}
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_primary():
        tok = peek()
        if tok == "(":
            take()
            node = parse_sum()
            if peek() != ")":
                raise ValueError(f"missing ')' in {text!r}")
            take()
            return node
        if tok == "-":
            take()
            return -parse_primary()
        if tok == "+":
            take()
            return parse_primary()
        if isinstance(tok, tuple) and tok[0] == "num":
            take()
            return const(Fraction(tok[1]))
        if isinstance(tok, tuple) and tok[0] == "name":
            take()
            name = tok[1]
            if name in consts:
                return const(consts[name])
            return atom(name)
        raise ValueError(f"unexpected token {tok!r} in {text!r}")

    def parse_power():
        base = parse_primary()
        if peek() == "^":
            take()
            neg = False
            tok = take()
            if tok == "-":
                neg = True
                tok = take()
            if not (isinstance(tok, tuple) and tok[0] == "num"):
                raise ValueError(f"bad exponent in {text!r}")
            k = int(tok[1])
            if neg:
                raise ValueError("negative exponents are not supported")
            return base ** k
        return base

    def parse_term():
        node = parse_power()
        while peek() == "*":
            take()
            node = node * parse_power()
        return node

    def parse_sum():
        node = parse_term()
        while peek() in ("+", "-"):
            op = take()
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    result = parse_sum()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in {text!r}")
    return result


class RatFun:
    """Quotient of two polynomials, kept unreduced.

    Equality is decided by cross multiplication, which is exact and avoids
    multivariate GCD entirely.  A cheap monomial/integer content split keeps
    intermediate expressions from swelling.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, normalize: bool = True):
        den = MultiPoly.const(1) if den is None else den
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if normalize and not num.is_zero():
            vs, tn, td = MultiPoly._aligned(num, den)
            num = MultiPoly(vs, tn)
            den = MultiPoly(vs, td)
            common = tuple(min(a, b) for a, b in zip(num.exponent_shift(),
                                                     den.exponent_shift()))
            num = num.shifted_down(common)
            den = den.shifted_down(common)
            scale = num.content() / den.content()
            num = num * (Fraction(1) / num.content() * scale.numerator)
            den = den * (Fraction(1) / den.content() * scale.denominator)
            if den.leading()[1] < 0:
                num = -num
                den = -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("RatFun is immutable")

    @staticmethod
    def zero() -> "RatFun":
        return RatFun(MultiPoly.zero())

    @staticmethod
    def from_poly(p: MultiPoly) -> "RatFun":
        return RatFun(p)

    @staticmethod
    def const(value: RationalLike) -> "RatFun":
        return RatFun(MultiPoly.const(value))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other) -> "RatFun":
        other = _as_ratfun(other)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den,
                      self.den * other.den)

    def __radd__(self, other) -> "RatFun":
        return self.__add__(other)

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den, normalize=False)

    def __sub__(self, other) -> "RatFun":
        return self.__add__(-_as_ratfun(other))

    def __rsub__(self, other) -> "RatFun":
        return _as_ratfun(other).__sub__(self)

    def __mul__(self, other) -> "RatFun":
        other = _as_ratfun(other)
        return RatFun(self.num * other.num, self.den * other.den)

    def __rmul__(self, other) -> "RatFun":
        return self.__mul__(other)

    def __truediv__(self, other) -> "RatFun":
        other = _as_ratfun(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RatFun":
        return _as_ratfun(other).__truediv__(self)

    def equal(self, other) -> bool:
        """Exact equality by cross multiplication."""
        other = _as_ratfun(other)
        return (self.num * other.den - other.num * self.den).is_zero()

    def __eq__(self, other) -> bool:
        try:
            other = _as_ratfun(other)
        except TypeError:
            return NotImplemented
        return self.equal(other)

    def __hash__(self):  # pragma: no cover - rarely hashed
        return hash(("RatFun", self.num.total_degree(), self.den.total_degree()))

    def diff(self, var: str) -> "RatFun":
        """Quotient-rule derivative, unreduced."""
        return RatFun(self.num.diff(var) * self.den - self.num * self.den.diff(var),
                      self.den * self.den)

    def eval(self, point: Mapping[str, RationalLike]) -> Fraction:
        d = self.den.eval(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the sample point")
        return self.num.eval(point) / d

    def eval_float(self, point: Mapping[str, float]) -> float:
        return self.num.eval_float(point) / self.den.eval_float(point)

    def to_text(self) -> str:
        if self.den == MultiPoly.const(1):
            return self.num.to_text()
        return f"({self.num.to_text()}) / ({self.den.to_text()})"

    def __repr__(self) -> str:
        return f"RatFun({self.to_text()!r})"


def _as_ratfun(value) -> RatFun:
    if isinstance(value, RatFun):
        return value
    if isinstance(value, MultiPoly):
        return RatFun(value)
    if isinstance(value, (int, Fraction)):
        return RatFun.const(value)
    raise TypeError(f"cannot coerce {value!r} to RatFun")


# Convenience singletons
X = MultiPoly.var("x")
Y = MultiPoly.var("y")
Z = MultiPoly.var("z")
ONE = MultiPoly.const(1)
