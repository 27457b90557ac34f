"""Sparse multivariate polynomials with exact rational coefficients.

Variables are tagged: ``x[l,i,j]`` is the indicator that function ``l`` maps
domain point ``i`` to range value ``j``; ``z[l,j]`` is the number of preimages
of ``j`` under function ``l``.  All indices are 1-based.

A polynomial is an immutable map from monomials to nonzero ``Fraction``
coefficients.  A monomial is a sorted tuple of ``(Var, exponent)`` pairs with
positive exponents, so the constant monomial is ``()``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, NamedTuple, Tuple, Union

__all__ = [
    "Var", "X", "Z", "Monomial", "Poly", "NEG_INF", "Scalar",
    "const", "var", "poly_arith", "poly_eval", "poly_degree", "substitute",
    "to_text", "from_text", "parse_rational", "format_rational",
    "MissingVariableError",
]

Scalar = Union[int, Fraction]

# Degree of the zero polynomial.  Compares below every integer, is never -1.
NEG_INF = -math.inf


class Var(NamedTuple):
    kind: str  # "x" (raw indicator) or "z" (frequency)
    l: int
    i: int  # 0 for frequency variables
    j: int

    def __str__(self) -> str:
        if self.kind == "x":
            return f"x[{self.l},{self.i},{self.j}]"
        return f"z[{self.l},{self.j}]"


def X(l: int, i: int, j: int) -> Var:
    return Var("x", l, i, j)


def Z(l: int, j: int) -> Var:
    return Var("z", l, 0, j)


Monomial = Tuple[Tuple[Var, int], ...]


class MissingVariableError(KeyError):
    def __init__(self, v: Var):
        super().__init__(v)
        self.var = v

    def __str__(self) -> str:
        return f"no value assigned to variable {self.var}"


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _order_key(m: Monomial):
    # graded lexicographic, highest degree first
    return (-_mono_degree(m), m)


class Poly:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable[Tuple[Monomial, Scalar]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[Monomial, Fraction] = {}
        for m, c in items:
            acc[m] = acc.get(m, 0) + Fraction(c)
        self._terms = {m: c for m, c in acc.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "Poly":
        # terms already canonical: no zero coefficients
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # -- access ---------------------------------------------------------
    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, Fraction]]:
        """Terms in canonical (graded lexicographic) order."""
        for m in sorted(self._terms, key=_order_key):
            yield m, self._terms[m]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def variables(self) -> set:
        return {v for m in self._terms for v, _ in m}

    def degree(self) -> float:
        if not self._terms:
            return NEG_INF
        return max(_mono_degree(m) for m in self._terms)

    # -- arithmetic -----------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return const(other)
        return NotImplemented

    def __add__(self, other):
        other = Poly._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = Poly._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = Poly._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly._raw({m: c for m, c in out.items() if c != 0})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = const(1), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly()
        return Poly._raw({m: v * c for m, v in self._terms.items()})

    # -- comparison -----------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)

    # -- evaluation -----------------------------------------------------
    def __call__(self, assignment: Mapping[Var, Scalar]) -> Fraction:
        return poly_eval(self, assignment)

    def map_vars(self, fn: Callable[[Var], "Poly | Var | Scalar"]) -> "Poly":
        """Substitute ``fn(v)`` for every variable ``v``."""
        cache: Dict[Var, Poly] = {}

        def image(v: Var) -> Poly:
            if v not in cache:
                r = fn(v)
                cache[v] = r if isinstance(r, Poly) else (var(r) if isinstance(r, Var) else const(r))
            return cache[v]

        out = Poly()
        for m, c in self._terms.items():
            t = const(c)
            for v, e in m:
                t = t * image(v) ** e
                if not t:
                    break
            out = out + t
        return out


def const(c: Scalar) -> Poly:
    c = Fraction(c)
    return Poly._raw({(): c} if c else {})


def var(v: Var) -> Poly:
    return Poly._raw({((v, 1),): Fraction(1)})


def poly_arith(a: Poly, b, op: str) -> Poly:
    """Dispatch ``add``, ``sub``, ``mul`` or ``scale`` (``b`` a scalar)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown operation {op!r}")


def poly_eval(p: Poly, assignment: Mapping[Var, Scalar]) -> Fraction:
    total = Fraction(0)
    for m, c in p._terms.items():
        t = c
        for v, e in m:
            try:
                val = assignment[v]
            except KeyError:
                raise MissingVariableError(v) from None
            t *= val ** e if e != 1 else val
        total += t
    return total


def poly_degree(p: Poly) -> float:
    return p.degree()


def substitute(p: Poly, subst: Mapping[Var, "Poly | Scalar"]) -> Poly:
    """Simultaneous substitution; unmapped variables stay as they are."""
    return p.map_vars(lambda v: subst.get(v, v))


# -- text format ------------------------------------------------------------

def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


_RAT = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(s: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` exactly; decimals are rejected."""
    m = _RAT.match(s)
    if not m:
        raise ValueError(f"not an exact rational: {s!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError(f"zero denominator in {s!r}")
    return Fraction(int(m.group(1)), den)


def to_text(p: Poly) -> str:
    if not p._terms:
        return "0/1"
    parts = []
    for m, c in p.items():
        factors = [format_rational(c)]
        for v, e in m:
            factors.append(str(v) if e == 1 else f"{v}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


_FACTOR = re.compile(r"^(x)\[(\d+),(\d+),(\d+)\](?:\^(\d+))?$|^(z)\[(\d+),(\d+)\](?:\^(\d+))?$")


def from_text(s: str) -> Poly:
    s = s.strip()
    terms: Dict[Monomial, Fraction] = {}
    for chunk in s.split(" + "):
        factors = chunk.strip().split("*")
        coeff = parse_rational(factors[0])
        mono: Dict[Var, int] = {}
        for f in factors[1:]:
            m = _FACTOR.match(f.strip())
            if not m:
                raise ValueError(f"bad factor {f!r} in {chunk!r}")
            if m.group(1):
                v, e = X(int(m.group(2)), int(m.group(3)), int(m.group(4))), m.group(5)
            else:
                v, e = Z(int(m.group(7)), int(m.group(8))), m.group(9)
            mono[v] = mono.get(v, 0) + (int(e) if e else 1)
        key = tuple(sorted(mono.items()))
        terms[key] = terms.get(key, 0) + coeff
    return Poly(terms)
