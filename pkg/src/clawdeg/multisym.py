"""Multisymmetric polynomial algebra.

An exponent matrix ``omega`` is a tuple of ``n`` rows of length ``m``; row
``i`` holds the exponents of the variable vector ``X_i``.  A *layout* maps a
(row, column) pair, both 1-based, to the polynomial variable sitting there.
Two layouts matter here:

* ``matrix_layout(l)``: row ``i`` is domain point ``i`` of function ``l``,
  column ``j`` is range value ``j``.
* ``freq_layout``: row ``j`` is range value ``j``, column ``c`` is function
  ``c``.  A polynomial in frequency variables that is invariant under
  permuting range values is exactly a multisymmetric polynomial in this
  layout.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Mapping, Sequence, Tuple

from .polyring import Monomial, Poly, Var, X, Z, const, format_rational, var

Row = Tuple[int, ...]
ExponentMatrix = Tuple[Row, ...]
Layout = Callable[[int, int], Var]
PowerSumKey = Tuple[Row, ...]


def matrix_layout(l: int = 1) -> Layout:
    return lambda i, j: X(l, i, j)


def freq_layout(row: int, col: int) -> Var:
    return Z(col, row)


def canonical(omega: Sequence[Sequence[int]]) -> ExponentMatrix:
    """Rows sorted descending lexicographically."""
    return tuple(sorted((tuple(r) for r in omega), reverse=True))


def weight(omega: Sequence[Sequence[int]]) -> int:
    return sum(sum(r) for r in omega)


def nonzero_rows(omega: ExponentMatrix) -> int:
    return sum(1 for r in omega if any(r))


def stabilizer_order(omega: Sequence[Row]) -> int:
    return math.prod(math.factorial(c) for c in Counter(map(tuple, omega)).values())


def orbit_size(omega: Sequence[Row]) -> int:
    return math.factorial(len(omega)) // stabilizer_order(omega)


def distinct_arrangements(rows: Sequence[Row]) -> Iterator[Tuple[Row, ...]]:
    """Every distinct ordering of a multiset of rows, each exactly once."""
    counts = Counter(map(tuple, rows))
    keys = sorted(counts, reverse=True)
    n = len(rows)
    out: List[Row] = []

    def rec() -> Iterator[Tuple[Row, ...]]:
        if len(out) == n:
            yield tuple(out)
            return
        for key in keys:
            if counts[key]:
                counts[key] -= 1
                out.append(key)
                yield from rec()
                out.pop()
                counts[key] += 1

    yield from rec()


def _row_monomial(i: int, row: Row, layout: Layout) -> Monomial:
    return tuple(sorted((layout(i, j + 1), e) for j, e in enumerate(row) if e))


def monomial_key(omega: Sequence[Row], layout: Layout) -> Monomial:
    d: Dict[Var, int] = {}
    for i, row in enumerate(omega, start=1):
        for v, e in _row_monomial(i, row, layout):
            d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def power_sum(lam: Sequence[int], n: int, layout: Layout) -> Poly:
    """Sum over the ``n`` vectors of ``X_i ** lam``."""
    if n < 1:
        raise ValueError("power sums need at least one vector")
    lam = tuple(lam)
    return Poly({_row_monomial(i, lam, layout): 1 for i in range(1, n + 1)}) if any(lam) else const(n)


def orbit_monomial(omega: Sequence[Sequence[int]], layout: Layout) -> Poly:
    """``mon_omega``: the sum of ``X^Lambda`` over the row-permutation orbit of omega."""
    rows = [tuple(r) for r in omega]
    return Poly({monomial_key(arr, layout): 1 for arr in distinct_arrangements(rows)})


# -- decomposition into power sums ---------------------------------------------

def _set_partitions(items: List[int]) -> Iterator[List[List[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for b in range(len(part)):
            yield part[:b] + [[first] + part[b]] + part[b + 1:]


def product_expansion(omega: ExponentMatrix) -> Dict[ExponentMatrix, int]:
    """Coefficients ``c`` with ``prod_i P_{omega_i} = sum c[W] * mon_W``.

    Expanding the product picks one vector per factor.  Grouping the nonzero
    factors by the vector they land on gives a set partition; a partition with
    ``b`` blocks yields each monomial in the orbit of its block-sum matrix
    ``W`` exactly ``|Stab(W)| / (n-b)!`` times, and each zero factor
    contributes a free factor ``n``.
    """
    n = len(omega)
    m = len(omega[0]) if omega else 0
    nz = [r for r in omega if any(r)]
    free = n ** (n - len(nz))
    out: Dict[ExponentMatrix, int] = {}
    for part in _set_partitions(list(range(len(nz)))):
        b = len(part)
        rows = [tuple(sum(nz[c][j] for c in block) for j in range(m)) for block in part]
        w = canonical(rows + [(0,) * m] * (n - b))
        out[w] = out.get(w, 0) + free * stabilizer_order(w) // math.factorial(n - b)
    return out


@dataclass(frozen=True)
class PowerSumExpression:
    """Rational combination of products ``P_{l_1} ... P_{l_r}``.

    Keys are sorted tuples of exponent rows; zero rows stand for ``P_0 = n``.
    """

    terms: Mapping[PowerSumKey, Fraction] = field(default_factory=dict)

    def expand(self, n: int, layout: Layout, zero_value: int | None = None) -> Poly:
        """Re-expand over ``n`` vectors.  ``zero_value`` overrides ``P_0``."""
        cache: Dict[Row, Poly] = {}

        def ps(lam: Row) -> Poly:
            if lam not in cache:
                cache[lam] = (const(zero_value) if zero_value is not None and not any(lam)
                              else power_sum(lam, n, layout))
            return cache[lam]

        total = Poly()
        for key, c in self.terms.items():
            t = const(c)
            for lam in key:
                t = t * ps(lam)
            total = total + t
        return total

    def max_weight(self) -> int:
        return max((weight(k) for k in self.terms), default=0)

    def to_text(self) -> str:
        if not self.terms:
            return "0/1"
        parts = []
        for key in sorted(self.terms, key=lambda k: (-weight(k), k)):
            factors = [format_rational(self.terms[key])]
            factors += ["P[" + ",".join(map(str, lam)) + "]" for lam in key]
            parts.append("*".join(factors))
        return " + ".join(parts)


@lru_cache(maxsize=None)
def _decompose(omega: ExponentMatrix) -> Tuple[Tuple[PowerSumKey, Fraction], ...]:
    expansion = product_expansion(omega)
    c_self = Fraction(expansion.pop(omega))
    result: Dict[PowerSumKey, Fraction] = {omega: 1 / c_self}
    for w, c in expansion.items():
        for key, coef in _decompose(w):
            result[key] = result.get(key, 0) - Fraction(c) / c_self * coef
    return tuple((k, v) for k, v in sorted(result.items()) if v)


def decompose_mon(omega: Sequence[Sequence[int]]) -> PowerSumExpression:
    """Write ``mon_omega`` as a rational combination of power-sum products.

    Recursion on the number of nonzero rows; every product used has the same
    total weight as ``omega``.
    """
    return PowerSumExpression(dict(_decompose(canonical(omega))))


# -- symmetrization over domain permutations ------------------------------------

def symmetrize_term(term: Monomial, F: int, l: int | None = None) -> Poly:
    """Average of an indicator monomial of one function over all domain permutations.

    Exponents collapse because indicators are Boolean.  A term that asks one
    domain point for two different values vanishes on every function.
    """
    pairs: Dict[int, int] = {}
    for v, _ in term:
        if v.kind != "x":
            raise ValueError(f"{v} is not an indicator variable")
        if l is None:
            l = v.l
        elif v.l != l:
            raise ValueError("symmetrize_term takes variables of a single function")
        if v.i in pairs and pairs[v.i] != v.j:
            return Poly()
        pairs[v.i] = v.j
    m = len(pairs)
    if m > F:
        raise ValueError(f"term of multilinear degree {m} exceeds domain size {F}")
    result = const(1)
    seen: Counter = Counter()
    for pos, (_, j) in enumerate(sorted(pairs.items())):
        result = result * (var(Z(l, j)) - seen[j]) / (F - pos)
        seen[j] += 1
    return result


def symmetrize_poly(p: Poly, sizes: Sequence[int]) -> Poly:
    """Average over independent permutations of every function's domain."""
    cache: Dict[Monomial, Poly] = {}
    out = Poly()
    for mono, c in p.items():
        blocks: Dict[int, List[Tuple[Var, int]]] = {}
        for v, e in mono:
            blocks.setdefault(v.l, []).append((v, e))
        t = const(c)
        for l, sub in sorted(blocks.items()):
            key = tuple(sub)
            if key not in cache:
                cache[key] = symmetrize_term(key, sizes[l - 1], l)
            t = t * cache[key]
            if not t:
                break
        out = out + t
    return out


def expand_freq_to_raw(q: Poly, sizes: Sequence[int]) -> Poly:
    """Replace every ``z[l,j]`` by the indicator sum over function ``l``'s domain."""
    def image(v: Var):
        if v.kind != "z":
            return v
        return Poly({((X(v.l, i, v.j), 1),): 1 for i in range(1, sizes[v.l - 1] + 1)})
    return q.map_vars(image)


def restrict_range(q: Poly, m_prime: int) -> Poly:
    """Set every variable whose range index exceeds ``m_prime`` to zero."""
    return q.map_vars(lambda v: 0 if v.j > m_prime else v)


def exponent_matrix(mono: Monomial, rows: int, k: int) -> ExponentMatrix:
    """Frequency monomial as a ``rows`` x ``k`` matrix (row = range value)."""
    mat = [[0] * k for _ in range(rows)]
    for v, e in mono:
        if v.kind != "z" or v.j > rows or v.l > k:
            raise ValueError(f"{v} outside the {rows}x{k} frequency layout")
        mat[v.j - 1][v.l - 1] = e
    return tuple(map(tuple, mat))


def range_average(q: Poly, M: int, k: int) -> Dict[ExponentMatrix, Fraction]:
    """Average of ``q`` over permutations of ``[M]``, as orbit-monomial coefficients."""
    out: Dict[ExponentMatrix, Fraction] = {}
    for mono, c in q.items():
        om = canonical(exponent_matrix(mono, M, k))
        out[om] = out.get(om, 0) + c / orbit_size(om)
    return {om: c for om, c in out.items() if c}


def symmetric_part(q: Poly, M: int, k: int) -> Poly:
    return sum((orbit_monomial(om, freq_layout).scale(c)
                for om, c in range_average(q, M, k).items()), Poly())


def lift_range(q_prime: Poly, m_prime: int, M: int, k: int,
               sizes: Sequence[int] | None = None, image_bound: int | None = None) -> Poly:
    """Carry a frequency polynomial from range ``[m_prime]`` to ``[M]``.

    ``q_prime`` is averaged over permutations of ``[m_prime]``, written in
    power sums over the ``m_prime`` range vectors, and each nonconstant power
    sum is re-expanded over ``M`` vectors.  ``P_0`` is the constant
    ``m_prime`` and stays so.
    """
    if image_bound is not None:
        bound = image_bound
    elif sizes is not None:
        bound = sum(sizes)
    else:
        raise ValueError("lift_range needs domain sizes or an image bound")
    if m_prime < bound:
        raise ValueError(f"source range {m_prime} is below the image bound {bound}")
    if M <= m_prime:
        raise ValueError(f"target range {M} must exceed source range {m_prime}")
    out = Poly()
    for om, c in range_average(q_prime, m_prime, k).items():
        out = out + decompose_mon(om).expand(M, freq_layout, zero_value=m_prime).scale(c)
    return out
