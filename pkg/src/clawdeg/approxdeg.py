"""Minimum epsilon-approximate degree by exact LP feasibility.

A polynomial ``p`` epsilon-approximates a property when, on every input of
the promise domain, ``p`` lies in ``[0, 1]`` and within ``epsilon`` of the
property value.  For a fixed degree bound this is a linear feasibility
problem in the coefficients of ``p``; the minimum degree is found by
ascending search.

Two variable spaces are supported.  ``raw`` uses the indicator variables
``x[l,i,j]`` and one constraint pair per input tuple.  ``freq`` uses the
preimage counts ``z[l,j]``; for properties invariant under domain and range
permutations the basis is the orbit monomials (or power-sum products) and
one constraint pair per orbit suffices.  Properties invariant only under
domain permutations get the plain monomial basis in ``z`` with one
constraint pair per frequency matrix.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import multisym
from .lpsolver import Constraint, LPInstance, solve_feasibility
from .multisym import freq_layout, orbit_monomial, power_sum
from .polyring import NEG_INF, Monomial, Poly, Var, X, Z, const
from .properties import (DEFAULT_BUDGET, FunctionTuple, PropertySpec, _raw_value,
                         check_symmetry, domain_size, enumerate_domain, enumerate_freq_classes,
                         enumerate_orbits, freq_matrix)

SPACES = ("raw", "freq")
BASES = ("orbit", "powersum", "monomial")
DEFAULT_EPS = Fraction(1, 3)


class SymmetryError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeQuery:
    spec: PropertySpec
    epsilon: Fraction = DEFAULT_EPS
    space: str = "freq"
    basis: str = "orbit"
    max_degree: int = 8
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if not 0 <= self.epsilon < Fraction(1, 2):
            raise ValueError("epsilon must lie in [0, 1/2)")
        if self.space not in SPACES:
            raise ValueError(f"space must be one of {SPACES}")
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")
        if self.max_degree < 0:
            raise ValueError("degree cap must be nonnegative")


@dataclass
class FeasibilityLP:
    """An LP together with what is needed to read a witness back out of it."""

    lp: LPInstance
    basis: List[Poly]
    basis_labels: List[str]
    orbit_count: int
    space: str
    basis_kind: str

    def witness(self, point: Sequence[Fraction]) -> Poly:
        out = Poly()
        for c, b in zip(point, self.basis):
            if c:
                out = out + b.scale(c)
        return out


@dataclass
class ApproxDegreeResult:
    d_min: Optional[int]
    witness: Optional[Poly]
    per_degree: List[Tuple[int, bool]]
    orbit_count: int
    basis_sizes: Dict[int, int] = field(default_factory=dict)
    space: str = "freq"
    basis_kind: str = "orbit"

    @property
    def found(self) -> bool:
        return self.d_min is not None


# -- bases -------------------------------------------------------------------

def raw_basis(domains: Sequence[int], M: int, d: int) -> List[Monomial]:
    """Indicator monomials of degree <= d that are not identically zero on functions.

    A monomial asking one domain point for two values, or repeating a
    variable, adds nothing on Boolean inputs that a multilinear monomial over
    distinct domain points does not already cover.
    """
    positions = [(l, i) for l, F in enumerate(domains, start=1) for i in range(1, F + 1)]
    out: List[Monomial] = [()]
    for s in range(1, d + 1):
        for pos in itertools.combinations(positions, s):
            for js in itertools.product(range(1, M + 1), repeat=s):
                out.append(tuple(sorted((X(l, i, j), 1) for (l, i), j in zip(pos, js))))
    return out


def _nonzero_vectors(k: int, d: int) -> List[Tuple[int, ...]]:
    vecs = [v for v in itertools.product(range(d + 1), repeat=k) if 0 < sum(v) <= d]
    return sorted(vecs, reverse=True)


def orbit_basis(k: int, M: int, d: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """Canonical exponent matrices (M rows, k columns) of weight <= d."""
    vecs = _nonzero_vectors(k, d)
    out = []
    for r in range(0, min(M, d) + 1):
        for rows in itertools.combinations_with_replacement(vecs, r):
            if sum(map(sum, rows)) <= d:
                out.append(multisym.canonical(list(rows) + [(0,) * k] * (M - r)))
    return sorted(set(out), key=lambda om: (multisym.weight(om), [tuple(-x for x in r) for r in om]))


def powersum_basis(k: int, M: int, d: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """Multisets of nonzero power-sum indices (at most M of them) of total weight <= d."""
    vecs = _nonzero_vectors(k, d)
    out = []
    for r in range(0, min(M, d) + 1):
        for rows in itertools.combinations_with_replacement(vecs, r):
            if sum(map(sum, rows)) <= d:
                out.append(tuple(rows))
    return out


def freq_monomial_basis(k: int, M: int, d: int) -> List[Monomial]:
    variables = [Z(l, j) for l in range(1, k + 1) for j in range(1, M + 1)]
    out: List[Monomial] = [()]
    for s in range(1, d + 1):
        for combo in itertools.combinations_with_replacement(variables, s):
            out.append(tuple(sorted(Counter(combo).items())))
    return out


def _orbit_value(om, cols: Sequence[Tuple[int, ...]]) -> int:
    nz = [r for r in om if any(r)]
    if not nz:
        return 1
    total = 0
    for targets in itertools.permutations(range(len(cols)), len(nz)):
        t = 1
        for row, j in zip(nz, targets):
            for e, c in zip(row, cols[j]):
                if e:
                    t *= c ** e
                    if not t:
                        break
            if not t:
                break
        total += t
    return total // math.prod(math.factorial(c) for c in Counter(nz).values())


def _powersum_value(key, cols) -> int:
    out = 1
    for lam in key:
        out *= sum(math.prod(c ** e for e, c in zip(lam, col)) for col in cols)
    return out


def _mono_value(mono: Monomial, assign) -> int:
    v = 1
    for x, e in mono:
        v *= assign[x] ** e
        if not v:
            return 0
    return v


# -- LP construction ---------------------------------------------------------

def _bounds_for(value: int, eps: Fraction) -> Tuple[Fraction, Fraction]:
    return (1 - eps, Fraction(1)) if value else (Fraction(0), eps)


def freq_mode(spec: PropertySpec, budget: int = DEFAULT_BUDGET) -> str:
    """``full`` if symmetric under domains and range, ``domain`` if under domains only."""
    if check_symmetry(spec, True, budget):
        return "full"
    if check_symmetry(spec, False, budget):
        return "domain"
    raise SymmetryError(f"{spec.label()} is not invariant under domain permutations")


def build_feasibility_lp(spec: PropertySpec, epsilon, d: int, space: str = "freq",
                         basis: str = "orbit", budget: int = DEFAULT_BUDGET,
                         mode: Optional[str] = None) -> FeasibilityLP:
    """LP over the coefficients of a degree-<=d polynomial that epsilon-approximates ``spec``.

    ``mode`` is the symmetry level from ``freq_mode``; it is computed when not
    supplied.  A freq-space LP on a spec without domain symmetry is refused.
    """
    eps = Fraction(epsilon)
    rows: List[Tuple[Tuple[int, ...], int]] = []

    if space == "raw":
        if domain_size(spec) > budget:
            from .properties import BudgetExceeded
            raise BudgetExceeded(domain_size(spec), budget)
        monos = raw_basis(spec.domains, spec.M, d)
        polys = [Poly({m: 1}) for m in monos]
        labels = [str(p) for p in polys]
        count = 0
        for t in enumerate_domain(spec, budget):
            f = t.values
            vals = tuple(int(all(f[v.l - 1][v.i - 1] == v.j for v, _ in m)) for m in monos)
            rows.append((vals, _raw_value(spec, t)))
            count += 1
        kind = "monomial"
    elif space == "freq":
        mode = mode or freq_mode(spec, budget)
        if mode == "full" and basis in ("orbit", "powersum"):
            inputs = [(o.representative, o.size) for o in enumerate_orbits(spec, budget)]
            if basis == "orbit":
                keys = orbit_basis(spec.k, spec.M, d)
                polys = [orbit_monomial(om, freq_layout) for om in keys]
                labels = ["mon" + str(list(map(list, (r for r in om if any(r))))) for om in keys]
                value = _orbit_value
            else:
                keys = powersum_basis(spec.k, spec.M, d)
                ps = {}
                polys = []
                for key in keys:
                    p = const(1)
                    for lam in key:
                        if lam not in ps:
                            ps[lam] = power_sum(lam, spec.M, freq_layout)
                        p = p * ps[lam]
                    polys.append(p)
                labels = ["P" + str(list(map(list, key))) for key in keys]
                value = _powersum_value
            for t, _ in inputs:
                fm = freq_matrix(t)
                cols = [tuple(fm[l][j] for l in range(spec.k)) for j in range(spec.M)]
                rows.append((tuple(value(key, cols) for key in keys), _raw_value(spec, t)))
            kind = basis
        else:
            if mode == "full" and basis not in ("orbit", "powersum", "monomial"):
                raise ValueError(basis)
            inputs = enumerate_freq_classes(spec, budget)
            monos = freq_monomial_basis(spec.k, spec.M, d)
            polys = [Poly({m: 1}) for m in monos]
            labels = [str(p) for p in polys]
            for t, _ in inputs:
                assign = t.frequencies()
                rows.append((tuple(_mono_value(m, assign) for m in monos), _raw_value(spec, t)))
            kind = "monomial"
        count = len(inputs)
    else:
        raise ValueError(f"space must be one of {SPACES}")

    constraints = []
    for vals, phi in rows:
        lo, hi = _bounds_for(phi, eps)
        constraints.append(Constraint(vals, ">=", lo))
        constraints.append(Constraint(vals, "<=", hi))
    return FeasibilityLP(LPInstance(len(polys), tuple(constraints)), polys, labels, count, space, kind)


def min_approx_degree(q: DegreeQuery) -> ApproxDegreeResult:
    mode = freq_mode(q.spec, q.budget) if q.space == "freq" else None
    per_degree: List[Tuple[int, bool]] = []
    sizes: Dict[int, int] = {}
    count = 0
    kind = q.basis if q.space == "freq" else "monomial"
    for d in range(q.max_degree + 1):
        sys = build_feasibility_lp(q.spec, q.epsilon, d, q.space, q.basis, q.budget, mode)
        count, kind = sys.orbit_count, sys.basis_kind
        sizes[d] = len(sys.basis)
        out = solve_feasibility(sys.lp)
        per_degree.append((d, out.feasible))
        if out.feasible:
            return ApproxDegreeResult(d, sys.witness(out.point), per_degree, count, sizes, q.space, kind)
    return ApproxDegreeResult(None, None, per_degree, count, sizes, q.space, kind)


# -- witness checks ----------------------------------------------------------

def witness_space(p: Poly) -> str:
    kinds = {v.kind for v in p.variables()}
    if kinds == {"x", "z"}:
        raise ValueError("witness mixes indicator and frequency variables")
    return "freq" if kinds == {"z"} else "raw"


def witness_values(p: Poly, spec: PropertySpec, budget: int = DEFAULT_BUDGET):
    """Yield ``(tuple, property value, polynomial value)`` over the whole promise domain."""
    space = witness_space(p)
    cache: Dict = {}
    for t in enumerate_domain(spec, budget):
        if space == "freq":
            key = freq_matrix(t)
            if key not in cache:
                cache[key] = p(t.frequencies())
            v = cache[key]
        else:
            v = p(t.indicator())
        yield t, _raw_value(spec, t), v


def verify_witness(p: Poly, spec: PropertySpec, epsilon, budget: int = DEFAULT_BUDGET) -> bool:
    eps = Fraction(epsilon)
    for _, phi, v in witness_values(p, spec, budget):
        if not 0 <= v <= 1 or abs(v - phi) > eps:
            return False
    return True


def approximation_error(p: Poly, spec: PropertySpec, budget: int = DEFAULT_BUDGET) -> Optional[Fraction]:
    """Largest ``|p - property|`` over the domain, or None if ``p`` leaves [0, 1]."""
    worst = Fraction(0)
    for _, phi, v in witness_values(p, spec, budget):
        if not 0 <= v <= 1:
            return None
        worst = max(worst, abs(v - phi))
    return worst


# -- error reduction ---------------------------------------------------------

def amplify(p, ell: int):
    """Probability that the majority of ``ell`` independent coins with bias ``p`` is heads.

    Works on a ``Poly`` or on an exact scalar.
    """
    if ell < 1 or ell % 2 == 0:
        raise ValueError("amplification needs an odd number of repetitions")
    one = const(1) if isinstance(p, Poly) else Fraction(1)
    total = Poly() if isinstance(p, Poly) else Fraction(0)
    for k in range((ell + 1) // 2, ell + 1):
        total = total + (p ** k) * ((one - p) ** (ell - k)) * math.comb(ell, k)
    return total


# -- range equality ----------------------------------------------------------

@dataclass
class RangeEntry:
    M: int
    d_min: Optional[int]
    per_degree: List[Tuple[int, bool]]
    orbit_count: int
    d_min_raw: Optional[int] = None
    raw_notice: Optional[str] = None
    lifted_witness: Optional[Poly] = None
    lifted_degree: Optional[float] = None
    lifted_verified: Optional[bool] = None


@dataclass
class RangeEqualityReport:
    spec: PropertySpec
    epsilon: Fraction
    m_prime: int
    base: RangeEntry
    entries: List[RangeEntry]

    @property
    def equal(self) -> bool:
        return all(e.d_min == self.base.d_min for e in self.entries)

    @property
    def lifted_ok(self) -> bool:
        return all(e.lifted_verified for e in self.entries)

    @property
    def raw_consistent(self) -> bool:
        return all(e.d_min_raw is None or e.d_min_raw == e.d_min for e in [self.base] + self.entries)

    @property
    def passed(self) -> bool:
        return self.equal and self.lifted_ok and self.raw_consistent


def _range_entry(spec: PropertySpec, eps: Fraction, max_degree: int, budget: int,
                 raw_budget: int) -> Tuple[RangeEntry, ApproxDegreeResult]:
    res = min_approx_degree(DegreeQuery(spec, eps, "freq", "orbit", max_degree, budget))
    entry = RangeEntry(spec.M, res.d_min, res.per_degree, res.orbit_count)
    if domain_size(spec) <= raw_budget:
        raw = min_approx_degree(DegreeQuery(spec, eps, "raw", "orbit", max_degree, budget))
        entry.d_min_raw = raw.d_min
    else:
        entry.raw_notice = (f"raw space skipped: {domain_size(spec)} inputs exceed the raw budget "
                            f"of {raw_budget}; frequency space only")
    return entry, res


def range_equality_report(spec: PropertySpec, m_prime: int, m_list: Sequence[int],
                          epsilon=DEFAULT_EPS, max_degree: int = 8,
                          budget: int = DEFAULT_BUDGET, raw_budget: int = 0) -> RangeEqualityReport:
    """Compare minimum degrees at range ``m_prime`` and each larger range.

    The witness found at ``m_prime`` is also carried to each larger range and
    checked there over the full promise domain.
    """
    eps = Fraction(epsilon)
    bound = spec.image_bound if spec.image_bound is not None else sum(spec.domains)
    if m_prime < bound:
        raise ValueError(f"M' = {m_prime} is below the image bound {bound}")
    base, base_res = _range_entry(spec.with_range(m_prime), eps, max_degree, budget, raw_budget)
    entries = []
    for M in m_list:
        big = spec.with_range(M)
        entry, _ = _range_entry(big, eps, max_degree, budget, raw_budget)
        if base_res.witness is not None:
            lifted = multisym.lift_range(base_res.witness, m_prime, M, spec.k,
                                         sizes=spec.domains, image_bound=spec.image_bound)
            entry.lifted_witness = lifted
            entry.lifted_degree = lifted.degree()
            entry.lifted_verified = (verify_witness(lifted, big, eps, budget)
                                     and lifted.degree() <= max(base_res.d_min, 0))
        entries.append(entry)
    return RangeEqualityReport(spec, eps, m_prime, base, entries)
