"""Exact rational feasibility for systems of linear constraints.

The solver is the bounded-variable simplex used for linear real arithmetic in
SMT solvers: each distinct constraint row gets one slack variable carrying
both of its bounds, the tableau keeps basic variables as combinations of
nonbasic ones, and repairs pick the lowest-indexed violated basic variable
and the lowest-indexed eligible nonbasic one (Bland's rule), which rules out
cycling.  There is no objective.

Pivoting runs on ``gmpy2.mpq`` when available; inputs and outputs are
``Fraction``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .polyring import format_rational, parse_rational

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

RELATIONS = ("<=", ">=", "=")

Bound = Tuple[Optional[Fraction], Optional[Fraction]]


@dataclass(frozen=True)
class Constraint:
    row: Tuple[Fraction, ...]
    rel: str
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.rel!r}")
        object.__setattr__(self, "row", tuple(Fraction(c) for c in self.row))
        object.__setattr__(self, "rhs", Fraction(self.rhs))


@dataclass(frozen=True)
class LPInstance:
    num_vars: int
    constraints: Tuple[Constraint, ...] = ()
    bounds: Optional[Tuple[Bound, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            if len(c.row) != self.num_vars:
                raise ValueError(f"row of length {len(c.row)} in a {self.num_vars}-variable system")
        if self.bounds is not None:
            if len(self.bounds) != self.num_vars:
                raise ValueError("one bound pair per variable")
            object.__setattr__(self, "bounds", tuple(
                (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))
                for lo, hi in self.bounds))

    def to_text(self) -> str:
        lines = [f"vars {self.num_vars}"]
        if self.bounds is not None:
            for i, (lo, hi) in enumerate(self.bounds):
                lo_s = "-inf" if lo is None else format_rational(lo)
                hi_s = "inf" if hi is None else format_rational(hi)
                lines.append(f"bound {i} {lo_s} {hi_s}")
        for c in self.constraints:
            lines.append(" ".join(map(format_rational, c.row)) + f" {c.rel} {format_rational(c.rhs)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LPInstance":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "vars":
            raise ValueError("first line must be 'vars <n>'")
        n = int(head[1])
        bounds: List[Bound] = [(None, None)] * n
        has_bounds = False
        cons = []
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] == "bound":
                has_bounds = True
                lo = None if parts[2] == "-inf" else parse_rational(parts[2])
                hi = None if parts[3] == "inf" else parse_rational(parts[3])
                bounds[int(parts[1])] = (lo, hi)
            else:
                cons.append(Constraint(tuple(map(parse_rational, parts[:n])), parts[n],
                                       parse_rational(parts[n + 1])))
        return cls(n, tuple(cons), tuple(bounds) if has_bounds else None)


@dataclass(frozen=True)
class LPOutcome:
    feasible: bool
    point: Optional[Tuple[Fraction, ...]] = None
    pivots: int = field(default=0, compare=False)

    @property
    def status(self) -> str:
        return "feasible" if self.feasible else "infeasible"


def verify_solution(lp: LPInstance, point: Sequence[Fraction]) -> bool:
    if len(point) != lp.num_vars:
        raise ValueError("point has the wrong length")
    point = [Fraction(v) for v in point]
    if lp.bounds is not None:
        for v, (lo, hi) in zip(point, lp.bounds):
            if (lo is not None and v < lo) or (hi is not None and v > hi):
                return False
    for c in lp.constraints:
        lhs = sum((a * v for a, v in zip(c.row, point) if a), Fraction(0))
        if c.rel == "<=" and lhs > c.rhs:
            return False
        if c.rel == ">=" and lhs < c.rhs:
            return False
        if c.rel == "=" and lhs != c.rhs:
            return False
    return True


def _merge_rows(lp: LPInstance):
    """Collapse constraints sharing a coefficient row into one bounded slack."""
    slots: Dict[Tuple[Fraction, ...], List] = {}
    for c in lp.constraints:
        lo, hi = slots.setdefault(c.row, [None, None])
        if c.rel in (">=", "="):
            lo = c.rhs if lo is None else max(lo, c.rhs)
        if c.rel in ("<=", "="):
            hi = c.rhs if hi is None else min(hi, c.rhs)
        slots[c.row] = [lo, hi]
    return slots


def solve_feasibility(lp: LPInstance) -> LPOutcome:
    n = lp.num_vars
    lower: List = [None] * n
    upper: List = [None] * n
    if lp.bounds is not None:
        for i, (lo, hi) in enumerate(lp.bounds):
            lower[i] = None if lo is None else _Q(lo)
            upper[i] = None if hi is None else _Q(hi)

    rows: Dict[int, Dict[int, object]] = {}
    for coeffs, (lo, hi) in _merge_rows(lp).items():
        if lo is not None and hi is not None and lo > hi:
            return LPOutcome(False)
        nz = {i: _Q(a) for i, a in enumerate(coeffs) if a}
        if not nz:
            if (lo is not None and lo > 0) or (hi is not None and hi < 0):
                return LPOutcome(False)
            continue
        s = n + len(rows)
        rows[s] = nz
        lower.append(None if lo is None else _Q(lo))
        upper.append(None if hi is None else _Q(hi))

    for i in range(n):
        if lower[i] is not None and upper[i] is not None and lower[i] > upper[i]:
            return LPOutcome(False)

    beta: List = [_Q(0)] * len(lower)
    for i in range(n):
        if lower[i] is not None and lower[i] > 0:
            beta[i] = lower[i]
        elif upper[i] is not None and upper[i] < 0:
            beta[i] = upper[i]
    cols: Dict[int, set] = {}
    for s, r in rows.items():
        beta[s] = sum((a * beta[i] for i, a in r.items()), _Q(0))
        for i in r:
            cols.setdefault(i, set()).add(s)

    def violated(v):
        b = beta[v]
        return (lower[v] is not None and b < lower[v]) or (upper[v] is not None and b > upper[v])

    def can_raise(v):
        return upper[v] is None or beta[v] < upper[v]

    def can_lower(v):
        return lower[v] is None or beta[v] > lower[v]

    pivots = 0
    bad = {s for s in rows if violated(s)}
    while bad:
        b = min(bad)
        row = rows[b]
        raise_b = lower[b] is not None and beta[b] < lower[b]
        target = lower[b] if raise_b else upper[b]
        j = None
        for k in sorted(row):
            a = row[k]
            if (a > 0) == raise_b:
                ok = can_raise(k)
            else:
                ok = can_lower(k)
            if ok:
                j = k
                break
        if j is None:
            return LPOutcome(False, pivots=pivots)

        # update the assignment
        a_bj = row[j]
        theta = (target - beta[b]) / a_bj
        beta[j] = beta[j] + theta
        for r in cols.get(j, ()):
            beta[r] = beta[r] + rows[r][j] * theta

        # pivot: j becomes basic, b nonbasic
        inv = 1 / a_bj
        new_row = {k: -a * inv for k, a in row.items() if k != j}
        new_row[b] = inv
        del rows[b]
        for k in row:
            cols[k].discard(b)
        cols.setdefault(b, set())
        for r in list(cols.get(j, ())):
            rr = rows[r]
            c = rr.pop(j)
            for k, a in new_row.items():
                v = rr.get(k, 0) + c * a
                if v:
                    rr[k] = v
                    cols.setdefault(k, set()).add(r)
                else:
                    rr.pop(k, None)
                    cols[k].discard(r)
        cols.pop(j, None)
        rows[j] = new_row
        for k in new_row:
            cols.setdefault(k, set()).add(j)
        pivots += 1

        bad.discard(b)
        for r in rows:
            if violated(r):
                bad.add(r)
            else:
                bad.discard(r)

    point = tuple(Fraction(int(beta[i].numerator), int(beta[i].denominator)) for i in range(n))
    return LPOutcome(True, point, pivots)


# -- independent oracle -----------------------------------------------------

def _solve_equalities(A: List[List[Fraction]], b: List[Fraction], n: int) -> Optional[List[Fraction]]:
    """Some solution of ``A x = b`` (free variables set to zero), or None."""
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [vi - f * vr for vi, vr in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(M)):
        if M[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = M[i][n]
    return x


def brute_force_feasible(lp: LPInstance) -> bool:
    """Feasibility by enumerating candidate minimal faces.

    A nonempty polyhedron has a minimal face that is an affine subspace cut
    out by at most ``n`` of its inequalities made tight, and every point of
    that subspace is feasible.  So trying all such subsets decides
    feasibility.  Only practical for a handful of variables.
    """
    n = lp.num_vars
    ineqs: List[Tuple[List[Fraction], Fraction]] = []  # a.x <= b
    for c in lp.constraints:
        if c.rel in ("<=", "="):
            ineqs.append((list(c.row), c.rhs))
        if c.rel in (">=", "="):
            ineqs.append(([-a for a in c.row], -c.rhs))
    if lp.bounds is not None:
        for i, (lo, hi) in enumerate(lp.bounds):
            e = [Fraction(0)] * n
            if lo is not None:
                e2 = e[:]
                e2[i] = Fraction(-1)
                ineqs.append((e2, -lo))
            if hi is not None:
                e2 = e[:]
                e2[i] = Fraction(1)
                ineqs.append((e2, hi))
    for size in range(0, min(n, len(ineqs)) + 1):
        for subset in itertools.combinations(range(len(ineqs)), size):
            x = _solve_equalities([ineqs[s][0] for s in subset], [ineqs[s][1] for s in subset], n)
            if x is None:
                continue
            if all(sum(a * v for a, v in zip(row, x)) <= rhs for row, rhs in ineqs):
                return True
    return False
