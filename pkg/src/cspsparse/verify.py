"""Ground-truth checks: exhaustive (1 +- eps) verification, lower-bound
witness families, codeword censuses and coverage statistics."""
from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .histogram_core import SymmetricValuedRelation
from .instance import (Instance, Predicate, assignment_at, assignment_block, clause_values,
                       complete, lookup_table, variable_domains)
from .relation_core import (RelationError, RestrictionWitness, ValuedRelation,
                            boolean_uniform_exponent, product_array)

DEFAULT_BUDGET = 2 ** 24
CHUNK = 1 << 13
_SAFE = 2 ** 62


class BudgetError(ValueError):
    pass


def _check_budget(domains: Sequence[int], budget: int) -> int:
    total = math.prod(domains)
    if total > budget:
        raise BudgetError(f"{total} assignments exceed the budget of {budget}; "
                          "use a smaller n or raise --budget")
    return total


# -- grouped evaluation -------------------------------------------------------

@dataclass(frozen=True)
class _Grouped:
    """Clauses merged by variable set: one value table per set."""

    variables: np.ndarray   # (S, r) sorted global variable indices
    strides: np.ndarray     # (S, r) strides into each local table
    offsets: np.ndarray     # (S,) start of each local table in ``table``
    table: np.ndarray       # concatenated weighted local tables (numerators)
    den: int


def _group(R: Predicate, C: Instance, var_domains: Sequence[int]) -> _Grouped:
    table, strides = lookup_table(R, C)
    gv = C.global_variables()
    order = np.argsort(gv, axis=1, kind="stable")
    sorted_vars = np.take_along_axis(gv, order, axis=1)
    keys, inverse = np.unique(sorted_vars, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    doms = np.asarray(var_domains, dtype=np.int64)[keys] if len(keys) else np.zeros((0, C.r), np.int64)
    sizes = doms.prod(axis=1) if len(keys) else np.zeros(0, np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64)
    local_strides = np.ones_like(doms)
    for j in range(C.r - 2, -1, -1):
        local_strides[:, j] = local_strides[:, j + 1] * doms[:, j + 1]
    weights = C.weight_num
    big = weights.dtype == object or int(table.max(initial=0)) * int(weights.sum()) >= _SAFE
    out = np.zeros(int(sizes.sum()), dtype=object if big else np.int64)
    for ci in range(C.m):
        s = inverse[ci]
        grid = product_array(tuple(int(x) for x in doms[s]))
        # clause position j reads the sorted slot order[ci, j]
        idx = grid[:, order[ci]] @ strides
        vals = table[idx]
        if big:
            vals = vals.astype(object)
        out[offsets[s]:offsets[s] + sizes[s]] += vals * weights[ci]
    return _Grouped(keys, local_strides, offsets, out, C.weight_den)


def _grouped_sums(G: _Grouped, A: np.ndarray) -> np.ndarray:
    if len(G.variables) == 0:
        return np.zeros(len(A), dtype=np.int64)
    idx = np.broadcast_to(G.offsets, (len(A), len(G.offsets))).copy()
    for j in range(G.variables.shape[1]):
        idx += A[:, G.variables[:, j]] * G.strides[:, j]
    return G.table[idx].sum(axis=1)


# -- exhaustive verification ----------------------------------------------------

@dataclass(frozen=True)
class VerifyReport:
    max_deviation: Fraction
    argmax: tuple[int, ...] | None
    zero_violations: int
    eps: Fraction
    assignments: int
    passed: bool

    def to_dict(self) -> dict:
        return {"max_deviation": str(self.max_deviation),
                "max_deviation_float": float(self.max_deviation),
                "argmax": None if self.argmax is None else list(self.argmax),
                "zero_violations": self.zero_violations, "eps": str(self.eps),
                "assignments": self.assignments, "passed": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        return "".join(f"{k}: {v}\n" for k, v in self.to_dict().items())


def _scan(GC: _Grouped, GH: _Grouped, domains, start, stop):
    A = assignment_block(domains, start, stop)
    a = _grouped_sums(GC, A)
    b = _grouped_sums(GH, A)
    za, zb = a == 0, b == 0
    zero = int((za != zb).sum())
    pos = np.flatnonzero(~za)
    if len(pos) == 0:
        return zero, Fraction(0), None
    af = a[pos].astype(float) * GH.den
    bf = b[pos].astype(float) * GC.den
    dev = np.abs(bf - af) / af
    top = dev.max()
    best, arg = Fraction(-1), None
    # floats only shortlist; the maximum itself is decided exactly
    for p in pos[np.flatnonzero(dev >= top * (1 - 1e-9) - 1e-300)]:
        ai, bi = int(a[p]), int(b[p])
        d = Fraction(abs(bi * GC.den - ai * GH.den), ai * GH.den)
        if d > best:
            best, arg = d, start + int(p)
    return zero, best, arg


def exhaustive_verify(R: Predicate, C: Instance, C_hat: Instance, eps,
                      budget: int = DEFAULT_BUDGET, threads: int | None = None) -> VerifyReport:
    """Check ``sat_hat in (1 +- eps) sat`` for every assignment, exactly.

    Results do not depend on ``threads``: shards are merged by exact maximum
    with ties broken towards the first assignment in enumeration order.
    """
    eps = Fraction(eps)
    if (C.kind, C.n, C.r) != (C_hat.kind, C_hat.n, C_hat.r):
        raise ValueError("instances must share kind, n and r")
    domains = variable_domains(R, C)
    total = _check_budget(domains, budget)
    GC, GH = _group(R, C.merged(), domains), _group(R, C_hat.merged(), domains)
    bounds = [(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
    workers = threads or os.cpu_count() or 1
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _scan(GC, GH, domains, *b), bounds))
    else:
        parts = [_scan(GC, GH, domains, *b) for b in bounds]
    zero = sum(p[0] for p in parts)
    best, arg = Fraction(0), None
    for _, d, a in parts:
        if a is not None and (arg is None or d > best):
            best, arg = d, a
    argmax = None if arg is None else assignment_at(domains, arg)
    return VerifyReport(best, argmax, zero, eps, total, zero == 0 and best <= eps)


def sat_table(R: Predicate, C: Instance, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """``sat * weight_den`` for every assignment in enumeration order."""
    domains = variable_domains(R, C)
    total = _check_budget(domains, budget)
    G = _group(R, C.merged(), domains)
    return np.concatenate([_grouped_sums(G, assignment_block(domains, s, min(s + CHUNK, total)))
                           for s in range(0, total, CHUNK)])


# -- witness families ------------------------------------------------------------

@dataclass(frozen=True)
class WitnessFamily:
    assignments: np.ndarray = field(repr=False)
    satisfied: tuple[frozenset[int], ...] = field(repr=False)
    disjoint: bool
    max_shared: int
    c: int
    symbol: int | None = None

    @property
    def size(self) -> int:
        return len(self.assignments)

    @property
    def implied_bound(self) -> int:
        """Clauses any sparsifier must keep: each member needs one of its own."""
        return math.ceil(self.size / self.max_shared) if self.max_shared else 0

    def to_dict(self) -> dict:
        return {"size": self.size, "c": self.c, "symbol": self.symbol,
                "disjoint": self.disjoint, "max_shared": self.max_shared,
                "implied_bound": self.implied_bound,
                "satisfied_counts": [len(s) for s in self.satisfied]}


def _family(R: Predicate, C: Instance, X: np.ndarray, c: int, symbol=None) -> WitnessFamily:
    vals = clause_values(R, C, X) if len(X) else np.zeros((0, C.m), np.int64)
    sat = tuple(frozenset(np.flatnonzero(row).tolist()) for row in vals)
    shared = (vals != 0).sum(axis=0)
    max_shared = int(shared.max(initial=0))
    return WitnessFamily(X, sat, max_shared <= 1, max_shared, c, symbol)


def witness_family_uniform(R: ValuedRelation, n: int) -> WitnessFamily:
    """Assignments with exactly c copies of one symbol b, on the complete
    uniform instance.

    b = 1 when c is the minimum support weight (every satisfied clause must
    then hold all c ones), otherwise b = 0.
    """
    c = boolean_uniform_exponent(R)
    if c < 1:
        raise RelationError("the witness family needs c >= 1")
    weights = R.support_array().sum(axis=1)
    b = 1 if c == int(weights.min()) else 0
    C = complete("uniform", n, R.r)
    rows = []
    for pos in itertools.combinations(range(n), c):
        x = np.full(n, 1 - b, dtype=np.int64)
        x[list(pos)] = b
        rows.append(x)
    return _family(R, C, np.array(rows, dtype=np.int64).reshape(-1, n), c, b)


def witness_family_rpartite(R: ValuedRelation, witness: RestrictionWitness,
                            n: int) -> WitnessFamily:
    """The n^c distinguished-vertex assignments of an AND_c restriction.

    On each distinguished part one vertex takes the survivor's symbol and the
    rest take the other symbol of the pair; other parts are constant.
    """
    c = witness.k
    if c < 1:
        raise RelationError("the witness family needs an AND_c with c >= 1")
    a = witness.survivor
    r = R.r
    C = complete("rpartite", n, r)
    base = np.empty(r * n, dtype=np.int64)
    for i, E in enumerate(witness.sets):
        other = E[0] if len(E) == 1 else next(x for x in E if x != a[i])
        base[i * n:(i + 1) * n] = other
    rows = []
    for choice in itertools.product(range(n), repeat=c):
        x = base.copy()
        for i, j in zip(witness.distinguished, choice):
            x[i * n + j] = a[i]
        rows.append(x)
    fam = _family(R, C, np.array(rows, dtype=np.int64), c)
    assert fam.disjoint
    assert all(len(s) == n ** (r - c) for s in fam.satisfied)
    return fam


# -- codeword census --------------------------------------------------------------

@dataclass(frozen=True)
class Census:
    thresholds: tuple[float, ...]
    counts: tuple[int, ...]
    distinct: int
    nonzero_distinct: int
    scanned: int

    def table(self) -> str:
        lines = ["threshold count"]
        lines += [f"{t:g} {c}" for t, c in zip(self.thresholds, self.counts)]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"thresholds": list(self.thresholds), "counts": list(self.counts),
                "distinct": self.distinct, "nonzero_distinct": self.nonzero_distinct,
                "scanned": self.scanned}


def dominant_mask(A: np.ndarray, C: Instance, t: Sequence[int], q: int) -> np.ndarray:
    """Rows whose majority symbol (ties allowed) is ``t_i`` in every part,
    or ``t_0`` globally for single-part instances."""
    parts = C.r if C.kind == "rpartite" else 1
    n = A.shape[1] // parts
    ok = np.ones(len(A), dtype=bool)
    for i in range(parts):
        block = A[:, i * n:(i + 1) * n]
        counts = np.stack([(block == d).sum(axis=1) for d in range(q)], axis=1)
        ok &= counts[:, t[i]] >= counts.max(axis=1)
    return ok


def codeword_census(R: Predicate, C: Instance, thresholds: Iterable[float],
                    dominant: Sequence[int] | None = None,
                    budget: int = DEFAULT_BUDGET) -> Census:
    """Distinct codewords whose weight (number of nonzero clauses) is at most
    each threshold.  With ``dominant`` only t-dominant assignments count."""
    thresholds = tuple(sorted(float(x) for x in thresholds))
    domains = variable_domains(R, C)
    total = _check_budget(domains, budget)
    q = max(domains)
    seen: dict[bytes, int] = {}
    scanned = 0
    for s in range(0, total, CHUNK):
        A = assignment_block(domains, s, min(s + CHUNK, total))
        if dominant is not None:
            A = A[dominant_mask(A, C, dominant, q)]
        scanned += len(A)
        if not len(A):
            continue
        V = clause_values(R, C, A)
        rows, first = np.unique(V, axis=0, return_index=True)
        for row in rows:
            seen.setdefault(row.tobytes(), int((row != 0).sum()))
    weights = np.array(sorted(seen.values()))
    counts = tuple(int(np.searchsorted(weights, t, side="right")) for t in thresholds)
    return Census(thresholds, counts, len(seen), int((weights > 0).sum()), scanned)


def part_invariant(R: ValuedRelation, C: Instance, part: int,
                   budget: int = DEFAULT_BUDGET) -> bool:
    """Whether every codeword ignores the symbols placed on one part."""
    if C.kind != "rpartite":
        raise ValueError("part invariance needs an r-partite instance")
    domains = variable_domains(R, C)
    _check_budget(domains, budget)
    n = C.n
    others = [v for v in range(C.num_variables) if not part * n <= v < (part + 1) * n]
    rest = assignment_block([domains[v] for v in others], 0,
                            math.prod(domains[v] for v in others))
    fill = assignment_block(domains[part * n:(part + 1) * n], 0,
                            math.prod(domains[part * n:(part + 1) * n]))
    for row in rest:
        A = np.empty((len(fill), C.num_variables), dtype=np.int64)
        A[:, others] = row
        A[:, part * n:(part + 1) * n] = fill
        V = clause_values(R, C, A)
        if (V != V[0]).any():
            return False
    return True


def fit_census_exponent(counts: dict[int, int], lam: float) -> float:
    """Smallest A with ``count(n) <= n**(A * lam)`` at every fitted n."""
    return max(math.log(c) / (lam * math.log(n)) for n, c in counts.items())


# -- random-instance statistics ---------------------------------------------------

def tight_coverage_statistic(C: Instance, size: int) -> int:
    """Distinct ``size``-subsets of variables contained in at least one clause."""
    if not 0 <= size <= C.r:
        raise ValueError("subset size must lie in 0..r")
    gv = np.sort(C.global_variables(), axis=1)
    covered = set()
    for cols in itertools.combinations(range(C.r), size):
        covered.update(map(tuple, np.unique(gv[:, cols], axis=0).tolist()))
    return len(covered)


# -- closed-form values on complete uniform instances ------------------------------

def profile_value(R: ValuedRelation, counts: Sequence[int]) -> int:
    """sat on the complete uniform instance of an assignment with the given
    symbol counts: sum over t of R(t) * prod_d P(counts_d, #_d(t))."""
    if not R.single_domain:
        raise RelationError("profile values need a single domain")
    total = 0
    for t, v in zip(R.support_array(), R.flat[R.flat != 0]):
        h = np.bincount(t, minlength=R.q)
        total += int(v) * math.prod(math.perm(int(a), int(b)) for a, b in zip(counts, h))
    return total


def min_sat_profile(R: ValuedRelation, n: int) -> list[int]:
    """sat by Hamming weight w = 0..n of a Boolean relation's complete uniform instance."""
    if not R.is_boolean:
        raise RelationError("min_sat_profile needs a Boolean relation")
    return [profile_value(R, (n - w, w)) for w in range(n + 1)]


def dominance_ratios(R: ValuedRelation, n: int) -> list[Fraction]:
    """``sat / (max(1, n - l) * n**(r - c))`` for every weight with sat > 0,
    where l is the majority count."""
    c = boolean_uniform_exponent(R)
    out = []
    for w, s in enumerate(min_sat_profile(R, n)):
        if s > 0:
            minority = n - max(w, n - w)
            out.append(Fraction(s, max(1, minority) * n ** (R.r - c)))
    return out


def _profiles(q: int, n: int) -> list[tuple[int, ...]]:
    if q == 1:
        return [(n,)]
    return [(a,) + rest for a in range(n, -1, -1) for rest in _profiles(q - 1, n - a)]


@dataclass(frozen=True)
class Separation:
    ratio: Fraction
    profile: tuple[int, ...]
    other: tuple[int, ...]
    distance: int

    @property
    def delta(self) -> Fraction:
        return self.ratio - 1


def value_separation(R: ValuedRelation, n: int) -> Separation:
    """Largest ``sat(psi) / sat(psi')`` over count profiles at Hamming
    distance at most n/2, both values positive."""
    P = _profiles(R.q, n)
    vals = [profile_value(R, p) for p in P]
    arr = np.array(P, dtype=np.int64)
    best = None
    for i, (p, v) in enumerate(zip(P, vals)):
        if v == 0:
            continue
        dist = np.abs(arr - arr[i]).sum(axis=1) // 2
        for j in np.flatnonzero(dist <= n // 2):
            w = vals[j]
            if w == 0:
                continue
            ratio = Fraction(v, w)
            if best is None or ratio > best.ratio:
                best = Separation(ratio, p, P[j], int(dist[j]))
    if best is None:
        raise RelationError("no assignment has positive value")
    return best


__all__ = ["BudgetError", "Census", "DEFAULT_BUDGET", "Separation", "VerifyReport",
           "WitnessFamily", "codeword_census", "dominance_ratios", "dominant_mask",
           "exhaustive_verify", "fit_census_exponent", "min_sat_profile", "part_invariant",
           "profile_value", "sat_table", "tight_coverage_statistic", "value_separation",
           "witness_family_rpartite", "witness_family_uniform"]
