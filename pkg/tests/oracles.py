"""Brute-force reference implementations, written from the definitions with
plain loops and no library code beyond the relation's value lookup."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction


def table(R) -> dict[tuple, int]:
    """Plain dict view of a relation's value table."""
    return {tuple(int(x) for x in t): int(v) for t, v in zip(R.tuples(), R.flat)}


def and_arity(domains, T: dict) -> int:
    """Max number of size-2 sets over all boxes holding exactly one support tuple."""
    opts = []
    for q in domains:
        opts.append([(d,) for d in range(q)] + list(itertools.combinations(range(q), 2)))
    best = -1
    for box in itertools.product(*opts):
        hits = sum(1 for t in itertools.product(*box) if T[t])
        if hits == 1:
            best = max(best, sum(len(E) == 2 for E in box))
    return best


def sym(T: dict, q: int, r: int) -> dict[tuple, int]:
    out: Counter = Counter()
    for t, v in T.items():
        h = tuple(t.count(d) for d in range(q))
        out[h] += v
    return {h: v * math.prod(math.factorial(x) for x in h) for h, v in out.items()}


def plentifulness(S: dict, q: int) -> int:
    supp = [h for h, v in S.items() if v]
    k = None
    for d in range(q):
        for h in supp:
            best = max(g[d] for g in supp
                       if all(g[e] <= h[e] for e in range(q) if e != d))
            k = best if k is None else min(k, best)
    return k


def sat_uniform(T: dict, n: int, r: int, psi) -> int:
    return sum(T[tuple(psi[v] for v in S)] for S in itertools.permutations(range(n), r))


def sat_symset(S: dict, q: int, n: int, r: int, psi) -> int:
    total = 0
    for T in itertools.combinations(range(n), r):
        vals = [psi[v] for v in T]
        total += S.get(tuple(vals.count(d) for d in range(q)), 0)
    return total


def sat_instance(T: dict, clauses, weights, psi, offsets=None) -> Fraction:
    total = Fraction(0)
    for clause, w in zip(clauses, weights):
        vs = clause if offsets is None else [v + o for v, o in zip(clause, offsets)]
        total += Fraction(w) * T[tuple(psi[v] for v in vs)]
    return total


def irrelevant_pairs(T: dict, domains, t) -> tuple[int, set, list]:
    """(c, irrelevant pairs, minimum-distance family) relative to t."""
    supp = [s for s, v in T.items() if v]
    c = and_arity(domains, T)
    fam = [s for s in supp if sum(a != b for a, b in zip(s, t)) == c]
    used = {(i, s[i]) for s in fam for i in range(len(t)) if s[i] != t[i]}
    irr = {(i, d) for i, q in enumerate(domains) for d in range(q)
           if d == t[i] or (i, d) not in used}
    return c, irr, fam


def classes(T: dict, t, irr) -> dict[tuple, list]:
    out: dict = {}
    for s in T:
        key = tuple(t[i] if (i, x) in irr else x for i, x in enumerate(s))
        out.setdefault(key, []).append(s)
    return out


def closure_violations(T: dict, domains, t) -> int:
    c, irr, fam = irrelevant_pairs(T, domains, t)
    bad = 0
    for s in fam:
        choices = [(s[i],) if s[i] != t[i] else [d for d in range(q) if (i, d) in irr]
                   for i, q in enumerate(domains)]
        bad += sum(1 for u in itertools.product(*choices) if not T[u])
    return bad


def profile_sat(T: dict, q: int, counts) -> int:
    """sat of a count profile on the complete uniform instance, by building
    one concrete assignment and enumerating ordered tuples."""
    psi = [d for d in range(q) for _ in range(counts[d])]
    r = len(next(iter(T)))
    return sat_uniform(T, len(psi), r, psi)
