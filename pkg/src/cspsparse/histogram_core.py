"""Histogram algebra for the uniform model.

A D-histogram of arity r is a count vector ``h`` with ``sum(h) == r``.
``Hist^D_r`` is enumerated in ascending lexicographic order by a
stars-and-bars recursion, and every table indexed by histograms uses that
order.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

import numpy as np

from .relation_core import (
    EmptySupportError,
    RelationError,
    RestrictionWitness,
    ValuedRelation,
    boolean_uniform_exponent,
    first_nonuniform_and,
    max_and_arity,
    product_array,
)

Hist = tuple[int, ...]


def iter_histograms(q: int, r: int) -> Iterable[Hist]:
    """Count vectors of length q summing to r, ascending lex order."""
    if q == 1:
        yield (r,)
        return
    for first in range(r + 1):
        for rest in iter_histograms(q - 1, r - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def histograms(q: int, r: int) -> np.ndarray:
    out = np.array(list(iter_histograms(q, r)), dtype=np.int64).reshape(-1, q)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def histogram_rank(q: int, r: int) -> dict[Hist, int]:
    return {tuple(int(x) for x in h): i for i, h in enumerate(histograms(q, r))}


@lru_cache(maxsize=None)
def tuple_histogram_index(q: int, r: int) -> np.ndarray:
    """For every tuple of ``[q]^r`` (lex order) the rank of its histogram."""
    tuples = product_array((q,) * r)
    counts = np.zeros((len(tuples), q), dtype=np.int64)
    for d in range(q):
        counts[:, d] = (tuples == d).sum(axis=1)
    rank = histogram_rank(q, r)
    out = np.array([rank[tuple(int(x) for x in c)] for c in counts], dtype=np.int64)
    out.setflags(write=False)
    return out


def hist_of(t: Sequence[int], q: int) -> Hist:
    counts = [0] * q
    for x in t:
        counts[x] += 1
    return tuple(counts)


@lru_cache(maxsize=None)
def _factorial_weights(q: int, r: int) -> np.ndarray:
    return np.array([math.prod(math.factorial(x) for x in h) for h in histograms(q, r)],
                    dtype=np.int64)


@dataclass(frozen=True, eq=False)
class SymmetricValuedRelation:
    """A map ``S : Hist^D_r -> Z_{>=0}`` stored in ``histograms(q, r)`` order."""

    q: int
    r: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.int64).reshape(-1)
        if len(values) != math.comb(self.r + self.q - 1, self.q - 1):
            raise RelationError("value table does not cover Hist^D_r")
        if (values < 0).any():
            raise RelationError("values must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, q: int, r: int, mapping: dict[Hist, int]) -> "SymmetricValuedRelation":
        rank = histogram_rank(q, r)
        values = np.zeros(len(rank), dtype=np.int64)
        for h, v in mapping.items():
            values[rank[tuple(h)]] = v
        return cls(q, r, values)

    @property
    def hists(self) -> np.ndarray:
        return histograms(self.q, self.r)

    def value(self, h: Sequence[int]) -> int:
        return int(self.values[histogram_rank(self.q, self.r)[tuple(h)]])

    def __call__(self, h: Sequence[int]) -> int:
        return self.value(h)

    def support_array(self) -> np.ndarray:
        return self.hists[self.values > 0]

    def support(self) -> list[Hist]:
        return [tuple(int(x) for x in h) for h in self.support_array()]

    def require_support(self) -> None:
        if not (self.values > 0).any():
            raise EmptySupportError("symmetric relation has empty support")

    def as_tuple_table(self) -> np.ndarray:
        """Value of ``hist(t)`` for every tuple ``t`` of ``[q]^r``, lex order."""
        return self.values[tuple_histogram_index(self.q, self.r)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymmetricValuedRelation):
            return NotImplemented
        return (self.q, self.r) == (other.q, other.r) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.q, self.r, self.values.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{h}:{self.value(h)}" for h in self.support())
        return f"SymmetricValuedRelation(q={self.q}, r={self.r}, {{{body}}})"


def symmetrize(R: ValuedRelation) -> SymmetricValuedRelation:
    """``Sym(R)(h) = prod_d h_d! * sum_{hist(t)=h} R(t)``."""
    if not R.single_domain:
        raise RelationError("symmetrization needs one shared domain")
    q, r = R.q, R.r
    if R.W and R.W > (2 ** 62) // (q ** r * math.factorial(r)):
        raise OverflowError("relation values too large for exact int64 symmetrization")
    idx = tuple_histogram_index(q, r)
    sums = np.zeros(len(histograms(q, r)), dtype=np.int64)
    np.add.at(sums, idx, R.flat)
    return SymmetricValuedRelation(q, r, sums * _factorial_weights(q, r))


# -- plentifulness and tightness -------------------------------------------

def _below_except(H: np.ndarray, d: int) -> np.ndarray:
    """``M[a, b]`` is True when ``H[b]_e <= H[a]_e`` for every e != d."""
    le = H[None, :, :] <= H[:, None, :]
    le[:, :, d] = True
    return le.all(axis=2)


def precise_plentifulness(S: SymmetricValuedRelation) -> int:
    """Largest k such that S is k-plentiful.

    Equals the minimum over ``d`` and ``h`` in the support of the largest
    ``g_d`` among support histograms ``g`` that sit below ``h`` off ``d``.
    """
    S.require_support()
    H = S.support_array()
    best = S.r
    for d in range(S.q):
        M = _below_except(H, d)
        reach = np.where(M, H[None, :, d], -1).max(axis=1)
        best = min(best, int(reach.min()))
    return best


def is_tight(S: SymmetricValuedRelation, h: Sequence[int], d: int) -> bool:
    H = S.support_array()
    h = np.asarray(h, dtype=np.int64)
    if S.value(h) == 0:
        return False
    le = (H <= h)
    le[:, d] = True
    return int(le.all(axis=1).sum()) == 1


def tight_set(S: SymmetricValuedRelation, d: int, k: int) -> list[Hist]:
    """Support histograms with ``h_d == k`` that dominate no other support
    histogram off ``d``."""
    H = S.support_array()
    if len(H) == 0:
        return []
    M = _below_except(H, d)
    tight = (M.sum(axis=1) == 1) & (H[:, d] == k)
    return [tuple(int(x) for x in h) for h in H[tight]]


def is_rigid(S: SymmetricValuedRelation, h: Sequence[int], d: int, E: Iterable[int]) -> bool:
    E = frozenset(E)
    if d not in E:
        raise ValueError(f"symbol {d} is not in E={sorted(E)}")
    h = tuple(int(x) for x in h)
    if S.value(h) == 0:
        raise ValueError(f"{h} is not in the support")
    if any(h[e] for e in E if e != d):
        return False
    H = S.support_array()
    outside = [e for e in range(S.q) if e not in E]
    below = (H[:, outside] <= np.asarray(h)[outside]).all(axis=1)
    mass = H[below][:, sorted(E)].sum(axis=1)
    return bool((mass == h[d]).all())


def uncontrolled(S: SymmetricValuedRelation, h: Sequence[int], d: int,
                 check: bool = True) -> frozenset[int]:
    """Symbols e for which h is (d, {d, e})-rigid."""
    h = tuple(int(x) for x in h)
    if not is_tight(S, h, d):
        raise ValueError(f"{h} is not {d}-tight")
    U = frozenset(e for e in range(S.q) if is_rigid(S, h, d, {d, e}))
    if check and h[d] == precise_plentifulness(S):
        for e in U:
            swapped = list(h)
            swapped[d], swapped[e] = swapped[e], swapped[d]
            assert tuple(swapped) in tight_set(S, e, h[d]), (h, d, e)
    return U


@dataclass(frozen=True)
class MarginalPredicate:
    """``S_{h,E}``: the table over ``Hist^E_k`` (k = h(E)) obtained by
    splicing each E-histogram into h."""

    h: Hist
    symbols: tuple[int, ...]
    predicate: SymmetricValuedRelation

    @property
    def uniform(self) -> bool:
        return bool((self.predicate.values == self.predicate.values[0]).all())

    def items(self) -> list[tuple[Hist, int]]:
        return [(tuple(int(x) for x in g), int(v))
                for g, v in zip(self.predicate.hists, self.predicate.values)]


def splice(g: Sequence[int], E: Sequence[int], h: Sequence[int]) -> Hist:
    out = list(h)
    for e in E:
        out[e] = 0
    for e, x in zip(E, g):
        out[e] = int(x)
    return tuple(out)


def marginal_predicate(S: SymmetricValuedRelation, h: Sequence[int],
                       E: Iterable[int]) -> MarginalPredicate:
    E = tuple(sorted(set(E)))
    h = tuple(int(x) for x in h)
    if not any(is_rigid(S, h, d, E) for d in E):
        raise ValueError(f"{h} is not (d, {set(E)})-rigid for any d in E")
    k = sum(h[e] for e in E)
    values = [S.value(splice(g, E, h)) for g in histograms(len(E), k)]
    return MarginalPredicate(h, E, SymmetricValuedRelation(len(E), k, values))


def _subsets_containing(q: int, d: int) -> list[tuple[int, ...]]:
    others = [e for e in range(q) if e != d]
    out = []
    for size in range(len(others) + 1):
        for rest in itertools.combinations(others, size):
            out.append(tuple(sorted((d,) + rest)))
    return sorted(out)


@dataclass(frozen=True)
class RigidCertificate:
    h: Hist
    d: int
    E: tuple[int, ...]
    marginal: tuple[tuple[Hist, int], ...]
    uniform: bool


def rigid_triples(S: SymmetricValuedRelation, k: int | None = None) -> list[RigidCertificate]:
    """Every (h, d, E) with h in T_{d,k} and h (d, E)-rigid, in lex order."""
    if k is None:
        k = precise_plentifulness(S)
    out = []
    for d in range(S.q):
        for h in tight_set(S, d, k):
            for E in _subsets_containing(S.q, d):
                if is_rigid(S, h, d, E):
                    m = marginal_predicate(S, h, E)
                    out.append(RigidCertificate(h, d, E, tuple(m.items()), m.uniform))
    return out


@dataclass(frozen=True)
class SvrViolation:
    h: Hist
    d: int
    E: tuple[int, ...]
    g: Hist
    g2: Hist
    values: tuple[int, int]


def is_marginally_uniform_svr(S: SymmetricValuedRelation, k: int | None = None
                              ) -> tuple[bool, SvrViolation | None]:
    for cert in rigid_triples(S, k):
        if not cert.uniform:
            (g, v), = cert.marginal[:1]
            g2, v2 = next((x, w) for x, w in cert.marginal if w != v)
            return False, SvrViolation(cert.h, cert.d, cert.E, g, g2, (v, v2))
    return True, None


def tuple_class_key(t: Sequence[int], E: Iterable[int]) -> Hist:
    """Key of the tuple relation ~_E: symbols in E collapse, others are kept."""
    E = set(E)
    return tuple(-1 if x in E else int(x) for x in t)


@dataclass(frozen=True)
class VrViolation:
    s: tuple[int, ...]
    t: tuple[int, ...]
    E: tuple[int, ...]
    d: int
    h: Hist
    values: tuple[int, int]


def is_marginally_uniform_vr(R: ValuedRelation, k: int | None = None
                             ) -> tuple[bool, VrViolation | None]:
    """Tuple-level marginal uniformity.

    ``s ~_E t`` means the two tuples use E at the same coordinates and agree
    everywhere else.
    """
    S = symmetrize(R)
    if k is None:
        k = precise_plentifulness(S)
    tuples = R.tuples()
    flat = R.flat
    hidx = tuple_histogram_index(R.q, R.r)
    rank = histogram_rank(R.q, R.r)
    for cert in rigid_triples(S, k):
        E = cert.E
        in_E = np.isin(tuples, E)
        for si in np.flatnonzero(hidx == rank[cert.h]):
            s = tuples[si]
            same = ((in_E == in_E[si]) & ((tuples == s) | in_E)).all(axis=1)
            diff = same & (flat != flat[si])
            if diff.any():
                ti = int(np.flatnonzero(diff)[0])
                return False, VrViolation(tuple(int(x) for x in s),
                                          tuple(int(x) for x in tuples[ti]), E, cert.d,
                                          cert.h, (int(flat[si]), int(flat[ti])))
    return True, None


def svr_sandwich(S: SymmetricValuedRelation, E: Iterable[int]
                 ) -> tuple[SymmetricValuedRelation, SymmetricValuedRelation]:
    """Min and max of S over histograms with equal counts outside E."""
    outside = [e for e in range(S.q) if e not in set(E)]
    keys = [tuple(int(x) for x in h[outside]) for h in S.hists]
    lo, hi = _group_min_max(S.values, keys)
    return SymmetricValuedRelation(S.q, S.r, lo), SymmetricValuedRelation(S.q, S.r, hi)


def vr_sandwich(R: ValuedRelation, E: Iterable[int]) -> tuple[ValuedRelation, ValuedRelation]:
    E = set(E)
    keys = [tuple_class_key(t, E) for t in R.tuples()]
    lo, hi = _group_min_max(R.flat, keys)
    return ValuedRelation(R.domains, lo), ValuedRelation(R.domains, hi)


def _group_min_max(values: np.ndarray, keys: list) -> tuple[np.ndarray, np.ndarray]:
    lo: dict = {}
    hi: dict = {}
    for key, v in zip(keys, values):
        v = int(v)
        lo[key] = min(lo.get(key, v), v)
        hi[key] = max(hi.get(key, v), v)
    return (np.array([lo[k] for k in keys], dtype=np.int64),
            np.array([hi[k] for k in keys], dtype=np.int64))


# -- classification ---------------------------------------------------------

CASE_TEXT = {
    1: "symmetrization not marginally uniform",
    2: "relation marginally uniform",
    3: "symmetrization marginally uniform, relation not",
}


@dataclass(frozen=True)
class ClassificationReport:
    domains: tuple[int, ...]
    c: int
    and_witness: RestrictionWitness
    c_hat: int
    nonuniform_and: RestrictionWitness | None
    is_full: bool
    boolean_exponent: int | None = None
    k: int | None = None
    tight_sets: dict[tuple[int, int], list[Hist]] | None = None
    rigid: list[RigidCertificate] | None = None
    svr_uniform: bool | None = None
    svr_violation: SvrViolation | None = None
    vr_uniform: bool | None = None
    vr_violation: VrViolation | None = None
    case: int | None = None

    @property
    def r(self) -> int:
        return len(self.domains)

    @property
    def uniform_model(self) -> bool:
        return self.k is not None

    # recommended complete-instance sparsifier, uniform model
    @property
    def exponent(self) -> int | None:
        if self.case is None:
            return None
        return self.r - self.k + (1 if self.case == 1 else 0)

    @property
    def eps_power(self) -> int | None:
        if self.case is None:
            return None
        return 2 if self.case == 1 else 3

    @property
    def source(self) -> str | None:
        return {1: "coarse-upper-bound", 2: "iid-marginally-uniform",
                3: "bundled-symmetric"}.get(self.case)

    @property
    def sampler(self) -> str | None:
        return {1: "iid", 2: "iid", 3: "bundled"}.get(self.case)

    def random_model(self) -> dict[str, str]:
        """Size expressions for random instances with m clauses."""
        out = {"rpartite": f"min(m, n^{self.c_hat})"}
        if self.case == 1:
            out["uniform"] = f"min(m, n^{self.exponent}/eps^2)"
        elif self.case == 2:
            out["uniform"] = f"min(m, n^{self.exponent}/eps^3)"
        elif self.case == 3:
            e = self.r - self.k
            out["uniform"] = (f"n^{e}/eps^3 if m >= kappa*n^{e + 1}/eps^2; "
                              f"m if m <= n^{e + 1}/kappa'; indeterminate between")
        return out

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "r": self.r,
            "domains": list(self.domains),
            "c": self.c,
            "and_witness": _witness_dict(self.and_witness),
            "c_hat": self.c_hat,
            "nonuniform_and": _witness_dict(self.nonuniform_and),
            "full": self.is_full,
            "boolean_exponent": self.boolean_exponent,
        }
        if self.uniform_model:
            d.update({
                "k": self.k,
                "tight_sets": {f"{dd},{kk}": [list(h) for h in hs]
                               for (dd, kk), hs in sorted(self.tight_sets.items())},
                "rigid": [{"h": list(x.h), "d": x.d, "E": list(x.E),
                           "marginal": [[list(g), v] for g, v in x.marginal],
                           "uniform": x.uniform} for x in self.rigid],
                "svr_marginally_uniform": self.svr_uniform,
                "svr_violation": None if self.svr_violation is None else {
                    "h": list(self.svr_violation.h), "d": self.svr_violation.d,
                    "E": list(self.svr_violation.E), "g": list(self.svr_violation.g),
                    "g2": list(self.svr_violation.g2),
                    "values": list(self.svr_violation.values)},
                "vr_marginally_uniform": self.vr_uniform,
                "vr_violation": None if self.vr_violation is None else {
                    "s": list(self.vr_violation.s), "t": list(self.vr_violation.t),
                    "E": list(self.vr_violation.E), "d": self.vr_violation.d,
                    "h": list(self.vr_violation.h),
                    "values": list(self.vr_violation.values)},
                "case": self.case,
                "case_text": CASE_TEXT[self.case],
                "exponent": self.exponent,
                "eps_power": self.eps_power,
                "source": self.source,
                "sampler": self.sampler,
            })
        d["random_model"] = self.random_model() if self.uniform_model else {
            "rpartite": f"min(m, n^{self.c_hat})"}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_text(self) -> str:
        d = self.to_dict()
        lines = []
        for key, value in d.items():
            if isinstance(value, dict) and value:
                lines.append(f"{key}:")
                lines.extend(f"  {k}: {_fmt(v)}" for k, v in value.items())
            elif isinstance(value, list) and value and isinstance(value[0], dict):
                lines.append(f"{key}:")
                for item in value:
                    lines.append("  -")
                    lines.extend(f"    {k}: {_fmt(v)}" for k, v in item.items())
            else:
                lines.append(f"{key}: {_fmt(value)}")
        return "\n".join(lines) + "\n"


def _fmt(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def _witness_dict(w: RestrictionWitness | None) -> dict[str, Any] | None:
    if w is None:
        return None
    return {"sets": [list(E) for E in w.sets], "distinguished": list(w.distinguished),
            "survivor": None if w.survivor is None else list(w.survivor),
            "marked": None if w.marked is None else list(w.marked),
            "values": list(w.values), "uniform": w.uniform}


def classify(R: ValuedRelation) -> ClassificationReport:
    """Full classification; the uniform-model part needs a shared domain."""
    R.require_support()
    c, witness = max_and_arity(R)
    bad_and = first_nonuniform_and(R, c)
    base = dict(domains=R.domains, c=c, and_witness=witness,
                c_hat=c if bad_and is None else c + 1, nonuniform_and=bad_and,
                is_full=R.is_full,
                boolean_exponent=(boolean_uniform_exponent(R)
                                  if R.is_boolean and R.is_zero_one else None))
    if not R.single_domain:
        return ClassificationReport(**base)
    S = symmetrize(R)
    k = precise_plentifulness(S)
    tight = {}
    for d in range(R.q):
        for kk in range(R.r + 1):
            hs = tight_set(S, d, kk)
            if hs:
                tight[(d, kk)] = hs
    rigid = rigid_triples(S, k)
    svr_ok, svr_bad = is_marginally_uniform_svr(S, k)
    vr_ok, vr_bad = is_marginally_uniform_vr(R, k)
    # a marginally uniform relation always has a marginally uniform symmetrization
    assert svr_ok or not vr_ok
    case = 1 if not svr_ok else (2 if vr_ok else 3)
    return ClassificationReport(**base, k=k, tight_sets=tight, rigid=rigid,
                                svr_uniform=svr_ok, svr_violation=svr_bad,
                                vr_uniform=vr_ok, vr_violation=vr_bad, case=case)
