"""Sparsifier construction: size planning, i.i.d. sampling, bundled sampling."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .histogram_core import ClassificationReport
from .instance import (Instance, complete, decode_clauses, is_complete, make_rng,
                       universe_size)

DEFAULT_KAPPA = 8
MODES = ("iid", "bundled", "keep-all", "single-constraint")


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class SamplingPlan:
    """How to sparsify an instance with m clauses on n variables (per part).

    ``ell`` counts draws: clauses for ``iid``, r-sets for ``bundled``.
    ``weight`` is the factor applied to each kept clause, so that
    ``weight * ell`` equals the weight of the sampled universe.
    """

    mode: str
    ell: int
    weight: Fraction
    source: str
    kappa: float
    eps: Fraction
    exponent: int | None = None
    eps_power: int | None = None
    recommended: int | None = None
    output_clauses: int | None = None
    flag: str | None = None
    indeterminate: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weight"] = str(self.weight)
        d["eps"] = str(self.eps)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        return "".join(f"{k}: {'null' if v is None else v}\n" for k, v in self.to_dict().items())


def recommended_size(kappa: float, n: int, exponent: int, eps: Fraction, power: int) -> int:
    """``ceil(kappa * n**exponent * ln n / eps**power)``, at least 1."""
    value = kappa * n ** exponent * math.log(n) / float(eps) ** power
    return max(1, math.ceil(value))


def plan(report: ClassificationReport, n: int, m: int, eps, kind: str = "uniform",
         kappa: float = DEFAULT_KAPPA, kappa_prime: float | None = None,
         complete: bool = False) -> SamplingPlan:
    """Choose a sampler and sample size from a classification report.

    ``m`` is the clause count of the instance to sparsify.  Random instances
    in case 3 are judged against the m-thresholds; a ``complete`` instance
    always admits the bundled sampler.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise PlanError("eps must lie in (0, 1)")
    if n < 2 or m < 1:
        raise PlanError("need n >= 2 and m >= 1")
    r = report.r
    common = dict(kappa=kappa, eps=eps)

    def keep_all(source, **extra):
        return SamplingPlan("keep-all", m, Fraction(1), source, output_clauses=m,
                            **common, **extra)

    if report.is_full:
        return SamplingPlan("single-constraint", 1, Fraction(m), "full-relation",
                            exponent=0, eps_power=0, recommended=1, output_clauses=1, **common)

    if kind == "rpartite":
        exponent = report.c_hat
        power = 3 if report.c_hat == report.c else 2
        source = "rpartite-and" if power == 3 else "rpartite-nonuniform-and"
        return _iid_or_keep(m, recommended_size(kappa, n, exponent, eps, power), source,
                            exponent, power, common, keep_all)

    if kind not in ("uniform", "symset"):
        raise PlanError(f"unknown instance kind {kind!r}")
    if not report.uniform_model:
        raise PlanError("single-domain relation required for the uniform model")

    if report.boolean_exponent is not None:
        # c = 0 without the full cube still needs about n clauses
        exponent = max(report.boolean_exponent, 1)
        return _iid_or_keep(m, recommended_size(kappa, n, exponent, eps, 2),
                            "boolean-uniform", exponent, 2, common, keep_all)

    exponent, power = report.exponent, report.eps_power
    if report.case in (1, 2):
        return _iid_or_keep(m, recommended_size(kappa, n, exponent, eps, power),
                            report.source, exponent, power, common, keep_all)

    # case 3: the sampler depends on where m sits relative to n^(r-k+1)
    kp = kappa if kappa_prime is None else kappa_prime
    upper = kappa * n ** (exponent + 1) / float(eps) ** 2
    lower = n ** (exponent + 1) / kp
    sets = recommended_size(kappa, n, exponent, eps, power)
    out = math.factorial(r) * min(sets, math.comb(n, r))
    extra = dict(exponent=exponent, eps_power=power, recommended=out)
    if not complete and m <= lower:
        return keep_all(report.source, flag="no-nontrivial-sparsification", **extra)
    if not complete and m < upper:
        return keep_all(report.source, flag="indeterminate", indeterminate=True, **extra)
    if out >= m:
        return keep_all(report.source, **extra)
    return SamplingPlan("bundled", sets, Fraction(math.comb(n, r), sets), report.source,
                        output_clauses=out, **extra, **common)


def _iid_or_keep(m, ell, source, exponent, power, common, keep_all) -> SamplingPlan:
    extra = dict(exponent=exponent, eps_power=power, recommended=ell)
    if ell >= m:
        return keep_all(source, **extra)
    return SamplingPlan("iid", ell, Fraction(m, ell), source, output_clauses=ell,
                        **extra, **common)


def iid_sample(C: Instance, ell: int, seed: int) -> Instance:
    """Draw ``ell`` clauses of C uniformly with replacement.

    A kept clause j gets weight ``w_j * m / ell``, which keeps every
    assignment's value unbiased.
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    if C.m == 0:
        raise ValueError("cannot sample from an empty instance")
    return iid_select(C, make_rng(seed).integers(0, C.m, size=ell))


def iid_select(C: Instance, idx) -> Instance:
    """The i.i.d. sparsifier for an explicit sequence of drawn clause indices."""
    idx = np.asarray(idx, dtype=np.int64).ravel()
    num = [int(C.weight_num[j]) * C.m for j in idx]
    return _reduced(C.kind, C.n, C.r, C.clauses[idx], num, C.weight_den * len(idx))


def subsample(C: Instance, w: int, seed: int) -> Instance:
    """Keep ``w`` of C's clause positions, chosen uniformly without replacement.

    Applied to an i.i.d. sample this yields an i.i.d. sample of size w, so a
    sparsifier may be built from an m-sample drawn for other reasons.
    """
    if not 1 <= w <= C.m:
        raise ValueError("w must lie in 1..m")
    return iid_select(C, make_rng(seed).permutation(C.m)[:w])


def bundled_sample(C: Instance, ell: int, seed: int) -> Instance:
    """Draw ``ell`` r-sets with replacement and keep every ordering of each.

    The input must be a complete uniform or symset instance. Each output
    clause gets weight ``C(n, r) / ell`` times the input's common weight.
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    if C.kind not in ("uniform", "symset") or not is_complete(C):
        raise ValueError("bundled sampling needs a complete uniform or symset instance")
    n, r = C.n, C.r
    sets = decode_clauses("symset", n, r, make_rng(seed).integers(0, math.comb(n, r), size=ell))
    return bundle_sets(C, sets)


def bundle_sets(C: Instance, sets: np.ndarray) -> Instance:
    """Bundled sparsifier built from explicit sorted r-sets, one entry per draw."""
    sets = np.asarray(sets, dtype=np.int64).reshape(-1, C.r)
    ell, r = len(sets), C.r
    if C.kind == "uniform":
        perms = np.array(list(itertools.permutations(range(r))), dtype=np.int64)
        clauses = sets[:, perms].reshape(-1, r)
    else:
        clauses = sets
    w = int(C.weight_num[0]) * math.comb(C.n, r)
    return _reduced(C.kind, C.n, r, clauses, [w] * len(clauses), C.weight_den * ell)


def apply_plan(p: SamplingPlan, C: Instance, seed: int) -> Instance:
    """Run a plan against C. Bundled plans sample the complete universe and
    rescale it to C's total weight."""
    if p.mode == "keep-all":
        return C
    if p.mode == "single-constraint":
        return Instance(C.kind, C.n, C.r, C.clauses[:1], [sum(int(w) for w in C.weight_num)],
                        C.weight_den)
    if p.mode == "iid":
        return iid_sample(C, p.ell, seed)
    if p.mode == "bundled":
        full = complete(C.kind, C.n, C.r)
        return rescale(bundled_sample(full, p.ell, seed), C.total_weight / full.m)
    raise PlanError(f"unknown mode {p.mode!r}")


def rescale(C: Instance, factor) -> Instance:
    return C.scaled(factor)


def _reduced(kind, n, r, clauses, num, den) -> Instance:
    g = math.gcd(*num, den)
    return Instance(kind, n, r, clauses, [x // g for x in num], den // g)


def failure_probability_bound(ell, wt, W, m, eps) -> float:
    """Chernoff tail ``2 exp(-eps^2 ell wt / (3 W m))`` for one assignment."""
    return 2.0 * math.exp(-float(eps) ** 2 * ell * wt / (3.0 * W * m))


__all__ = ["DEFAULT_KAPPA", "MODES", "PlanError", "SamplingPlan", "apply_plan",
           "bundle_sets", "bundled_sample", "failure_probability_bound", "iid_sample", "iid_select", "plan",
           "recommended_size", "rescale", "subsample", "universe_size"]
