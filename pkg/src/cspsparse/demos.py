"""End-to-end fixtures: generate, sparsify and verify at desk scale."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .histogram_core import classify
from .instance import complete, random_instance
from .relation_core import ValuedRelation
from .sparsify import DEFAULT_KAPPA, apply_plan, iid_sample, plan
from .verify import exhaustive_verify

CUT = ValuedRelation.from_strings(2, ["01", "10"])
R1 = ValuedRelation.from_strings(2, ["00", "01", "11"], [1, 2, 1])
R2 = ValuedRelation.from_strings(3, ["0022", "1122", "0222", "1222", "0122", "2201"])
FULL = ValuedRelation.from_strings(2, ["00", "01", "10", "11"])


@dataclass
class DemoResult:
    name: str
    ok: bool
    lines: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)


def demo_r2_nonmonotone(trials: int = 10, n: int = 10, eps=Fraction(1, 2),
                        kappa: float = DEFAULT_KAPPA, log: Callable[[str], None] = print
                        ) -> DemoResult:
    eps = Fraction(eps)
    res = DemoResult("r2-nonmonotone", False)

    def say(s):
        res.lines.append(s)
        log(s)

    report = classify(R2)
    r, k = report.r, report.k
    say(f"R2: r={r}, k={k}, case {report.case}; threshold n^{r - k + 1} = {n ** (r - k + 1)}")
    low_m = math.floor(n ** (r - k + 1) / kappa)
    low = plan(report, n, low_m, eps, kappa=kappa)
    C = random_instance("uniform", n, r, low_m, 0)
    low_ok = low.mode == "keep-all" and low.flag == "no-nontrivial-sparsification"
    low_rep = exhaustive_verify(R2, C, apply_plan(low, C, 0), eps)
    say(f"m={low_m}: plan {low.mode} ({low.flag}); kept {C.m} clauses, "
        f"deviation {float(low_rep.max_deviation):.4f}")
    high_m = math.ceil(kappa * n ** (r - k + 1) / float(eps) ** 2)
    high = plan(report, n, high_m, eps, kappa=kappa)
    bound = math.factorial(r) * kappa * n ** (r - k) * math.log(n)
    say(f"m={high_m}: plan {high.mode}, {high.ell} sets, size bound r!*kappa*n^{r - k}*ln n "
        f"= {bound:.0f}")
    passes = 0
    for s in range(trials):
        C = random_instance("uniform", n, r, high_m, 1000 + s)
        C_hat = apply_plan(high, C, s)
        rep = exhaustive_verify(R2, C, C_hat, eps)
        size = C_hat.distinct_clauses
        ok = rep.passed and size <= bound and high.mode == "bundled"
        passes += ok
        say(f"  seed {s}: {size} clauses, deviation {float(rep.max_deviation):.4f} "
            f"{'pass' if ok else 'FAIL'}")
    need = math.ceil(0.8 * trials)
    res.ok = low_ok and low_rep.passed and passes >= need
    res.data = {"low_mode": low.mode, "low_flag": low.flag, "high_mode": high.mode,
                "passes": passes, "trials": trials}
    say(f"{'ok' if res.ok else 'failed'}: keep-all below threshold, "
        f"{passes}/{trials} verified bundled sparsifiers above")
    return res


def demo_cut(trials: int = 10, n: int = 14, eps=Fraction(1, 4), kappa: float = DEFAULT_KAPPA,
             log: Callable[[str], None] = print) -> DemoResult:
    eps = Fraction(eps)
    res = DemoResult("cut", False)

    def say(s):
        res.lines.append(s)
        log(s)

    C = complete("uniform", n, 2)
    p = plan(classify(CUT), n, C.m, eps, kappa=kappa)
    say(f"cut, complete uniform n={n}: m={C.m}, planned size {p.recommended} -> {p.mode}")
    passes = 0
    for s in range(trials):
        rep = exhaustive_verify(CUT, C, iid_sample(C, p.recommended, s), eps)
        passes += rep.passed
        say(f"  seed {s}: deviation {float(rep.max_deviation):.4f} "
            f"{'pass' if rep.passed else 'FAIL'}")
    res.ok = passes >= math.ceil(0.9 * trials)
    res.data = {"passes": passes, "trials": trials, "ell": p.recommended}
    say(f"{'ok' if res.ok else 'failed'}: {passes}/{trials} seeds within eps={eps}")
    return res


def demo_full_relation(trials: int = 1, n: int = 8, eps=Fraction(1, 4),
                       kappa: float = DEFAULT_KAPPA, log: Callable[[str], None] = print
                       ) -> DemoResult:
    res = DemoResult("full-relation", False)
    C = complete("uniform", n, 2)
    p = plan(classify(FULL), n, C.m, eps, kappa=kappa)
    C_hat = apply_plan(p, C, 0)
    rep = exhaustive_verify(FULL, C, C_hat, eps)
    res.ok = p.mode == "single-constraint" and rep.max_deviation == 0 and C_hat.m == 1
    res.data = {"mode": p.mode, "weight": str(C_hat.weights[0]),
                "deviation": str(rep.max_deviation)}
    for s in (f"full relation, complete uniform n={n}: plan {p.mode}",
              f"one clause of weight {C_hat.weights[0]}, deviation {rep.max_deviation}"):
        res.lines.append(s)
        log(s)
    return res


DEMOS: dict[str, Callable[..., DemoResult]] = {
    "r2-nonmonotone": demo_r2_nonmonotone,
    "cut": demo_cut,
    "full-relation": demo_full_relation,
}


def run_demo(name: str, **kwargs) -> DemoResult:
    try:
        fn = DEMOS[name]
    except KeyError:
        raise KeyError(f"unknown demo {name!r}; available: {', '.join(DEMOS)}") from None
    return fn(**kwargs)
