"""
Sparsifying the complete cut instance
=====================================

Plan a sample size from the classification, draw i.i.d. clauses with
reweighting, and check every one of the 2^14 assignments exactly.
"""

from fractions import Fraction

from cspsparse.histogram_core import classify
from cspsparse.instance import complete
from cspsparse.relation_core import ValuedRelation
from cspsparse.sparsify import failure_probability_bound, iid_sample, plan
from cspsparse.verify import exhaustive_verify

cut = ValuedRelation.from_strings(2, ["01", "10"])
n, eps = 14, Fraction(1, 4)
C = complete("uniform", n, 2)

p = plan(classify(cut), n, C.m, eps)
print(f"m = {C.m}, recommended sample = {p.recommended} (plan: {p.mode})")

# The recommendation exceeds m here, so the plan keeps everything; sampling
# at the recommended size anyway shows the reweighting at work.
for seed in range(3):
    rep = exhaustive_verify(cut, C, iid_sample(C, p.recommended, seed), eps)
    print(f"seed {seed}: max deviation {float(rep.max_deviation):.4f}, passed {rep.passed}")

# Per-assignment tail bound for a cut of size a.
for a in (1, 3, 7):
    wt = 2 * a * (n - a)
    print(f"a={a}: failure bound {failure_probability_bound(p.recommended, wt, 1, C.m, eps):.3e}")
