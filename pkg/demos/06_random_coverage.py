"""
Coverage of small variable sets in random instances
===================================================

Counting the distinct pairs that some clause contains is the quantity
behind the lower bound for random R2 instances: it tracks m while m is
small and saturates at C(n, 2) once m is large.
"""

import math

from cspsparse.instance import random_instance
from cspsparse.verify import tight_coverage_statistic

n = 20
pairs = math.comb(n, 2)
for m in (10, 47, 190, 760, 3000):
    covered = [tight_coverage_statistic(random_instance("uniform", n, 4, m, s), 2)
               for s in range(5)]
    print(f"m={m:5d}: covered pairs {covered} of {pairs}")
