"""
Instances and exact values
==========================

Complete and random instances in the three layouts, evaluated exactly.
Values on a complete uniform instance depend only on the symbol counts,
and the symmetrized relation on unordered sets gives the same numbers.
"""

import numpy as np

from cspsparse.histogram_core import symmetrize
from cspsparse.instance import complete, format_instance, random_instance, sat_value
from cspsparse.relation_core import ValuedRelation
from cspsparse.verify import sat_table

R = ValuedRelation.from_strings(3, ["012", "001", "220"], [2, 1, 1])

C = complete("uniform", 5, 3)
print("complete uniform n=5, r=3 has", C.m, "clauses")
psi = (0, 1, 2, 0, 2)
print("sat at", psi, "=", sat_value(R, C, psi))

# Every assignment at once, then the same table through Sym on 3-sets.
ordered = sat_table(R, complete("uniform", 6, 3))
unordered = sat_table(symmetrize(R), complete("symset", 6, 3))
print("ordered and unordered tables agree:", np.array_equal(ordered, unordered))

# Random instances are seeded and serialize to a plain text format.
rnd = random_instance("rpartite", 4, 3, 5, seed=7)
print(format_instance(rnd))
