"""
Lower-bound witnesses and codeword counts
=========================================

Families of assignments with disjoint satisfied clauses force any
sparsifier to keep one clause per member. The codeword census counts how
many distinct satisfied-clause patterns low-weight assignments produce.
"""

from cspsparse.instance import complete
from cspsparse.relation_core import ValuedRelation, max_and_arity
from cspsparse.verify import (codeword_census, fit_census_exponent, part_invariant,
                              witness_family_rpartite, witness_family_uniform)

and2 = ValuedRelation.from_strings(2, ["000", "001"])
fam = witness_family_rpartite(and2, max_and_arity(and2)[1], 5)
print(f"r-partite family: {fam.size} members, disjoint={fam.disjoint}, "
      f"each satisfies {len(fam.satisfied[0])} clauses")

weight_one = ValuedRelation.from_strings(2, ["001", "010", "100"])
fam = witness_family_uniform(weight_one, 6)
print(f"uniform family: {fam.size} members with {fam.c} copies of {fam.symbol}, "
      f"clauses shared by at most {fam.max_shared}, so at least {fam.implied_bound} kept")

# Distinct codewords of weight <= 2 * (n/2) among 1-dominant assignments.
R = ValuedRelation.from_strings(2, ["00", "01"])
counts = {n: codeword_census(R, complete("rpartite", n, 2), [n], dominant=(1, 0)).counts[0]
          for n in (4, 6, 8)}
print("census:", counts, "fitted exponent", round(fit_census_exponent(counts, 2), 4))

print("third part never changes a codeword:", part_invariant(and2, complete("rpartite", 3, 3), 2))
