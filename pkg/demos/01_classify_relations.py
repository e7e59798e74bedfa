"""
Classifying relations
=====================

Tuple-level structure (AND restrictions, extreme tuples) and
histogram-level structure (symmetrization, plentifulness, marginals)
decide which sampler a relation gets and how many clauses it keeps.
"""

from cspsparse.histogram_core import classify, precise_plentifulness, symmetrize
from cspsparse.relation_core import ValuedRelation, extreme_tuples, max_and_arity

# The cut relation on two Boolean coordinates.
cut = ValuedRelation.from_strings(2, ["01", "10"])
c, witness = max_and_arity(cut)
print("cut: AND arity", c, "via sets", witness.sets)

# A ternary relation whose third coordinate is free next to 00.
and2 = ValuedRelation.from_strings(2, ["000", "001"])
print("{000,001}: AND arity", max_and_arity(and2)[0], "extreme tuples", extreme_tuples(and2))

# Two valued relations that sit in the hardest regime.
R1 = ValuedRelation.from_strings(2, ["00", "01", "11"], [1, 2, 1])
R2 = ValuedRelation.from_strings(3, ["0022", "1122", "0222", "1222", "0122", "2201"])
for name, R in [("R1", R1), ("R2", R2)]:
    S = symmetrize(R)
    print(name, "Sym support:", {h: S(h) for h in S.support()})
    print(name, "plentifulness:", precise_plentifulness(S))

# The full report, as the CLI ``analyze`` command prints it.
print(classify(R2).to_text())
