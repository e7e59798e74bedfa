"""
More clauses, smaller sparsifiers
=================================

For R2 a random instance just below n^3 clauses cannot be compressed,
yet far above that threshold the bundled sampler keeps about n^2 log n
sets. This runs the same pipeline as ``cspsparse demo r2-nonmonotone``
with fewer seeds.
"""

from cspsparse.demos import demo_r2_nonmonotone

result = demo_r2_nonmonotone(trials=3)
print("summary:", result.data)
