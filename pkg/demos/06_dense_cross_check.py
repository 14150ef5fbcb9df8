# %% [markdown]
# # Cross-checking the block representation
#
# Joint states are stored as one 2x2 block per frequency bin.  For small grids
# the same protocol can be run on full 2N x 2N matrices; every quantity agrees
# to rounding error.

# %%
from polwitness.oracle import run_equivalence_suite

for r in run_equivalence_suite(sizes=(8, 32, 64)):
    print(f"{'ok  ' if r.passed else 'FAIL'} {r.name:48s} {r.deviation:.1e}")
