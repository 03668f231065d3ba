"""The four solution sets on one random policy collection.

Builds a random set of categorical return distributions and prunes it to
the convex hull, the Pareto front, the distributional undominated set, and
its convex refinement, printing the nesting CH <= PF <= DUS and
CH <= CDUS <= DUS, plus the two pinned counterexamples showing PF and CDUS
are incomparable.
"""

import numpy as np

from distmo import (
    ReturnDistribution,
    SolutionSet,
    cd_prune,
    ch_prune,
    d_prune,
    p_prune,
)

rng = np.random.default_rng(7)
entries = []
for i in range(8):
    n = int(rng.integers(1, 5))
    atoms = rng.integers(0, 7, size=(n, 2)).astype(float)
    probs = rng.multinomial(12, np.full(n, 1 / n)) / 12
    keep = probs > 0
    entries.append((f"policy-{i}", ReturnDistribution(atoms[keep], probs[keep])))

policies = SolutionSet(entries)
dus = d_prune(policies)
cdus = cd_prune(policies)
pf = p_prune(policies)
ch = ch_prune(policies)

print(f"input set: {len(policies)} policies")
for name, sset in (("DUS ", dus), ("CDUS", cdus), ("PF  ", pf), ("CH  ", ch)):
    print(f"  {name}: {len(sset):2d}  {sset.ids()}")
print()
print("nesting holds:",
      set(ch.ids()) <= set(pf.ids()) <= set(dus.ids())
      and set(ch.ids()) <= set(cdus.ids()) <= set(dus.ids()))

# PF and CDUS do not contain each other in general.
z1 = ReturnDistribution.dirac((1, 5))
z2 = ReturnDistribution.dirac((5, 1))
z3 = ReturnDistribution.from_pairs([((1, 3), 0.5), ((3, 1), 0.5)])
trio = SolutionSet([("pi1", z1), ("pi2", z2), ("pi3", z3)])
print()
print("trio of point masses plus a spread policy:")
print("  PF keeps", p_prune(trio).ids(), "but CDUS drops pi3:", cd_prune(trio).ids())

w1 = ReturnDistribution.dirac((2, 5))
w2 = ReturnDistribution.from_pairs([((1, 5), 0.5), ((3, 3), 0.5)])
duo = SolutionSet([("pi1", w1), ("pi2", w2)])
print("pair with a Pareto-dominated spread policy:")
print("  PF keeps", p_prune(duo).ids(), "but CDUS keeps both:", cd_prune(duo).ids())
