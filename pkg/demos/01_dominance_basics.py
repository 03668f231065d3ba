"""Why expected values are not enough: a treatment-plan thought experiment.

Two plans with conflicting objectives (efficacy, comfort). Plan A wins on
expected value, yet a patient who runs the plan once and cares about the
product of the outcomes strictly prefers plan B. Distributional dominance
is the pairwise relation that keeps both plans on the table.
"""

import numpy as np

from distmo import (
    ReturnDistribution,
    SolutionSet,
    d_prune,
    distributionally_dominates,
    fsd,
    p_prune,
    pareto_dominates,
    product_utility,
)

plan_a = ReturnDistribution.from_pairs([((1, 0), 0.5), ((0, 1), 0.5)])
plan_b = ReturnDistribution.dirac((0.45, 0.45))

print("Plan A:", plan_a)
print("Plan B:", plan_b)
print()
print("Expected values:", plan_a.expected_value(), plan_b.expected_value())
print(
    "A Pareto dominates B on expectations:",
    pareto_dominates(plan_a.expected_value(), plan_b.expected_value()),
)

u = product_utility()
print()
print("Expected product utility of A:", plan_a.expected_utility(u))
print("Expected product utility of B:", plan_b.expected_utility(u))
print("-> a one-shot decision maker with this utility prefers B.")

print()
print("First-order stochastic dominance A over B:", fsd(plan_a, plan_b))
print("Distributional dominance A over B:", distributionally_dominates(plan_a, plan_b))
print("Distributional dominance B over A:", distributionally_dominates(plan_b, plan_a))

plans = SolutionSet([("A", plan_a), ("B", plan_b)])
print()
print("Pareto front keeps:", p_prune(plans).ids())
print("Distributional undominated set keeps:", d_prune(plans).ids())
print("-> pruning on expectations alone would have discarded the better plan.")
