"""End-to-end run on a generated MOMDP: learn, prune, evaluate.

Generates the small benchmark model, estimates the kernel from random
walks, trains the set-valued Q-learner, prunes the learned set down the
taxonomy, and ranks the surviving policies under two nonlinear utilities.
The best policy under either utility is often NOT on the Pareto front.
"""

import numpy as np

from distmo import (
    LearnerConfig,
    cd_prune,
    ch_prune,
    generate,
    leontief_utility,
    p_prune,
    product_utility,
    small_config,
    train,
)
from distmo.harness import evaluate_utilities

momdp = generate(small_config(seed=3))
print(f"model: {momdp.num_states} states, {momdp.num_actions} actions, "
      f"horizon {momdp.horizon}, discount {momdp.gamma}")

config = LearnerConfig(episodes=2000, random_walks=10_000, set_limit=10, seed=3)
dus = train(momdp, config)
pf = p_prune(dus)
print(f"\nlearned distributional undominated set: {len(dus)} policies")
print(f"pareto front subset: {len(pf)}; convex hull: {len(ch_prune(dus))}; "
      f"convex distributional subset: {len(cd_prune(dus))}")

for pid, dist in dus:
    tag = "PF" if pid in set(pf.ids()) else "  "
    ev = dist.expected_value()
    print(f"  [{tag}] {pid}: E = ({ev[0]:6.2f}, {ev[1]:6.2f}), {len(dist)} atoms")

print("\nutility-based ranking:")
for res in evaluate_utilities(dus, [product_utility(), leontief_utility()]):
    marker = "" if res["best_id"] == res["best_pf_id"] else "  <- beats the PF best!"
    print(f"  {res['utility']}: best {res['best_id']} ({res['best_value']:.2f}); "
          f"best on PF {res['best_pf_id']} ({res['best_pf_value']:.2f}){marker}")
