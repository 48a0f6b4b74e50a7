# %% [markdown]
# # Honest and cheating Merlins
#
# Seeded Monte Carlo rounds against exact reject probabilities, summarised by
# the statistical fidelity F_c between the two Bernoulli distributions.

# %%
import dataclasses

from qmasat.harness import PHI1, PHI2, builtin_scenarios, run_scenario
from qmasat.provers import Strategy, find_common_variable, proofs_for_round
from qmasat.sat import solutions
from qmasat.verifier import TEST_ORDER, enumerate_matchings, reject_exact

# %% [markdown]
# The built-in satisfiable instance has two complementary solutions; the
# unsatisfiable one has a variable shared by every clause.

# %%
print("phi1 solutions:", solutions(PHI1))
print("phi2 satisfiable:", bool(solutions(PHI2)), "common variable:", find_common_variable(PHI2))

# %% [markdown]
# Concentrating amplitude on the common variable zeroes every clause
# projection, so only the uniformity test can catch the cheat.

# %%
m0 = enumerate_matchings(6)[0]
proofs = proofs_for_round(Strategy.common_var_cheat(2), PHI2, 3)
for kind in TEST_ORDER:
    print(f"{kind.value:>15}: {reject_exact(kind, proofs, PHI2, m0):.6f}")

# %% [markdown]
# ## Scenario runs
# Every round draws from its own stream derived from (seed, round index), so
# reports do not depend on the number of worker threads.

# %%
for name, cfg in builtin_scenarios(seed=2024, shots=20_000).items():
    print(run_scenario(cfg).to_csv().splitlines()[1])

# %%
cfg = builtin_scenarios(seed=7, shots=8_000)["cheat-phi2"]
one = run_scenario(cfg).to_csv()
many = run_scenario(dataclasses.replace(cfg, workers=4)).to_csv()
print("identical across worker counts:", one == many)
