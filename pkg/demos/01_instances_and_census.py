# %% [markdown]
# # 2-out-of-4 SAT instances
#
# A clause `(i, j, k, l)` holds when exactly two of its four variables are 1.
# Flipping every bit preserves every clause, so solutions come in complement
# pairs. This notebook builds instances, counts them and reduces 3-SAT to them.

# %%
import itertools

import numpy as np

from qmasat.sat import (
    Cnf3,
    SatInstance24,
    all_clauses24,
    census,
    census_instance,
    cnf_solutions,
    decode_reduced,
    parse_cnf,
    reduce_3sat,
    serialize_instance,
    solutions,
)

# %% [markdown]
# Six variables give C(6,4) = 15 possible clauses.

# %%
clauses = all_clauses24(6)
print(len(clauses), clauses[:3], "...", clauses[-1])

# %% [markdown]
# ## Brute-force solutions
# One clause leaves 6 of 16 patterns on its variables, times 4 free bits.

# %%
one = SatInstance24(6, ((1, 2, 3, 4),))
print("one clause:", len(solutions(one)), "solutions")
print("all fifteen:", solutions(SatInstance24(6, tuple(clauses))))

# %% [markdown]
# ## Census of 8-clause instances
# Every 8-subset of the 15 clauses, checked exhaustively.

# %%
c = census(6, 8)
counts = np.bincount(c.solution_counts)
print(f"{c.total} instances, {c.satisfiable} satisfiable")
print("solution-count histogram:", {k: int(v) for k, v in enumerate(counts) if v})

first_sat = next(i for i, k in enumerate(c.solution_counts) if k)
inst = census_instance(6, 8, first_sat)
print("example:", serialize_instance(inst))
print("its solutions:", solutions(inst))

# %% [markdown]
# ## From 3-SAT
# The reduction adds a reference pair of variables that must differ, shared
# gadgets for literal pairs, and one tail clause per 3-SAT clause. A reduced
# solution decodes back to a satisfying 3-SAT assignment.

# %%
cnf = parse_cnf("""c a small formula
p cnf 4 3
1 -2 3 0
-1 2 4 0
-3 -4 1 0
""")
red = reduce_3sat(cnf)
print(f"{cnf.n_vars} vars / {len(cnf.clauses)} clauses -> {red.n_vars} vars / {len(red.clauses)} clauses")
sol = solutions(red, limit=1)[0]
print("decoded:", decode_reduced(cnf, sol), "reference:", cnf_solutions(cnf, limit=1)[0])

# %% [markdown]
# All eight sign patterns on three variables rule out every assignment, and
# the reduced instance is unsatisfiable too.

# %%
full = Cnf3(3, tuple(tuple(s * v for s, v in zip(signs, (1, 2, 3))) for signs in itertools.product((1, -1), repeat=3)))
print("reduced size:", reduce_3sat(full).n_vars, "vars; satisfiable:", bool(solutions(reduce_3sat(full), limit=1)))
