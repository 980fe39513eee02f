# ---
# jupyter:
#   jupytext:
#     formats: py:percent
# ---

# %% [markdown]
# # Why seven classes is the ceiling
#
# A set of states can be told apart exactly only if some detector mode
# ``c = sum_k v_k c_k`` gives ``<i|c^dag c|j> = 0`` for every pair in the set.
# We look for a unit ``v`` by minimizing the sum of squared moduli of those
# overlaps, ``F(v)``.  A zero means the necessary condition holds; a strictly
# positive minimum rules the set out.

# %%
import json
from pathlib import Path

import numpy as np

from hyperbell import circuits as cx
from hyperbell import distinguish as ds

# %% [markdown]
# One state from each KW class: the KW detector rows are witnesses.

# %%
pick = [c.sorted_members()[0] for c in cx.golden_table(1).classes]
u = cx.compile(cx.kw_reference_config())
print([f"{ds.residual(u[s], pick):.1e}" for s in range(8)])
print(ds.feasibility(pick, ds.FeasibilityOptions(restarts=20)).verdict)

# %% [markdown]
# ## The worked octet
#
# The eight states with polarization in {Phi+, Phi-} fail.  The pair conditions
# span a 20-dimensional space of real quadratic forms, and that span contains
# conditions that force each component of ``v`` to vanish.

# %%
rep = ds.worked_example_check()
print("span rank", rep.span_rank)
for c in rep.conditions:
    print(f"  {c['kind']:8s} modes {c['modes']}  distance to span {c['distance']:.1e}")
print("forced to zero:", rep.forced_zero)
print("numerical minimum", rep.feasibility.min_residual)

# %% [markdown]
# ## All 12870 octets
#
# Bell-preserving optics (local Paulis, phase plates, the polarization/path
# Hadamards and CNOTs, the degree-of-freedom swap) permute labels and keep
# ``F`` invariant, so its minimum is constant on orbits.  There are only nine.

# %%
orbits = ds.symmetry_reduce()
print([o.multiplicity for o in orbits], sum(o.multiplicity for o in orbits))

# %%
reduced = ds.sweep_octets(symmetry=True)
print(reduced.summary())

# %% [markdown]
# The archived brute-force run solves every octet on its own.

# %%
path = Path("../reports/sweep_full.json")
if path.exists():
    doc = json.loads(path.read_text())
    print(doc["summary"])
    mins = np.array([o["min_residual"] for o in doc["octets"]])
    print(np.unique(mins.round(6), return_counts=True))

# %% [markdown]
# ## The same argument with polarization only
#
# Four Bell states, bound four, and the usual splitter-based analyzer reaches
# three classes.

# %%
pol = ds.polarization_only_analysis()
print(pol.verdict, pol.min_residual, pol.classes)
print([ds.upper_bound(n) for n in range(1, 5)], [str(ds.ratio(n)) for n in range(1, 5)])
