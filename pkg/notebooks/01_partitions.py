# ---
# jupyter:
#   jupytext:
#     formats: py:percent
# ---

# %% [markdown]
# # How the two analyzers split the 16 hyper-Bell states
#
# Each photon carries a polarization qubit and a path qubit, so a pair lives in
# one of 16 hyper-Bell states.  A linear-optics analyzer cannot tell all of them
# apart; it groups them into classes whose detector click patterns coincide.

# %%
import numpy as np

from hyperbell import circuits as cx
from hyperbell import bellstates as bs
from hyperbell import twocopy

kw = cx.kw_reference_config()
for el in kw.elements:
    print(el)

# %% [markdown]
# Compile the circuit to an 8x8 mode unitary and partition the states.

# %%
u = cx.compile(kw)
print("unitarity deviation", np.abs(u.conj().T @ u - np.eye(8)).max())

part = cx.partition_states(kw)
print(part.to_text("KW analyzer", cx.class_names(part, cx.golden_table(1))))

# %% [markdown]
# Seven classes: one quartet and six pairs.  Within a class the full click
# distributions agree, not just their supports.

# %%
print(cx.distributions_equal_within_classes(kw, part))

# %% [markdown]
# The two states with photon 1 on paths a/b and photon 2 on c/d land on click
# pairs that no hyper-Bell state ever produces.

# %%
used = set().union(*(c.signatures for c in part.classes))
for pol in ("Psi+", "Psi-"):
    sup = cx.signature_support(bs.starred_state(pol), kw)
    print(pol, sorted(sup), "overlap:", bool(sup & used))

# %% [markdown]
# ## A second analyzer with a transversal partition
#
# The modified circuit puts a Bell-permuting front end ahead of the KW optics.
# Its classes cut across the first ones, so two copies measured once by each
# analyzer pin down the state.

# %%
mod = cx.modified_reference_config()
part2 = cx.partition_states(mod)
print(part2.to_text("modified analyzer", cx.class_names(part2, cx.golden_table(2), prime="'")))

# %%
analyzer = twocopy.TwoCopyAnalyzer()
for lab, key in sorted(analyzer.joint.forward.items(), key=lambda kv: kv[1]):
    print(f"{key[0]:>2} {key[1]:>3}  ->  {lab}")

# %%
rng = np.random.default_rng(1)
hits = sum(analyzer.identify(lab, rng) == lab for lab in bs.ALL_LABELS for _ in range(50))
print(f"{hits}/800 identified")
