# ---
# jupyter:
#   jupytext:
#     formats: py:percent
# ---

# %% [markdown]
# # Communication with the seven-class analyzer

# %%
import numpy as np

from hyperbell import circuits as cx
from hyperbell import protocols as pr

# %% [markdown]
# ## Superdense coding
#
# Alice holds photon 1 of a shared ``Psi- (x) psi-`` pair.  A local Pauli on each
# degree of freedom moves the pair into one of seven classes, so one photon
# carries log2 7 bits.

# %%
book = pr.build_codebook()
for e in book.entries:
    print(e.message, e.op.name, e.label, "class", e.class_name)
print(f"{book.capacity_bits:.4f} bits")

# %%
rng = np.random.default_rng(0)
errors = sum(pr.dense_roundtrip(m, rng, book) != m for m in range(7) for _ in range(100))
print("errors", errors)

# %% [markdown]
# With detector efficiency ``eta`` a pair arrives with probability ``eta^2``;
# sending the same information as two polarization-only pairs needs ``eta^4``.

# %%
for k, v in pr.efficiency_crossover().items():
    print(k, v)

# %% [markdown]
# ## Fingerprinting
#
# Alice encodes her message on photon 1, Bob on photon 2.  Equal messages
# return the pair to one class; the table gives P(verdict "equal").

# %%
print(np.round(pr.fingerprint_matrix(), 12))

# %% [markdown]
# ## Teleportation
#
# A polarization qubit enters on path b; Bob keeps the second photon of a
# ``Phi+ (x) phi+`` pair.  Every successful click pattern leaves Bob with a
# fixed unitary image of the input.

# %%
tp = pr.Teleporter()
print(len(tp.table.corrections), "branches, success", tp.table.success_probability)
wins = [tp.teleport(*pr.random_qubit(rng), rng) for _ in range(2000)]
ok = [w for w in wins if w.success]
print(len(ok) / len(wins), min(w.fidelity for w in ok))

# %% [markdown]
# An analyzer that never brings the photons together cannot do this.

# %%
for cfg in (cx.kw_reference_config(), cx.analyzers_only_config()):
    rep = pr.locality_audit(cfg)
    print(rep.name, "local" if rep.local else "non-local",
          pr.Teleporter(cfg).table.success_probability)
