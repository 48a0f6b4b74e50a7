# %% [markdown]
# # Linear-optics realisation
#
# Six modes are three spatial paths with two polarizations each. Half-wave
# plates act as 2x2 reflections [[cos, sin], [sin, -cos]]; permutation stages
# reroute modes. Compiled circuits must reproduce the abstract tests exactly.

# %%
import math

import numpy as np

from qmasat.optics import (
    PhotonModel,
    circuit_unitary,
    compile_clause_circuit,
    compile_encoding_circuit,
    compile_matching_circuit,
    gaussian_sinc_profile,
    hom_scan,
    mode_label,
    single_photon_dist,
    two_photon_channels,
    waveplate_u,
)
from qmasat.states import cheat_common_var, proper_state
from qmasat.verifier import Matching

np.set_printoptions(precision=4, suppress=True)

# %%
print([mode_label(i) for i in range(1, 7)])
print("H =\n", waveplate_u(math.pi / 4))

# %% [markdown]
# ## Single-photon circuits
# The clause circuit sends the |c> component to detector 1; the matching
# circuit puts each pair on a path and interferes it.

# %%
clause_c = compile_clause_circuit((2, 3, 5, 6))
print(clause_c.to_json())
psi = proper_state((1, 0, 0, 0, 0, 0))
print("detector distribution:", single_photon_dist(psi, clause_c))

match_c = compile_matching_circuit(Matching(((1, 2), (3, 4), (5, 6))))
print(dict(zip(match_c.labels, single_photon_dist(cheat_common_var(2), match_c).round(4))))

u = circuit_unitary(match_c)
print("unitarity error:", np.abs(u.conj().T @ u - np.eye(6)).max())

# %% [markdown]
# State preparation: a cascade of waveplates turns a photon in mode 1 into
# any real proof state.

# %%
prep = compile_encoding_circuit(cheat_common_var(2))
print("prepared:", circuit_unitary(prep)[:, 0] * math.sqrt(14))

# %% [markdown]
# ## Two-photon swap test
# Photons from the two proofs meet on a balanced coupler. Cross-side
# coincidences reject. Same-side events on one detector go unregistered,
# which is why registered one-side counts are scaled by 3/2.

# %%
p0 = proper_state((0,) * 6)
for gamma in (1.0, 0.95, 0.5, 0.0):
    r = two_photon_channels(p0, p0, PhotonModel(gamma))
    print(f"gamma={gamma:.2f} reject={r.reject:.4f} registered={r.accept_registered:.4f} corrected={r.accept_corrected:.4f}")
print(two_photon_channels(p0, psi).to_csv())

# %% [markdown]
# ## Delay scan
# A Gaussian times |sinc| indistinguishability profile gives the familiar
# dip in the reject curve at zero delay.

# %%
model = PhotonModel(1.0, gaussian_sinc_profile(sigma=1.0, width=2.0, visibility=0.97))
for row in hom_scan(p0, p0, np.linspace(-3, 3, 7), model):
    print(f"delay={row['delay']:+.1f} gamma={row['gamma']:.3f} reject={row['reject']:.4f}")
