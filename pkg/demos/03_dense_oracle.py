# coding: utf-8

# # Checking the bound against exact matrices
#
# For small systems we can build H + V explicitly. The self-energy comes from a
# Schur complement over the excited block.

# In[1]:

from pathlib import Path

import numpy as np

from gadgetopt.dense import materialize, spectral_norm, spectral_report
from gadgetopt.gadget import build_gadget
from gadgetopt.pauli import read_target
from gadgetopt.walks import perturb_bound, total_error_bound

HERE = Path(__file__).resolve().parent
target = read_target(HERE / "pair.ham", compact=True)
dense = materialize(build_gadget(target, 1e3, normalize=True))
print("qubits:", dense.model.n_qubits, " low space:", dense.n_low)


# For commuting terms the per-order bound is exact.

# In[2]:

for r in (2, 3, 4, 5, 6):
    print(r, perturb_bound(r, dense.model, 0.0)[0], spectral_norm(dense.T_r(r, 0.0)))


# The error of truncating the self-energy, over the whole z window, stays below
# the walk bound. The spectral error is smaller again.

# In[3]:

z_star = 0.4
for delta in (1e3, 1e4, 1e5):
    model = dense.model.with_delta(delta)
    rep = spectral_report(model, z_star, n_z=5)
    print(f"delta={delta:8.0e}  bound={total_error_bound(model, z_star).total_bound:.3e}"
          f"  sigma={rep.max_sigma_err:.3e}  spectral={rep.spectral_err:.3e}")
