# coding: utf-8

# # Schrieffer-Wolff against the self-energy series
#
# The Schrieffer-Wolff generator is built order by order. Its effective
# Hamiltonian contains every self-energy term plus corrections.

# In[1]:

from pathlib import Path

import numpy as np

from gadgetopt.dense import materialize, spectral_norm
from gadgetopt.gadget import build_gadget
from gadgetopt.pauli import read_target
from gadgetopt.sw import b_coeff, fd_sw_compare, embedded_fd_term

HERE = Path(__file__).resolve().parent
target = read_target(HERE / "single3.ham", compact=True)
dense = materialize(build_gadget(target, 100.0, normalize=True))

print("b coefficients:", [str(b_coeff(j)) for j in (1, 2, 3)])


# Each T_r(0) appears inside the Schrieffer-Wolff expansion as one nested
# product of the generator.

# In[2]:

for r in (2, 3, 4):
    T = dense.T_r(r, 0.0)
    print(r, spectral_norm(T - embedded_fd_term(dense, r)) / spectral_norm(T))


# The Schrieffer-Wolff effective Hamiltonian tracks the spectrum more closely
# than the self-energy series truncated at the same order.

# In[3]:

for row in fd_sw_compare(dense.model, 8, np.logspace(3, 6, 4).tolist()):
    print(f"delta={row.delta:8.0e}  fd={row.fd_error:.3e}  sw={row.sw_error:.3e}"
          f"  spectral={row.spectral_error:.3e}")
