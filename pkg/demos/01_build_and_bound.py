# coding: utf-8

# # Building a gadget and bounding its error
#
# A target is a sum of 3-local Pauli strings. Each term gets its own register
# of three ancillas, coupled to the system qubits with strength lambda. The
# ancillas sit in a ferromagnetic well whose gap is delta.

# In[1]:

from pathlib import Path

import numpy as np

from gadgetopt.gadget import build_gadget, default_z_star
from gadgetopt.pauli import read_target
from gadgetopt.walks import total_error_bound

HERE = Path(__file__).resolve().parent


# Two commuting terms on five qubits. The file uses 1-based labels, so we
# compact them down to 0..4.

# In[2]:

target = read_target(HERE / "pair.ham", compact=True)
print(target.render())
print("k =", target.k, " m =", target.m, " commuting:", target.pairwise_commuting())


# Normalized couplings make the third-order term reproduce each coefficient
# exactly. The energy table only depends on the Hamming weight of a register.

# In[3]:

model = build_gadget(target, 1e3, normalize=True)
print("energy levels:", model.energy_levels)
print("lambdas:", model.lambdas)


# The walk bound sums every closed walk order by order, then caps the rest with
# a geometric tail. The simple bound is the tail alone, started at order 4.

# In[4]:

z_star = default_z_star(target, 0.1)
for delta in np.geomspace(1e3, 1e7, 5):
    rep = total_error_bound(model.with_delta(delta), z_star)
    print(f"delta={delta:9.3g}  walk={rep.total_bound:.4e}  simple={rep.simple_bound:.4e}"
          f"  orders<={rep.truncation_order}")
