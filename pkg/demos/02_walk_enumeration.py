# coding: utf-8

# # Walks between ancilla configurations
#
# Each term of the series is a sum over walks that leave the low-energy space
# and come back. Registers are interchangeable, so a configuration is just the
# sorted vector of register Hamming weights.

# In[1]:

from pathlib import Path

from gadgetopt.gadget import build_gadget, transition_matrix
from gadgetopt.pauli import read_target
from gadgetopt.walks import (enumerate_reduced_sequences, iter_slot_walks, low_energy_config,
                             perturb_bound, walk_bound)

HERE = Path(__file__).resolve().parent
model = build_gadget(read_target(HERE / "pair.ham", compact=True), 1e3, normalize=True)


# M counts how many single flips move a register between weights.

# In[2]:

print(transition_matrix(3))


# Second order, two registers. From the all-zero start there is one walk: one
# register goes up a level and comes back. Across every low start there are four.

# In[3]:

for full in range(3):
    for seq in enumerate_reduced_sequences(2, 3, 2, start=low_energy_config(2, 3, full)):
        print(" -> ".join(str(c.levels) for c in seq))


# Its weight has a closed form: 3 (lambda_1^2 + lambda_2^2) / (E_1 - z).

# In[4]:

z = 0.4
lam = model.lambdas
print(walk_bound([(1, 0), (0, 0)], model, z), 3 * (lam ** 2).sum() / (model.energy_levels[1] - z))


# The slot walk keeps the per-step multiplicities (3 going up, 1 coming back)
# and the touch counts b that feed the symmetric polynomial.

# In[5]:

(trace,) = iter_slot_walks(2, 3, 1)
print("omega:", trace.omega, " touches:", trace.touches)


# Odd orders never close a walk on the all-zero configuration, so their
# identity part vanishes.

# In[6]:

for r in range(2, 8):
    tau, gamma, _ = perturb_bound(r, model, 0.0)
    print(f"r={r}  tau={tau:.4e}  gamma={gamma:.4e}")
