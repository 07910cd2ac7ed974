# coding: utf-8

# # How big does the gap need to be?
#
# Every estimator falls with delta, so the smallest admissible delta can be
# found by bisection on a log scale.

# In[1]:

from pathlib import Path

import numpy as np

from gadgetopt.optimize import OptimizeRequest, alpha_sweep, optimize_delta
from gadgetopt.pauli import read_target

HERE = Path(__file__).resolve().parent
target = read_target(HERE / "pair.ham", compact=True)


# The walk bound needs a far smaller gap than the simple bound.

# In[2]:

for method in ("simple", "walkbound"):
    res = optimize_delta(OptimizeRequest(target, 0.1, method))
    print(f"{method:10s} delta = {res.delta_opt:.4g}  after {res.iterations} evaluations")


# Scanning the first coefficient shows how the gain depends on the target.

# In[3]:

for row in alpha_sweep(target, np.linspace(0.05, 0.4, 4), 0.1, with_dense=False):
    print(f"alpha={row.alpha:.3f}  simple={row.delta_simple:.3g}  walk={row.delta_walkbound:.3g}"
          f"  ratio={row.ratio:.3g}")
