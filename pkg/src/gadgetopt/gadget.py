"""Gadget Hamiltonian description ``H + V`` for a k-local target.

Each target term gets a register of ``k`` ancillas coupled ferromagnetically
with strength ``delta / (2(k-1))`` per pair; register ``i`` couples to the
system through ``lambda_i * sigma_{i,j} (x) X_{i,j}``. Nothing here builds a
matrix; see :mod:`gadgetopt.dense` for that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .pauli import TargetHamiltonian


def energy_levels(k: int, delta: float) -> np.ndarray:
    """Register energies ``E_j = j (k - j) delta / (k - 1)`` for ``j = 0..k``."""
    j = np.arange(k + 1)
    return j * (k - j) * delta / (k - 1)


def transition_matrix(k: int) -> np.ndarray:
    """Single-flip multiplicities between Hamming-weight levels of one register."""
    M = np.zeros((k + 1, k + 1), dtype=np.int64)
    for i in range(k + 1):
        if i > 0:
            M[i, i - 1] = i
        if i < k:
            M[i, i + 1] = k - i
    return M


def ascending_path_product(k: int) -> int:
    """``prod_j M[j, j+1]`` = number of ways to walk one register from 0 to k."""
    return math.factorial(k)


@dataclass(frozen=True)
class GadgetModel:
    target: TargetHamiltonian
    delta: float
    lambdas: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.shape != (self.target.m,) or np.any(lam < 0):
            raise ValueError("lambdas must be m non-negative values")
        lam.setflags(write=False)
        signs = np.asarray(self.signs, dtype=int)
        signs.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "signs", signs)

    @property
    def k(self) -> int:
        return self.target.k

    @property
    def m(self) -> int:
        return self.target.m

    @property
    def n_sys(self) -> int:
        return self.target.n_sys

    @property
    def n_qubits(self) -> int:
        return self.n_sys + self.k * self.m

    @property
    def energy_levels(self) -> np.ndarray:
        return energy_levels(self.k, self.delta)

    @property
    def M(self) -> np.ndarray:
        return transition_matrix(self.k)

    def ancilla(self, register: int, slot: int) -> int:
        """Global qubit index of ancilla ``slot`` in ``register``."""
        return self.n_sys + register * self.k + slot

    def effective_coefficients(self) -> np.ndarray:
        """Coefficients the k-th order term reproduces at ``z = 0``.

        For normalized couplings these equal the target coefficients.
        """
        excited = np.prod(self.energy_levels[1:-1])
        return self.signs * self.lambdas ** self.k * ascending_path_product(self.k) / excited

    def with_delta(self, delta: float) -> "GadgetModel":
        return replace(self, delta=float(delta))

    def to_dict(self) -> dict:
        registers = []
        for i, term in enumerate(self.target.terms):
            registers.append({
                "ancillas": [self.ancilla(i, j) for j in range(self.k)],
                "couplings": [
                    {"ancilla": self.ancilla(i, j), "system_qubit": q, "letter": p}
                    for j, (q, p) in enumerate(term.factors)
                ],
            })
        return {
            "k": self.k,
            "m": self.m,
            "n_sys": self.n_sys,
            "delta": self.delta,
            "lambdas": self.lambdas.tolist(),
            "signs": self.signs.tolist(),
            "energy_levels": self.energy_levels.tolist(),
            "M": self.M.tolist(),
            "registers": registers,
        }


def build_gadget(target: TargetHamiltonian, delta: float, normalize: bool = False) -> GadgetModel:
    """Gadget with raw couplings ``lambda_i = |c_i|^(1/k)``.

    With ``normalize`` the couplings are rescaled by :func:`normalize_couplings`.
    """
    c = target.coefficients
    model = GadgetModel(target, float(delta), np.abs(c) ** (1.0 / target.k), np.sign(c).astype(int))
    return normalize_couplings(model) if normalize else model


def normalize_couplings(model: GadgetModel) -> GadgetModel:
    """Rescale couplings so the k-th order term reproduces ``c_i`` at ``z = 0``.

    ``lambda_i = (|c_i| prod_{j=1}^{k-1} E_j / k!)^(1/k)``; for k = 3 this is
    ``(|c_i| delta^2 / 6)^(1/3)``.
    """
    c = np.abs(model.target.coefficients)
    excited = np.prod(model.energy_levels[1:-1])
    lam = (c * excited / ascending_path_product(model.k)) ** (1.0 / model.k)
    return replace(model, lambdas=lam)


def v_norm_upper(model: GadgetModel) -> float:
    """Triangle-inequality bound ``k * sum_i lambda_i`` on ``||V||_2``."""
    return float(model.k * np.sum(model.lambdas))


def check_gap_precondition(model: GadgetModel) -> bool:
    """Whether ``||V||_2 <= delta / 2`` holds for the upper bound on ``||V||``."""
    return v_norm_upper(model) <= model.delta / 2


def default_z_star(target: TargetHamiltonian, slack: float) -> float:
    """Half-width of the z window: ``sum_i |c_i| + slack``."""
    return float(np.sum(np.abs(target.coefficients)) + slack)


def require_gap(model: GadgetModel, z_star: float) -> None:
    """Hard precondition ``delta >= 4 z_star`` before any bound is computed."""
    if model.delta < 4 * z_star:
        raise ValueError(f"delta={model.delta:g} below 4*z_star={4 * z_star:g}")
