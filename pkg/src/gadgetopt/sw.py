"""Schrieffer-Wolff series on dense matrices (desk scale only).

Conventions: ``H`` is diagonal with the low space below ``delta / 2``. The
block-off-diagonal part of an operator is ``O(X)``, the rest is its diagonal
part. The generator ``R`` is anti-Hermitian and the rotated Hamiltonian is
``e^R (H + V) e^-R``; ``K(X)_ij = O(X)_ij / (E_i - E_j)`` solves
``[H, K(X)] = O(X)``.
"""

from __future__ import annotations

import itertools
from math import comb, factorial
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg

from .dense import DenseGadget, materialize, spectral_norm, spectral_error
from .gadget import GadgetModel, normalize_couplings

MAX_ORDER = 8


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number ``B_n`` (``B_1 = -1/2``)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(Fraction(comb(m + 1, j)) * B[j] for j in range(m)) / (m + 1))
    return B[n]


def a_coeff(m: int) -> Fraction:
    """``2^m B_m / m!``; ``a_2 = 1/3``."""
    return Fraction(2 ** m, factorial(m)) * bernoulli(m)


def b_coeff(n: int) -> Fraction:
    """``2 (2^{2n} - 1) B_{2n} / (2n)!``: weight of the ``(2n-1)``-fold commutator.

    ``b_1 = 1/2``, ``b_2 = -1/24``, ``b_3 = 1/240`` (the tanh series).
    """
    return Fraction(2 * (2 ** (2 * n) - 1), factorial(2 * n)) * bernoulli(2 * n)


def compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts > total:
        return
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


@dataclass
class BlockSplit:
    """Energies and low-space mask of a diagonal unperturbed Hamiltonian."""

    energies: np.ndarray
    low: np.ndarray

    @property
    def cross(self) -> np.ndarray:
        return self.low[:, None] != self.low[None, :]

    def off(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.cross, X, 0)

    def diag(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.cross, 0, X)

    def project_low(self, X: np.ndarray) -> np.ndarray:
        return X[np.ix_(self.low, self.low)]


def super_K(X: np.ndarray, split: BlockSplit) -> np.ndarray:
    """``O(X)_ij / (E_i - E_j)`` on cross-block entries, zero elsewhere."""
    E = split.energies
    gaps = E[:, None] - E[None, :]
    cross = split.cross
    if np.any(np.abs(gaps[cross]) == 0):
        raise ArithmeticError("degenerate energies across the low/high cut")
    out = np.zeros_like(X, dtype=complex)
    out[cross] = X[cross] / gaps[cross]
    return out


@dataclass
class SWSeries:
    order: int
    R_terms: list[np.ndarray] = field(repr=False)
    heff_terms: list[np.ndarray] = field(repr=False)
    a: dict[int, Fraction]
    b: dict[int, Fraction]

    def generator(self, upto: int | None = None) -> np.ndarray:
        upto = self.order if upto is None else upto
        return sum(self.R_terms[:upto])

    def effective(self, upto: int | None = None) -> np.ndarray:
        """``H_- + V_- + sum_{r=2}^{upto} H_eff,r``."""
        upto = self.order if upto is None else upto
        return sum(self.heff_terms[:upto])


def _nested(R: list[np.ndarray], X: np.ndarray, depth: int, total: int) -> np.ndarray:
    """``R^depth(X)_total``: sum over compositions of ``total`` into ``depth`` parts
    of ``[R_n1, [R_n2, ... [R_nd, X]]]``. ``R[n-1]`` is ``R_n``."""
    out = np.zeros_like(X)
    for parts in compositions(total, depth):
        if any(n > len(R) for n in parts):
            continue
        acc = X
        for n in reversed(parts):
            acc = comm(R[n - 1], acc)
        out = out + acc
    return out


def compute_R(H: np.ndarray, V: np.ndarray, order: int, cut: float) -> SWSeries:
    """Generator terms ``R_1..R_order`` and effective terms up to ``order``.

    ``R_1 = K(V_od)``, ``R_2 = -K[V_d, R_1]`` and for ``n >= 2``
    ``R_n = -K[V_d, R_{n-1}] + sum_j a_{2j} K R^{2j}(V_od)_{n-1}``.
    The effective terms are ``H_eff,r = sum_j b_j Pi_- R^{2j-1}(V_od)_{r-1} Pi_-``.
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}")
    E = np.real(np.diag(H))
    if np.max(np.abs(H - np.diag(E))) > 0:
        raise ValueError("H must be diagonal")
    split = BlockSplit(E, E < cut)
    Vod, Vd = split.off(V), split.diag(V)
    R = [super_K(Vod, split)]
    a = {2 * j: a_coeff(2 * j) for j in range(1, order)}
    b = {j: b_coeff(j) for j in range(1, order)}
    for n in range(2, order + 1):
        acc = -super_K(comm(Vd, R[-1]), split)
        for j in range(1, (n - 1) // 2 + 1):
            acc = acc + float(a[2 * j]) * super_K(_nested(R, Vod, 2 * j, n - 1), split)
        R.append(acc)
    heff = [split.project_low(np.diag(E) + Vd).astype(complex)]
    for r in range(2, order + 1):
        acc = np.zeros((int(split.low.sum()),) * 2, dtype=complex)
        for j in range(1, r // 2 + 1):
            if 2 * j - 1 > r - 1:
                break
            acc = acc + float(b[j]) * split.project_low(_nested(R, Vod, 2 * j - 1, r - 1))
        heff.append(acc)
    return SWSeries(order, R, heff, a, b)


def _dense_parts(model_or_dense) -> DenseGadget:
    if isinstance(model_or_dense, DenseGadget):
        return model_or_dense
    return materialize(model_or_dense)


def sw_series(model, order: int) -> SWSeries:
    d = _dense_parts(model)
    return compute_R(d.H, d.V, order, d.model.delta / 2)


def sw_effective(model, order: int) -> list[np.ndarray]:
    """``[H_- + V_-, H_eff,2, ..., H_eff,order]`` on the low space."""
    return sw_series(model, order).heff_terms


def embedded_fd_term(model, r: int) -> np.ndarray:
    """``-b_1 Pi_- [V_od, (-K[V_d, .])^(r-2) R_1] Pi_-``, the FD term at ``E_0`` inside SW."""
    d = _dense_parts(model)
    E = d.h_diag
    split = BlockSplit(E, d.low)
    V = d.V
    Vod, Vd = split.off(V), split.diag(V)
    X = super_K(Vod, split)
    for _ in range(r - 2):
        X = -super_K(comm(Vd, X), split)
    return -float(b_coeff(1)) * split.project_low(comm(Vod, X))


def block_offdiag_norm(d: DenseGadget, R: np.ndarray) -> float:
    """``||Pi_+ e^R (H + V) e^-R Pi_-||``."""
    U = scipy.linalg.expm(R)
    Hr = U @ d.H_total @ U.conj().T
    return float(np.linalg.norm(Hr[np.ix_(d.high, d.low)], 2))


def exact_effective(d: DenseGadget) -> np.ndarray:
    """Low block after exact block diagonalization by the direct rotation.

    ``U = sqrt((2P~ - 1)(2P_0 - 1))`` maps the unperturbed low space onto the
    perturbed one with the least rotation; the result has exactly the lowest
    ``dim L_-`` eigenvalues of ``H + V``.
    """
    Ht = d.H_total
    w, vecs = np.linalg.eigh(Ht)
    n = d.n_low
    if n < d.dim and w[n] - w[n - 1] <= 0:
        raise ArithmeticError("low band touches the high band")
    Pt = vecs[:, :n] @ vecs[:, :n].conj().T
    P0 = np.diag(d.low.astype(float))
    eye = np.eye(d.dim)
    U = scipy.linalg.sqrtm((2 * Pt - eye) @ (2 * P0 - eye))
    out = (U.conj().T @ Ht @ U)[np.ix_(d.low, d.low)]
    return 0.5 * (out + out.conj().T)


@dataclass
class CompareRow:
    delta: float
    fd_error: float
    sw_error: float
    spectral_error: float


def fd_sw_compare(model: GadgetModel, order: int, delta_grid, mode: str = "truncated",
                  normalize: bool = True, threads: int = 1) -> list[CompareRow]:
    """FD and SW truncation errors at order k, plus the spectral error.

    ``fd_error = ||Sigma_-(E_0) - sum_{r<=k} T_r(E_0)||`` with ``E_0 = 0``.
    ``sw_error`` is ``||sum_{r=k+1}^{order} H_eff,r||`` in ``truncated`` mode and
    ``||H_exact - H_SW(<=k)||`` in ``exact-blockdiag`` mode. With ``normalize``
    the couplings are rescaled at every ``delta`` so the k-th order term keeps
    reproducing the target.
    """
    if mode not in ("truncated", "exact-blockdiag"):
        raise ValueError(f"unknown mode {mode!r}")
    k = model.k

    def one(delta):
        m = model.with_delta(delta)
        if normalize:
            m = normalize_couplings(m)
        d = materialize(m)
        fd = spectral_norm(d.self_energy(0.0) - d.truncated_self_energy(0.0))
        if mode == "truncated":
            series = compute_R(d.H, d.V, max(order, k), m.delta / 2)
            sw = spectral_norm(sum(series.heff_terms[k:order]) if order > k else np.zeros((1, 1)))
        else:
            series = compute_R(d.H, d.V, k, m.delta / 2)
            sw = spectral_norm(exact_effective(d) - series.effective(k))
        return CompareRow(float(delta), fd, sw, spectral_error(d))

    grid = [float(x) for x in delta_grid]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, grid))
    return [one(x) for x in grid]

