"""Brute-force reference: explicit matrices for the gadget on small systems.

Qubit ``q`` is bit ``q`` of the basis-state index. System qubits come first,
then register ``i``'s ancillas at ``n_sys + i*k + j``.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .gadget import GadgetModel
from .walks import signed_shift

MAX_QUBITS = 16
COND_LIMIT = 1e12


class DenseCapExceeded(ValueError):
    pass


class IllConditioned(ArithmeticError):
    pass


def pauli_sparse(factors: Iterable[tuple[int, str]], n: int) -> sp.csr_matrix:
    """Sparse ``2^n x 2^n`` matrix of a Pauli string given as ``(qubit, letter)`` pairs."""
    dim = 1 << n
    idx = np.arange(dim)
    flip = 0
    phase = np.ones(dim, dtype=complex)
    for q, p in factors:
        bit = (idx >> q) & 1
        if p in ("X", "Y"):
            flip |= 1 << q
        if p == "Z":
            phase *= 1 - 2 * bit
        elif p == "Y":
            phase *= 1j * (1 - 2 * bit)
    return sp.csr_matrix((phase, (idx ^ flip, idx)), shape=(dim, dim))


def pauli_matrix(factors: Iterable[tuple[int, str]], n: int) -> np.ndarray:
    """Dense version of :func:`pauli_sparse`."""
    return pauli_sparse(factors, n).toarray()


def spectral_norm(a: np.ndarray, hermitian: bool = True) -> float:
    if a.size == 0:
        return 0.0
    if hermitian:
        return float(np.max(np.abs(np.linalg.eigvalsh(a))))
    return float(np.linalg.norm(a, 2))


def hermiticity_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


@dataclass
class DenseGadget:
    """``H`` (diagonal) and ``V`` (sparse) plus the low/high energy split.

    Dense matrices are produced on request; the resolvent work goes through a
    sparse LU of ``z - H~_+``, which is exact and far cheaper than a dense
    eigendecomposition at a few thousand dimensions.
    """

    model: GadgetModel
    h_diag: np.ndarray
    V_sparse: sp.csr_matrix = field(repr=False)
    low: np.ndarray = field(repr=False)
    high: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.h_diag.size

    @property
    def n_low(self) -> int:
        return int(self.low.sum())

    @property
    def H(self) -> np.ndarray:
        return np.diag(self.h_diag).astype(complex)

    @property
    def V(self) -> np.ndarray:
        return self.V_sparse.toarray()

    @property
    def H_total(self) -> np.ndarray:
        return self.H + self.V

    def block(self, a, rows: str, cols: str):
        pick = {"-": self.low, "+": self.high}
        if sp.issparse(a):
            return a[pick[rows]][:, pick[cols]]
        return a[np.ix_(pick[rows], pick[cols])]

    @cached_property
    def _blocks(self):
        V = self.V_sparse
        return {
            "mm": self.block(V, "-", "-").toarray(),
            "mp": self.block(V, "-", "+").tocsr(),
            "pm": self.block(V, "+", "-").toarray(),
            "pp": self.block(V, "+", "+").tocsr(),
        }

    def _high_resolvent_lu(self, z: float):
        """Sparse LU of ``z - H~_+`` with a 1-norm condition guard."""
        A = (sp.diags(z - self.h_diag[self.high]) - self._blocks["pp"]).tocsc()
        lu = spla.splu(A)
        inv = spla.LinearOperator(A.shape, matvec=lu.solve, rmatvec=lambda x: lu.solve(x, trans="H"),
                                  dtype=complex)
        cond = spla.norm(A, 1) * spla.onenormest(inv)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise IllConditioned(f"resolvent at z={z} has condition number {cond:.3g}")
        return lu

    def self_energy(self, z: float) -> np.ndarray:
        """``Sigma_-(z)`` on the low-energy space.

        Uses the Schur-complement form ``H_- + V_- + V_-+ (z - H~_+)^-1 V_+-``,
        which equals ``z - [G~_-(z)]^-1`` whenever both exist.
        """
        b = self._blocks
        lu = self._high_resolvent_lu(z)
        out = b["mp"] @ lu.solve(b["pm"])
        out += np.diag(self.h_diag[self.low]) + b["mm"]
        return 0.5 * (out + out.conj().T)

    def self_energy_direct(self, z: float) -> np.ndarray:
        """``z I - [Pi_- (z - H~)^-1 Pi_-]^-1`` straight from the definition."""
        A = z * np.eye(self.dim) - self.H_total
        cond = np.linalg.cond(A)
        if cond > COND_LIMIT:
            raise IllConditioned(f"z - H at z={z} has condition number {cond:.3g}")
        G = np.linalg.inv(A)
        Gm = G[np.ix_(self.low, self.low)]
        cond = np.linalg.cond(Gm)
        if cond > COND_LIMIT:
            raise IllConditioned(f"projected resolvent at z={z} has condition number {cond:.3g}")
        return z * np.eye(Gm.shape[0]) - np.linalg.inv(Gm)

    def T_r(self, r: int, z: float) -> np.ndarray:
        """``V_-+ (G_+ V_+)^(r-2) G_+ V_+-`` on the low-energy space."""
        if r < 2:
            raise ValueError("r must be at least 2")
        return self.T_series(r, z)[r]

    def T_series(self, r_max: int, z: float) -> dict[int, np.ndarray]:
        """``{r: T_r(z)}`` for ``r = 2..r_max``, sharing the partial products."""
        b = self._blocks
        g = 1.0 / (z - self.h_diag[self.high])
        acc = g[:, None] * b["pm"]
        out = {}
        for r in range(2, r_max + 1):
            if r > 2:
                acc = g[:, None] * (b["pp"] @ acc)
            out[r] = b["mp"] @ acc
        return out

    def truncated_self_energy(self, z: float, order: int | None = None) -> np.ndarray:
        """``H_- + V_- + sum_{r=2}^{order} T_r(z)``; ``order`` defaults to k."""
        order = self.model.k if order is None else order
        out = np.diag(self.h_diag[self.low]).astype(complex) + self._blocks["mm"]
        for t in self.T_series(order, z).values():
            out = out + t
        return 0.5 * (out + out.conj().T)

    def register_flip(self, registers: Sequence[int]) -> np.ndarray:
        """Full-space operator flipping every ancilla of the given registers."""
        m = self.model
        return pauli_matrix([(m.ancilla(i, j), "X") for i in registers for j in range(m.k)], m.n_qubits)

    def effective_hamiltonian(self, shift: float | None = None) -> np.ndarray:
        """``gamma Pi_- + sum_i c_i H_targ,i (x) Pi_X,i`` on the low-energy space.

        ``gamma`` defaults to the signed low-order shift at ``z = 0`` and
        ``c_i`` are the couplings' effective coefficients (the target ones for
        normalized couplings).
        """
        m = self.model
        gamma = signed_shift(m, 0.0) if shift is None else shift
        coeffs = m.effective_coefficients()
        out = gamma * np.eye(self.n_low, dtype=complex)
        for i, term in enumerate(m.target.terms):
            factors = list(term.factors) + [(m.ancilla(i, j), "X") for j in range(m.k)]
            op = self.block(pauli_sparse(factors, m.n_qubits), "-", "-")
            out += coeffs[i] * op.toarray()
        return out

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Full spectrum of ``H + V`` by dense diagonalization (reference only)."""
        return np.linalg.eigvalsh(self.H_total)

    def low_band_eigenvalues(self, count: int | None = None, tol: float = 1e-13,
                             max_iter: int = 100) -> np.ndarray:
        """Lowest ``count`` eigenvalues of ``H + V`` from the low band.

        An eigenvalue ``E`` below the spectrum of ``H~_+`` satisfies
        ``E = lambda_j(Sigma_-(E))`` with ``j`` its rank, and
        ``lambda_j(Sigma_-(E)) - E`` is strictly decreasing in ``E``. Each rank
        is solved by secant iteration; ranks sitting at the same energy share
        one self-energy evaluation.
        """
        count = self.n_low if count is None else count
        cache: dict[float, np.ndarray] = {}

        def spectrum(E):
            key = float(E)
            if key not in cache:
                cache[key] = np.linalg.eigvalsh(self.self_energy(key))
            return cache[key]

        E0 = spectrum(0.0)[:count].copy()
        out = np.empty(count)
        for j in range(count):
            a, fa = 0.0, E0[j]
            b = E0[j]
            if j and abs(out[j - 1] - b) <= tol * max(1.0, abs(b)):
                b = out[j - 1]
            fb = spectrum(b)[j] - b
            for _ in range(max_iter):
                if abs(fb) <= tol * max(1.0, abs(b)) or fb == fa:
                    break
                a, fa, b = b, fb, b - fb * (b - a) / (fb - fa)
                fb = spectrum(b)[j] - b
            else:
                raise ArithmeticError(f"low-band eigenvalue {j} did not converge")
            out[j] = b
        return out


def materialize(model: GadgetModel, max_qubits: int = MAX_QUBITS) -> DenseGadget:
    """Explicit ``H`` (diagonal) and ``V`` for ``model``.

    Register ``i``'s first coupling carries ``sign(c_i) * (-1)^(k-1)`` so the
    k-th order term reproduces the sign of ``c_i`` at ``z = 0``.
    """
    n = model.n_qubits
    if n > max_qubits:
        raise DenseCapExceeded(f"{n} qubits exceeds the dense cap of {max_qubits}")
    dim = 1 << n
    idx = np.arange(dim)
    table = model.energy_levels
    h = np.zeros(dim)
    V = sp.csr_matrix((dim, dim), dtype=complex)
    parity = (-1) ** (model.k - 1)
    for i, term in enumerate(model.target.terms):
        weight = np.zeros(dim, dtype=int)
        for j in range(model.k):
            weight += (idx >> model.ancilla(i, j)) & 1
        h += table[weight]
        for j, (q, p) in enumerate(term.factors):
            coeff = model.lambdas[i] * (model.signs[i] * parity if j == 0 else 1)
            V = V + coeff * pauli_sparse([(q, p), (model.ancilla(i, j), "X")], n)
    low = h < model.delta / 2
    return DenseGadget(model, h, V.tocsr(), low, ~low)


def ferromagnetic_h(model: GadgetModel) -> np.ndarray:
    """``H`` assembled from its ``Z Z`` couplings; independent of ``materialize``."""
    n = model.n_qubits
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    scale = model.delta / (2 * (model.k - 1))
    eye = np.eye(1 << n)
    for i in range(model.m):
        for s in range(model.k):
            for t in range(s + 1, model.k):
                zz = pauli_matrix([(model.ancilla(i, s), "Z"), (model.ancilla(i, t), "Z")], n)
                H += scale * (eye - zz)
    return H


# --------------------------------------------------------------------------
# Spectral comparison
# --------------------------------------------------------------------------

@dataclass
class SpectralReport:
    """Dense errors at one ``delta``.

    ``sigma_err[i]`` is ``||Sigma_-(z_i) - H_eff(z_i)||`` where ``H_eff(z)``
    keeps orders up to k at the same ``z``; at ``z = 0`` it is the fixed
    effective Hamiltonian. ``sigma_err_fixed`` compares against the fixed one
    at every grid point.
    """

    delta: float
    z_grid: np.ndarray
    sigma_err: np.ndarray
    sigma_err_z0: float
    spectral_err: float
    per_order_norms: dict[int, float]
    shift: float
    sigma_err_fixed: np.ndarray | None = None

    @property
    def max_sigma_err(self) -> float:
        return float(np.nanmax(self.sigma_err))

    def to_dict(self) -> dict:
        out = {
            "delta": self.delta,
            "z_grid": self.z_grid.tolist(),
            "sigma_err": self.sigma_err.tolist(),
            "max_sigma_err": self.max_sigma_err,
            "sigma_err_z0": self.sigma_err_z0,
            "spectral_err": self.spectral_err,
            "per_order_norms": {str(r): v for r, v in self.per_order_norms.items()},
            "shift": self.shift,
        }
        if self.sigma_err_fixed is not None:
            out["sigma_err_fixed"] = self.sigma_err_fixed.tolist()
        return out


def spectral_error(dense: DenseGadget, h_eff: np.ndarray | None = None) -> float:
    """Max rank-matched gap between the lowest ``2^n_sys`` eigenvalues."""
    h_eff = dense.effective_hamiltonian() if h_eff is None else h_eff
    n_low = 1 << dense.model.n_sys
    gadget = dense.low_band_eigenvalues(n_low)
    target = np.linalg.eigvalsh(h_eff)[:n_low]
    return float(np.max(np.abs(gadget - target)))


def _grid_map(fn, z_grid, threads: int) -> np.ndarray:
    def one(z):
        try:
            return fn(z)
        except IllConditioned:
            return float("nan")

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return np.array(list(pool.map(one, z_grid)))
    return np.array([one(z) for z in z_grid])


def sigma_errors(dense: DenseGadget, z_grid: Sequence[float], h_eff: np.ndarray | None = None,
                 threads: int = 1) -> np.ndarray:
    """``||Sigma_-(z) - H_eff||_2`` on a grid (NaN where unusable).

    With ``h_eff=None`` the reference is the order-k truncation at each ``z``;
    otherwise the given fixed matrix.
    """
    if h_eff is None:
        return _grid_map(lambda z: spectral_norm(dense.self_energy(z) - dense.truncated_self_energy(z)),
                         z_grid, threads)
    return _grid_map(lambda z: spectral_norm(dense.self_energy(z) - h_eff), z_grid, threads)


def spectral_report(model: GadgetModel, z_star: float, n_z: int = 11, orders: Sequence[int] = (),
                    threads: int = 1, dense: DenseGadget | None = None) -> SpectralReport:
    """Dense errors of ``H_eff`` against the gadget.

    ``sigma_err`` is sampled on ``n_z`` uniform points of ``[-z_star, z_star]``;
    ``orders`` selects which ``||T_r(0)||`` to record.
    """
    dense = materialize(model) if dense is None else dense
    h_eff = dense.effective_hamiltonian()
    grid = np.linspace(-z_star, z_star, n_z) if n_z > 1 else np.array([0.0])
    sig = sigma_errors(dense, grid, threads=threads)
    fixed = sigma_errors(dense, grid, h_eff, threads)
    sig0 = sigma_errors(dense, [0.0])[0]
    norms = {r: spectral_norm(dense.T_r(r, 0.0)) for r in orders}
    return SpectralReport(model.delta, grid, sig, float(sig0), spectral_error(dense, h_eff), norms,
                          shift=float(signed_shift(model, 0.0)), sigma_err_fixed=fixed)


# --------------------------------------------------------------------------
# Binary dump
# --------------------------------------------------------------------------

MAGIC = b"GGDM"
VERSION = 1


def dump_matrix(path, a: np.ndarray) -> None:
    """Header ``GGDM``, u32 version, u64 dim; then row-major LE f64 (re, im) pairs."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<IQ", VERSION, a.shape[0]))
        fh.write(a.astype("<c16").tobytes(order="C"))


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if head[:4] != MAGIC:
            raise ValueError("not a GGDM file")
        version, dim = struct.unpack("<IQ", head[4:])
        if version != VERSION:
            raise ValueError(f"unsupported GGDM version {version}")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != dim * dim:
        raise ValueError("truncated GGDM payload")
    return data.reshape(dim, dim).astype(np.complex128)
