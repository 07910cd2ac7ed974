"""Smallest gap ``delta`` whose error estimate meets a budget ``epsilon``.

Bisection runs on ``log(delta)``. Estimators return ``inf`` where they are
undefined (tail series not convergent, resolvent unusable), which keeps them
monotone non-increasing in ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dense import DenseCapExceeded, materialize, sigma_errors, spectral_error, spectral_report
from .gadget import build_gadget, default_z_star
from .pauli import TargetHamiltonian
from .walks import GapTooSmall, simple_bound, total_error_bound

METHODS = ("walkbound", "simple", "dense")
MAX_DOUBLINGS = 60


class NotMonotone(ArithmeticError):
    pass


class BudgetUnreachable(ArithmeticError):
    pass


@dataclass
class OptimizeRequest:
    target: TargetHamiltonian
    epsilon: float
    method: str = "walkbound"
    delta_lo: float | None = None
    delta_hi: float | None = None
    rel_tol: float = 1e-3
    z_slack: float | None = None
    normalize: bool = True
    order_tol: float = 1e-8
    max_order: int = 60
    dense_metric: str = "sigma"
    n_z: int = 11
    threads: int = 1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.dense_metric not in ("sigma", "spectral"):
            raise ValueError("dense_metric must be 'sigma' or 'spectral'")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.delta_lo is None:
            self.delta_lo = 4 * self.z_star
        if self.delta_hi is None:
            self.delta_hi = 1e8 * self.z_star
        if not 0 < self.delta_lo < self.delta_hi:
            raise ValueError("need 0 < delta_lo < delta_hi")
        if self.delta_lo < 4 * self.z_star:
            raise ValueError(f"delta_lo below the floor 4*z_star={4 * self.z_star:g}")

    @property
    def z_star(self) -> float:
        slack = self.epsilon if self.z_slack is None else self.z_slack
        return default_z_star(self.target, slack)


@dataclass
class OptimizeResult:
    delta_opt: float
    method: str
    epsilon: float
    iterations: int
    report: object
    history: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "delta_opt": self.delta_opt,
            "method": self.method,
            "epsilon": self.epsilon,
            "iterations": self.iterations,
            "report": self.report.to_dict() if self.report is not None else None,
        }


def make_estimator(req: OptimizeRequest) -> Callable[[float], tuple[float, object]]:
    """``delta -> (error estimate, report)`` for the requested method."""
    z_star = req.z_star

    def model_at(delta):
        return build_gadget(req.target, delta, normalize=req.normalize)

    if req.method == "walkbound":
        def est(delta):
            try:
                rep = total_error_bound(model_at(delta), z_star, req.order_tol, req.max_order)
            except GapTooSmall:
                return math.inf, None
            return rep.total_bound, rep
    elif req.method == "simple":
        def est(delta):
            try:
                return simple_bound(model_at(delta), z_star), None
            except GapTooSmall:
                return math.inf, None
    else:
        grid = np.linspace(-z_star, z_star, req.n_z)

        def est(delta):
            # Only the selected metric is computed per probe; the full report
            # is rebuilt once for the returned optimum.
            dense = materialize(model_at(delta))
            if req.dense_metric == "sigma":
                values = sigma_errors(dense, grid, threads=req.threads)
                value = math.inf if np.any(np.isnan(values)) else float(np.max(values))
            else:
                value = spectral_error(dense)
            return value, None
    return est


def optimize_delta(req: OptimizeRequest, estimator=None) -> OptimizeResult:
    """Bisect ``log(delta)`` for the smallest ``delta`` with estimate ``<= epsilon``.

    Raises:
        BudgetUnreachable: still above budget after doubling ``delta_hi``
            ``MAX_DOUBLINGS`` times.
        NotMonotone: the estimate increases across three interior spot checks.
        DenseCapExceeded: dense method on a model beyond the qubit cap.
    """
    est = make_estimator(req) if estimator is None else estimator
    eps = req.epsilon
    lo, hi = float(req.delta_lo), float(req.delta_hi)
    history = []
    calls = 0

    def probe(delta):
        nonlocal calls
        calls += 1
        value, rep = est(delta)
        history.append((delta, value))
        return value, rep

    v_lo, rep_lo = probe(lo)
    if v_lo <= eps:
        hi, rep_hi = lo, rep_lo
        return _finish(req, estimator, hi, calls, rep_hi, history)
    v_hi, rep_hi = probe(hi)
    doublings = 0
    while v_hi > eps:
        if doublings == MAX_DOUBLINGS:
            raise BudgetUnreachable(f"estimate {v_hi:.3g} > epsilon {eps:g} at delta {hi:.3g}")
        lo, v_lo = hi, v_hi
        hi *= 2
        doublings += 1
        v_hi, rep_hi = probe(hi)

    checks = [probe(x)[0] for x in np.geomspace(lo, hi, 5)[1:-1]]
    seq = [v_lo] + checks + [v_hi]
    if any(b > a for a, b in zip(seq, seq[1:]) if math.isfinite(b)):
        raise NotMonotone(f"estimate not monotone on [{lo:.4g}, {hi:.4g}]: {seq}")

    while hi / lo > 1 + req.rel_tol:
        mid = math.sqrt(lo * hi)
        v, rep = probe(mid)
        if v <= eps:
            hi, rep_hi = mid, rep
        else:
            lo = mid
    return _finish(req, estimator, hi, calls, rep_hi, history)


def _finish(req, estimator, delta, calls, report, history) -> OptimizeResult:
    if req.method == "dense" and estimator is None:
        model = build_gadget(req.target, delta, normalize=req.normalize)
        report = spectral_report(model, req.z_star, n_z=req.n_z, threads=req.threads)
    return OptimizeResult(delta, req.method, req.epsilon, calls, report, history)


@dataclass
class AlphaRow:
    alpha: float
    delta_simple: float
    delta_walkbound: float
    delta_dense: float

    @property
    def ratio(self) -> float:
        return self.delta_simple / self.delta_walkbound


def alpha_sweep(target: TargetHamiltonian, alphas: Sequence[float], epsilon: float, index: int = 0,
                with_dense: bool = True, **kwargs) -> list[AlphaRow]:
    """Optimized ``delta`` per method as coefficient ``index`` takes each ``alpha``.

    ``delta_dense`` is NaN when ``with_dense`` is off or the model exceeds the
    dense cap.
    """
    rows = []
    for alpha in alphas:
        t = target.with_coefficient(index, float(alpha))
        out = {}
        for method in METHODS:
            if method == "dense" and not with_dense:
                out[method] = math.nan
                continue
            try:
                out[method] = optimize_delta(OptimizeRequest(t, epsilon, method, **kwargs)).delta_opt
            except DenseCapExceeded:
                out[method] = math.nan
        rows.append(AlphaRow(float(alpha), out["simple"], out["walkbound"], out["dense"]))
    return rows
