"""Walk enumeration bounds on the perturbative terms ``T_r``.

A term ``T_r`` is a sum over ``r``-step walks of the ancilla state that start
and end in the low-energy space and stay above it in between. Walks are
grouped first by the Hamming-weight profile of each register (a
*configuration*), then by the sorted profile (a *reduced configuration*).
Registers are interchangeable up to their coupling strengths, which enter
only through the multiset of per-register touch counts; that multiset is
the partition fed to the monomial symmetric polynomial.

Three routes compute the same per-order sum:

* :func:`perturb_bound` -- dynamic programming over multisets of
  ``(level, touches)`` slot states. Polynomial in the number of registers
  for a fixed order. This is the production path.
* :func:`iter_slot_walks` / :func:`walk_bound` -- explicit depth-first
  enumeration of slot walks, and the weight of one reduced-configuration
  sequence. Used for tracing and cross-checks.
* :func:`configuration_sum` -- labelled per-register dynamic programming,
  exponential in ``m``; an independent reference.

All denominators are ``E - z`` with ``z`` below the gap. Passing the window
edge ``z_star`` gives a bound valid for every ``z <= z_star``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .combinatorics import injective_sum
from .gadget import GadgetModel, transition_matrix, v_norm_upper


class GapTooSmall(ArithmeticError):
    """The geometric tail does not converge (``||V|| >= delta - z``)."""


@dataclass(frozen=True, order=True)
class ReducedConfig:
    """Sorted (non-increasing) register levels."""

    levels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(sorted((int(x) for x in self.levels), reverse=True)))

    def is_low_energy(self, k: int) -> bool:
        return all(x in (0, k) for x in self.levels)

    def energy(self, table: np.ndarray) -> float:
        return float(sum(table[x] for x in self.levels))

    def __iter__(self):
        return iter(self.levels)

    def __len__(self):
        return len(self.levels)


def low_energy_config(m: int, k: int, full: int) -> ReducedConfig:
    """``(k,...,k, 0,...,0)`` with ``full`` registers at level k."""
    return ReducedConfig((k,) * full + (0,) * (m - full))


@dataclass(frozen=True)
class WalkTrace:
    """One slot walk: which slot moves at each step and the resulting levels.

    Slots are labelled in first-touch order. ``levels[s]`` holds the level of
    every touched slot after step ``s + 1``.
    """

    moves: tuple[int, ...]
    levels: tuple[tuple[int, ...], ...]
    touches: tuple[int, ...]
    omega: int

    def reduced(self, m: int) -> tuple[ReducedConfig, ...]:
        return tuple(ReducedConfig(lv + (0,) * (m - len(lv))) for lv in self.levels)


def _denominator(model: GadgetModel, table: np.ndarray, levels, z: float) -> float:
    gap = sum(table[x] for x in levels) - z
    if gap <= 0:
        raise ValueError(f"z={z} is not below the excited energy {gap + z}")
    return gap


def _check_z(model: GadgetModel, z: float) -> None:
    if not z < model.delta:
        raise ValueError(f"z={z} must lie below the gap delta={model.delta}")


# --------------------------------------------------------------------------
# Depth-first enumeration
# --------------------------------------------------------------------------

def iter_slot_walks(r: int, k: int, m: int) -> Iterator[WalkTrace]:
    """Depth-first enumeration of valid ``r``-step slot walks from all-zeros.

    Intermediate states are never low-energy and the final one is. A branch is
    pruned when the slots cannot all reach level 0 or k in the steps left.
    """
    M = transition_matrix(k)
    levels: list[int] = []
    touches: list[int] = []
    moves: list[int] = []
    history: list[tuple[int, ...]] = []

    def distance() -> int:
        return sum(min(x, k - x) for x in levels)

    def rec(step: int, omega: int):
        if step == r:
            yield WalkTrace(tuple(moves), tuple(history), tuple(touches), omega)
            return
        options = list(range(len(levels)))
        if len(levels) < m:
            options.append(len(levels))
        for slot in options:
            new_slot = slot == len(levels)
            if new_slot:
                levels.append(0)
                touches.append(0)
            x = levels[slot]
            for y in (x - 1, x + 1):
                if not 0 <= y <= k:
                    continue
                levels[slot] = y
                low = all(v in (0, k) for v in levels)
                left = r - step - 1
                ok = (low if left == 0 else not low) and distance() <= left
                if ok:
                    touches[slot] += 1
                    moves.append(slot)
                    history.append(tuple(levels))
                    yield from rec(step + 1, omega * int(M[x, y]))
                    history.pop()
                    moves.pop()
                    touches[slot] -= 1
                levels[slot] = x
            if new_slot:
                levels.pop()
                touches.pop()

    yield from rec(0, 1)


def trace_weight(trace: WalkTrace, model: GadgetModel, z: float) -> float:
    """Total weight of every configuration sequence sharing this slot walk."""
    table = model.energy_levels
    denom = math.prod(_denominator(model, table, lv, z) for lv in trace.levels[:-1])
    return trace.omega * injective_sum(trace.touches, model.lambdas) / denom


def enumerate_reduced_sequences(
    r: int, k: int, m: int, start: Sequence[int] | None = None,
    end: Sequence[int] | None = None,
) -> list[tuple[ReducedConfig, ...]]:
    """Valid reduced-configuration sequences of length ``r`` from ``start``.

    ``start`` defaults to all zeros and must be low-energy. Returned
    sequences include the start. With ``end`` only walks finishing there are
    kept. Depth-first over sorted vectors.
    """
    c0 = ReducedConfig(start if start is not None else (0,) * m)
    if len(c0) != m or not c0.is_low_energy(k):
        raise ValueError(f"start {c0.levels} is not a low-energy configuration")
    target = ReducedConfig(end) if end is not None else None
    out: list[tuple[ReducedConfig, ...]] = []
    path = [c0]

    def rec(step: int):
        cur = path[-1].levels
        left = r - step - 1
        for value in sorted(set(cur)):
            for y in (value - 1, value + 1):
                if not 0 <= y <= k:
                    continue
                lv = list(cur)
                lv[lv.index(value)] = y
                nxt = ReducedConfig(lv)
                low = nxt.is_low_energy(k)
                if left == 0:
                    if low and (target is None or nxt == target):
                        out.append(tuple(path) + (nxt,))
                    continue
                if low or sum(min(x, k - x) for x in nxt.levels) > left:
                    continue
                path.append(nxt)
                rec(step + 1)
                path.pop()

    rec(0)
    return out


def walk_bound(seq: Sequence[Sequence[int]], model: GadgetModel, z: float) -> float:
    """Weight of one reduced-configuration sequence ``c_1, ..., c_r``.

    The start ``c_0`` is implicitly all zeros. Returns 0 when the sequence
    cannot occur: the last entry is not low-energy, two consecutive entries
    coincide, an intermediate entry is low-energy, or a step is not a single
    ``+-1`` change. Otherwise sums, over every slot walk whose sorted levels
    follow ``seq``, ``prod 1/(E(c_i) - z) * prod Omega_i * sum_pi prod
    lambda^b``. When the sequence pins a single slot walk this is the
    familiar ``denominators * Omega * m_b(lambda)`` product, up to the
    ordering count of equal parts.
    """
    _check_z(model, z)
    k, m = model.k, model.m
    cfgs = [ReducedConfig(c) for c in seq]
    if not cfgs or any(len(c) != m for c in cfgs):
        return 0.0
    if not cfgs[-1].is_low_energy(k) or any(c.is_low_energy(k) for c in cfgs[:-1]):
        return 0.0
    chain = [ReducedConfig((0,) * m)] + cfgs
    for a, b in zip(chain, chain[1:]):
        if a == b or not _single_step(a.levels, b.levels):
            return 0.0
    table = model.energy_levels
    denom = math.prod(c.energy(table) - z for c in cfgs[:-1])
    M = model.M
    total = 0.0

    def rec(step: int, levels: tuple, touches: tuple, omega: int):
        nonlocal total
        if step == len(cfgs):
            total += omega * injective_sum(touches, model.lambdas)
            return
        want = cfgs[step]
        n = len(levels)
        for slot in range(n + (n < m)):
            lv = list(levels) + [0] * (slot == n)
            tc = list(touches) + [0] * (slot == n)
            x = lv[slot]
            for y in (x - 1, x + 1):
                if not 0 <= y <= k:
                    continue
                lv[slot] = y
                if ReducedConfig(tuple(lv) + (0,) * (m - len(lv))) == want:
                    tc[slot] += 1
                    rec(step + 1, tuple(lv), tuple(tc), omega * int(M[x, y]))
                    tc[slot] -= 1
                lv[slot] = x

    rec(0, (), (), 1)
    return total / denom


def _single_step(a: Sequence[int], b: Sequence[int]) -> bool:
    diff = sorted(b)
    for i, x in enumerate(sorted(a)):
        for y in (x - 1, x + 1):
            cand = sorted(a)
            cand[i] = y
            if sorted(cand) == diff:
                return True
    return False


# --------------------------------------------------------------------------
# Dynamic programming over slot multisets
# --------------------------------------------------------------------------

def order_contributions(r: int, model: GadgetModel, z: float) -> np.ndarray:
    """Per-endpoint weights of order ``r``.

    Entry ``i`` sums the walks ending with ``i`` registers at level k, so
    entry 0 is ``gamma_r`` and entry ``i >= 1`` is ``gamma_{i,r}``.
    """
    if r < 2:
        raise ValueError("order r must be at least 2")
    _check_z(model, z)
    k, m = model.k, model.m
    table = model.energy_levels
    M = model.M
    out = np.zeros(m + 1)
    if not np.any(model.lambdas):
        return out
    # state: sorted tuple of (level, touches) for touched registers
    states: dict[tuple, float] = {(): 1.0}
    for step in range(1, r + 1):
        left = r - step
        nxt: dict[tuple, float] = defaultdict(float)
        for state, weight in states.items():
            counts: dict[tuple[int, int], int] = defaultdict(int)
            for item in state:
                counts[item] += 1
            moves = []
            for (x, t), c in counts.items():
                for y in (x - 1, x + 1):
                    if 0 <= y <= k:
                        moves.append(((x, t), (y, t + 1), c * int(M[x, y])))
            if len(state) < m:
                moves.append((None, (1, 1), int(M[0, 1])))
            for old, new, mult in moves:
                items = list(state)
                if old is not None:
                    items.remove(old)
                items.append(new)
                key = tuple(sorted(items))
                levels = [x for x, _ in key]
                low = all(x in (0, k) for x in levels)
                if left == 0:
                    if low:
                        nxt[key] += weight * mult
                    continue
                if low or sum(min(x, k - x) for x in levels) > left:
                    continue
                gap = sum(table[x] for x in levels) - z
                nxt[key] += weight * mult / gap
        states = nxt
    for state, weight in states.items():
        full = sum(1 for x, _ in state if x == k)
        out[full] += weight * injective_sum([t for _, t in state], model.lambdas)
    return out


def perturb_bound(r: int, model: GadgetModel, z: float) -> tuple[float, float, np.ndarray]:
    """``(tau_r, gamma_r, gamma_i_r)`` with ``tau_r = gamma_r + sum_i gamma_{i,r}``.

    ``gamma_i_r[i-1]`` collects walks ending with ``i`` full registers; only
    ``i <= min(r // k, m)`` can be nonzero. ``gamma_r`` vanishes for odd
    ``r`` and ``gamma_{i,r}`` unless ``r = i k (mod 2)``.
    """
    contrib = order_contributions(r, model, z)
    return float(contrib.sum()), float(contrib[0]), contrib[1:].copy()


def configuration_sum(r: int, model: GadgetModel, z: float) -> np.ndarray:
    """Same quantity as :func:`order_contributions` over labelled registers.

    Tracks the full configuration vector and multiplies coupling strengths
    step by step; ``(k+1)^m`` states, so only for small ``m``.
    """
    _check_z(model, z)
    k, m = model.k, model.m
    table = model.energy_levels
    M = model.M
    lam = model.lambdas
    states: dict[tuple, float] = {(0,) * m: 1.0}
    for step in range(1, r + 1):
        left = r - step
        nxt: dict[tuple, float] = defaultdict(float)
        for cfg, weight in states.items():
            for reg in range(m):
                x = cfg[reg]
                for y in (x - 1, x + 1):
                    if not 0 <= y <= k:
                        continue
                    new = cfg[:reg] + (y,) + cfg[reg + 1:]
                    low = all(v in (0, k) for v in new)
                    w = weight * lam[reg] * M[x, y]
                    if left == 0:
                        if low:
                            nxt[new] += w
                        continue
                    if low or sum(min(v, k - v) for v in new) > left:
                        continue
                    nxt[new] += w / (sum(table[v] for v in new) - z)
        states = nxt
    out = np.zeros(m + 1)
    for cfg, weight in states.items():
        out[sum(1 for v in cfg if v == k)] += weight
    return out


def signed_shift(model: GadgetModel, z: float = 0.0) -> float:
    """Scalar energy shift ``sum_{r<=k} gamma_r(z)`` with its sign.

    Each closed walk of length ``r`` carries ``r - 1`` negative resolvent
    factors. Exact whenever closed walks below order k+1 multiply to the
    identity on the system, which always holds for k = 3 and for targets
    whose single-qubit factors commute.
    """
    return float(sum((-1) ** (r - 1) * order_contributions(r, model, z)[0] for r in range(2, model.k + 1)))


# --------------------------------------------------------------------------
# Error budget
# --------------------------------------------------------------------------

@dataclass
class OrderBound:
    r: int
    tau: float
    gamma: float
    gamma_i: list[float]


@dataclass
class BoundReport:
    delta: float
    z_star: float
    per_order: list[OrderBound]
    truncation_order: int
    tail_bound: float
    total_bound: float
    shift: float
    v_norm: float
    simple_bound: float
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "z_star": self.z_star,
            "per_order": [
                {"r": o.r, "tau_r": o.tau, "gamma_r": o.gamma, "gamma_i_r": o.gamma_i}
                for o in self.per_order
            ],
            "truncation_order": self.truncation_order,
            "tail_bound": self.tail_bound,
            "total_bound": self.total_bound,
            "shift": self.shift,
            "v_norm_upper": self.v_norm,
            "simple_bound": self.simple_bound,
            "params": self.params,
        }


def geometric_tail(v: float, D: float, first: int) -> float:
    """``sum_{r >= first} v^r / D^(r-1)``."""
    if v == 0:
        return 0.0
    if v >= D:
        raise GapTooSmall(f"gap too small for tail bound: ||V|| <= {v:g} >= {D:g}")
    return v * (v / D) ** (first - 1) * D / (D - v)


def simple_bound(model: GadgetModel, z_star: float, v_norm: float | None = None) -> float:
    """Triangle-inequality bound on ``sum_{r > k} ||T_r||``."""
    v = v_norm_upper(model) if v_norm is None else v_norm
    return geometric_tail(v, model.delta - z_star, model.k + 1)


def total_error_bound(
    model: GadgetModel, z_star: float, order_tol: float = 1e-8, max_order: int = 60,
) -> BoundReport:
    """Bound ``||Sigma(z) - H_eff||`` for every ``z <= z_star``.

    Orders ``k+1..p`` use :func:`perturb_bound`; the rest use the geometric
    tail. ``p`` is the first order at which the last two ``tau`` values are
    both at most ``order_tol`` (two, so that parity zeros do not stop the
    scan early), capped at ``max_order``.
    """
    k = model.k
    v = v_norm_upper(model)
    D = model.delta - z_star
    if v >= D:
        raise GapTooSmall(f"gap too small for tail bound: ||V|| <= {v:g} >= delta - z* = {D:g}")
    per_order = []
    for r in range(2, k + 1):
        tau, gamma, gi = perturb_bound(r, model, z_star)
        per_order.append(OrderBound(r, tau, gamma, gi.tolist()))
    shift = sum(o.gamma for o in per_order)
    p = k
    prev = math.inf
    while p < max(max_order, k + 1):
        p += 1
        tau, gamma, gi = perturb_bound(p, model, z_star)
        per_order.append(OrderBound(p, tau, gamma, gi.tolist()))
        if tau <= order_tol and (prev <= order_tol or p == k + 1 and tau == 0):
            break
        prev = tau
    tail = geometric_tail(v, D, p + 1)
    body = sum(o.tau for o in per_order if o.r > k)
    return BoundReport(
        delta=model.delta, z_star=z_star, per_order=per_order, truncation_order=p,
        tail_bound=tail, total_bound=body + tail, shift=shift, v_norm=v,
        simple_bound=geometric_tail(v, D, k + 1),
        params={"order_tol": order_tol, "max_order": max_order, "k": k, "m": model.m,
                "lambdas": model.lambdas.tolist()},
    )

