"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line to the terminal (capture is bypassed) before asserting.
"""
import math
import time

import numpy as np
import pytest

from gadgetopt.combinatorics import monomial_symmetric, monomial_symmetric_bruteforce
from gadgetopt.dense import materialize, pauli_matrix, spectral_norm, spectral_report
from gadgetopt.gadget import build_gadget, transition_matrix
from gadgetopt.optimize import OptimizeRequest, optimize_delta
from gadgetopt.pauli import parse_target
from gadgetopt.sw import fd_sw_compare, embedded_fd_term
from gadgetopt.walks import (enumerate_reduced_sequences, iter_slot_walks, low_energy_config,
                             perturb_bound, total_error_bound, walk_bound)

from conftest import rel_err


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return emit


def monotone_decreasing(xs, slack=1e-12):
    return all(b <= a * (1 + slack) for a, b in zip(xs, xs[1:]))


def test_criterion_1_closed_forms(verdict):
    t0 = time.perf_counter()
    d = materialize(build_gadget(parse_target("0.1 X0 X1 X2"), 1e3, normalize=True))
    mu, delta = d.model.lambdas[0], 1e3
    T2_expected = 3 * mu ** 2 / (0 - delta) * np.eye(d.n_low)
    flip = d.register_flip([0]) @ pauli_matrix([(0, "X"), (1, "X"), (2, "X")], d.model.n_qubits)
    T3_expected = 0.1 * delta ** 2 / delta ** 2 * flip[np.ix_(d.low, d.low)]
    e2 = rel_err(d.T_r(2, 0.0), T2_expected)
    e3 = rel_err(d.T_r(3, 0.0), T3_expected)
    elapsed = time.perf_counter() - t0
    verdict(1, e2 <= 1e-9 and e3 <= 1e-9 and elapsed < 5.0,
            f"T2 rel {e2:.2e}, T3 rel {e3:.2e} (tol 1e-9), {elapsed:.2f}s (limit 5s)")


def test_criterion_2_golden_walks(verdict, pair_target):
    g = build_gadget(pair_target, 1e3, normalize=True)
    z_star = 0.4
    from_zero = enumerate_reduced_sequences(2, 3, 2)
    every = [s for full in range(3)
             for s in enumerate_reduced_sequences(2, 3, 2, start=low_energy_config(2, 3, full))]
    lam = g.lambdas
    closed = 3 * (lam[0] ** 2 + lam[1] ** 2) / (g.energy_levels[1] - z_star)
    total = sum(walk_bound(s[1:], g, z_star) for s in from_zero)
    err = abs(total - closed) / closed
    M = transition_matrix(3)
    (trace,) = list(iter_slot_walks(2, 3, 1))
    path = [0] + [lv[0] for lv in trace.levels]
    omega = tuple(int(M[a, b]) for a, b in zip(path, path[1:]))
    ok = len(from_zero) == 1 and len(every) == 4 and err <= 1e-12 and omega == (3, 1) \
        and trace.touches == (2,) and math.prod(omega) == trace.omega
    verdict(2, ok, f"{len(from_zero)} sequence from origin, {len(every)} over low starts, "
                   f"closed total rel {err:.1e}, Omega={omega}, b={trace.touches}")


def test_criterion_3_sharpness(verdict, pair_target):
    worst = 0.0
    for delta in (1e3, 1e4):
        d = materialize(build_gadget(pair_target, delta, normalize=True))
        for r in (4, 5, 6):
            tau = perturb_bound(r, d.model, 0.0)[0]
            worst = max(worst, abs(tau - spectral_norm(d.T_r(r, 0.0))) / tau)
    verdict(3, worst <= 1e-8, f"max |tau_r - ||T_r(0)|| | / tau_r = {worst:.2e} (tol 1e-8)")


def test_criterion_4_fd_inside_sw(verdict, single_target):
    d = materialize(build_gadget(single_target, 100.0, normalize=True))
    errs = []
    for r in (2, 3, 4):
        T = d.T_r(r, 0.0)
        errs.append(spectral_norm(T - embedded_fd_term(d, r)) / spectral_norm(T))
    verdict(4, max(errs) <= 1e-9, "relative gaps r=2,3,4: " + ", ".join(f"{e:.1e}" for e in errs))


def random_targets(count=10, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        m = 1 + len(out) % 2
        n_sys = int(rng.integers(3, 6))
        terms = []
        for _ in range(m):
            qubits = sorted(rng.choice(n_sys, 3, replace=False).tolist())
            paulis = rng.choice(list("XYZ"), 3).tolist()
            coeff = float(rng.uniform(-0.5, 0.5))
            if abs(coeff) < 1e-3:
                coeff = 0.1
            terms.append(f"{coeff!r} " + " ".join(f"{p}{q}" for q, p in zip(qubits, paulis)))
        out.append(parse_target("\n".join(terms), n_sys=n_sys))
    return out


def test_criterion_5_random_targets(verdict):
    targets = random_targets()
    kinds = {t.pairwise_commuting() for t in targets if t.m == 2}
    failures, worst = [], 0.0
    for i, t in enumerate(targets):
        z_star = float(np.sum(np.abs(t.coefficients))) + 0.1
        for delta in (1e3, 1e4, 1e5):
            g = build_gadget(t, delta, normalize=True)
            bound = total_error_bound(g, z_star).total_bound
            rep = spectral_report(g, z_star)
            sig = rep.max_sigma_err
            worst = max(worst, sig / bound)
            if not (bound >= sig >= rep.spectral_err):
                failures.append((i, delta, bound, sig, rep.spectral_err))
    ok = not failures and kinds == {True, False}
    verdict(5, ok, f"30 cases, max sigma/bound {worst:.3f}, commuting and non-commuting pairs "
                   f"{'both' if kinds == {True, False} else 'not both'} present, failures {failures}")


@pytest.mark.slow
def test_criterion_6_ordering_and_gain(verdict, pair_target):
    z_star = 0.4
    bad = []
    for delta in np.geomspace(1e3, 1e7, 20):
        g = build_gadget(pair_target, float(delta), normalize=True)
        rep = total_error_bound(g, z_star)
        sig = spectral_report(g, z_star, threads=2).max_sigma_err
        if not rep.simple_bound >= rep.total_bound >= sig:
            bad.append(float(delta))
    walk = optimize_delta(OptimizeRequest(pair_target, 0.1, "walkbound"))
    simple = optimize_delta(OptimizeRequest(pair_target, 0.1, "simple"))
    ratio = simple.delta_opt / walk.delta_opt
    spec_err = spectral_report(build_gadget(pair_target, walk.delta_opt, normalize=True), z_star).spectral_err
    ok = not bad and ratio >= 10 and spec_err <= 0.1
    verdict(6, ok, f"ordering violations {bad}, delta_simple/delta_walk = {ratio:.3g}, "
                   f"spectral error at delta_walk {spec_err:.2e}")


def test_criterion_7_sw_vs_fd(verdict, single_target):
    g = build_gadget(single_target, 1e3, normalize=True)
    rows = fd_sw_compare(g, 8, np.logspace(3, 6, 10).tolist())
    fd = [r.fd_error for r in rows]
    sw = [r.sw_error for r in rows]
    spectral = [r.spectral_error for r in rows]
    order = all(s <= f and s >= e and f >= e for f, s, e in zip(fd, sw, spectral))
    mono = all(monotone_decreasing(x) for x in (fd, sw, spectral))
    verdict(7, order and mono, f"sw <= fd and both >= spectral: {order}; all monotone: {mono}; "
                               f"fd/sw at 1e3 = {fd[0] / sw[0]:.3g}")


def test_criterion_8_parity_and_shift(verdict, pair_target, single_target):
    odd = []
    for t in (single_target, pair_target):
        g = build_gadget(t, 1e3, normalize=True)
        for r in range(3, 8, 2):
            gamma = perturb_bound(r, g, 0.0)[1]
            if gamma != 0.0:
                odd.append((t.m, r, gamma))
    shift_err = 0.0
    for t in (single_target, pair_target):
        d = materialize(build_gadget(t, 1e3, normalize=True))
        for r in range(2, 3):  # r < k
            T = d.T_r(r, 0.0)
            c = np.trace(T).real / d.n_low
            pure = spectral_norm(T - c * np.eye(d.n_low))
            shift_err = max(shift_err, pure, abs(c + perturb_bound(r, d.model, 0.0)[1]))
    mono = True
    for t in (single_target, pair_target):
        z_star = float(np.sum(np.abs(t.coefficients))) + 0.1
        vals = [total_error_bound(build_gadget(t, float(x), normalize=True), z_star).total_bound
                for x in np.geomspace(1e2, 1e8, 30)]
        mono &= monotone_decreasing(vals, 0.0)
    ok = not odd and shift_err <= 1e-10 and mono
    verdict(8, ok, f"odd-order shifts {odd or 'all zero'}, low-order shift mismatch {shift_err:.1e}, "
                   f"bound monotone: {mono}")


def test_criterion_9_monomial_oracle(verdict):
    rng = np.random.default_rng(7)
    worst, cases = 0.0, 0
    for total in range(1, 9):
        for parts in _partitions(total):
            for n in range(len(parts), 7):
                x = rng.uniform(0.1, 2.0, n)
                fast = monomial_symmetric(parts, x)
                slow = monomial_symmetric_bruteforce(parts, x)
                worst = max(worst, abs(fast - slow) / abs(slow))
                cases += 1
    verdict(9, worst <= 1e-12, f"{cases} partition/variable cases, max rel {worst:.1e} (tol 1e-12)")


def _partitions(n, cap=None):
    cap = n if cap is None else cap
    if n == 0:
        yield ()
        return
    for first in range(min(n, cap), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest
