import math

import pytest

from gadgetopt.gadget import build_gadget
from gadgetopt.optimize import (BudgetUnreachable, NotMonotone, OptimizeRequest, alpha_sweep,
                                make_estimator, optimize_delta)
from gadgetopt.pauli import parse_target
from gadgetopt.walks import total_error_bound


def test_defaults(pair_target):
    req = OptimizeRequest(pair_target, 0.1)
    assert req.z_star == pytest.approx(0.4)
    assert req.delta_lo == pytest.approx(1.6)
    assert req.delta_hi == pytest.approx(4e7)


@pytest.mark.parametrize("kwargs", [
    dict(epsilon=0.0), dict(epsilon=0.1, method="magic"), dict(epsilon=0.1, delta_lo=10, delta_hi=5),
    dict(epsilon=0.1, delta_lo=1.0), dict(epsilon=0.1, rel_tol=0), dict(epsilon=0.1, dense_metric="x"),
])
def test_request_validation(pair_target, kwargs):
    with pytest.raises(ValueError):
        OptimizeRequest(pair_target, **kwargs)


def test_walkbound_bracketing_certificate(pair_target):
    req = OptimizeRequest(pair_target, 0.05, "walkbound")
    res = optimize_delta(req)
    est = make_estimator(req)
    assert res.report.total_bound <= 0.05
    assert est(res.delta_opt * (1 + 2 * req.rel_tol))[0] <= 0.05
    assert est(res.delta_opt / (1 + 2 * req.rel_tol))[0] > 0.05
    assert res.to_dict()["report"]["delta"] == res.delta_opt


def test_simple_needs_larger_gap(pair_target):
    walk = optimize_delta(OptimizeRequest(pair_target, 0.1, "walkbound")).delta_opt
    simple = optimize_delta(OptimizeRequest(pair_target, 0.1, "simple")).delta_opt
    assert simple > walk


def test_huge_budget_returns_floor(pair_target):
    req = OptimizeRequest(pair_target, 1e6, "walkbound", delta_lo=50.0, z_slack=0.1)
    assert total_error_bound(build_gadget(pair_target, 50.0, normalize=True), req.z_star).total_bound < 1e6
    assert optimize_delta(req).delta_opt == 50.0


def test_doubling_expands_hi(pair_target):
    req = OptimizeRequest(pair_target, 0.01, "walkbound", delta_lo=10.0, delta_hi=20.0)
    res = optimize_delta(req)
    assert res.delta_opt > 20.0


def test_budget_unreachable(pair_target):
    req = OptimizeRequest(pair_target, 0.1, delta_lo=10.0, delta_hi=20.0)
    with pytest.raises(BudgetUnreachable):
        optimize_delta(req, estimator=lambda d: (1.0, None))


def test_monotonicity_violation(pair_target):
    req = OptimizeRequest(pair_target, 0.1, delta_lo=10.0, delta_hi=1e4)

    def bumpy(delta):
        if delta >= 1e4:
            return 0.05, None
        return (0.5 if 100 < delta < 1000 else 0.2), None

    with pytest.raises(NotMonotone):
        optimize_delta(req, estimator=bumpy)


def test_infinite_estimates_are_tolerated(pair_target):
    req = OptimizeRequest(pair_target, 0.1, delta_lo=2.0, delta_hi=1e4)
    res = optimize_delta(req, estimator=lambda d: (math.inf if d < 100 else 10 / d, None))
    assert res.delta_opt == pytest.approx(100, rel=2e-3)


def test_alpha_sweep_single_point(pair_target):
    rows = alpha_sweep(pair_target, [0.3], 0.1, with_dense=False)
    assert len(rows) == 1
    row = rows[0]
    assert row.alpha == 0.3 and math.isnan(row.delta_dense)
    assert row.ratio == row.delta_simple / row.delta_walkbound > 1


def test_dense_method_small_target():
    t = parse_target("0.1 X0 X1 X2")
    walk = optimize_delta(OptimizeRequest(t, 0.05, "walkbound"))
    dense = optimize_delta(OptimizeRequest(t, 0.05, "dense"))
    assert dense.delta_opt <= walk.delta_opt * (1 + 1e-3)
    assert dense.report.max_sigma_err <= 0.05
