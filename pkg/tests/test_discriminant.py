from __future__ import annotations

import math

import numpy as np
import pytest

from gramdelta import (TraceStatus, closed_forms, discriminant_at, gram_point,
                       linear_curve, second_order_approx, track_extremum)
from gramdelta.discriminant import _ExtremumSolver
from gramdelta.errors import DimensionError, TraceError


class _ConstantCurve:
    """Stays at the origin of parameter space (degenerate test curve)."""

    def __init__(self, dimension):
        self.dimension = dimension

    def weights_at(self, r):
        return 0.0


class _JumpCurve:
    """Discontinuous at r = 1/2; continuation must give up there."""

    def __init__(self, dimension):
        self.dimension = dimension

    def weights_at(self, r):
        return 0.0 if r < 0.5 else 40.0


def _delta_uniform(model, n, r):
    g0 = gram_point(model, n)
    solver = _ExtremumSolver(model, n, g0)
    sol = solver.solve(float(r), g0)
    return solver.value(float(r), sol[0])


def test_constant_curve_keeps_core_values(riemann):
    n = 91
    g = gram_point(riemann, n)
    curve = _ConstantCurve(riemann.robust_cutoff(g))
    trace = track_extremum(riemann, n, curve, steps=60)
    assert trace.status is TraceStatus.NON_COLLIDING
    for s in trace.samples:
        assert s.delta == pytest.approx(-1.0, abs=1e-9)
        assert s.g == pytest.approx(g, abs=1e-7)


def test_trace_start_sample_invariants(riemann):
    trace = track_extremum(riemann, 90, linear_curve(riemann, 90), steps=60)
    first = trace.samples[0]
    assert first.r == 0.0
    assert first.delta == pytest.approx(1.0, abs=1e-9)
    signs = {math.copysign(1.0, s.ztt) for s in trace.samples}
    assert len(signs) == 1  # curvature never flips on a non-colliding trace


def test_linear_traces_noncolliding(riemann):
    for n in [90, 126]:
        trace = track_extremum(riemann, n, linear_curve(riemann, n), steps=100)
        assert trace.status is TraceStatus.NON_COLLIDING
        assert trace.sign_invariant()


def test_good_point_tracks_first_order(riemann):
    from gramdelta import z_section
    n = 90
    g = gram_point(riemann, n)
    trace = track_extremum(riemann, n, linear_curve(riemann, n), steps=100)
    dev = max(abs(s.delta - z_section(riemann, g, s.r)) for s in trace.samples)
    assert dev < 0.01  # H_90 ~ 0.002: first order is nearly the whole story


def test_discriminant_at_values(riemann):
    assert discriminant_at(riemann, 90, linear_curve(riemann, 90), 0.0) == 1.0
    d126 = discriminant_at(riemann, 126, linear_curve(riemann, 126), 1.0)
    assert d126 > 0  # corrected Gram law at the first classical violation
    d6708 = discriminant_at(riemann, 6708, linear_curve(riemann, 6708), 1.0, steps=100)
    assert d6708 > 0  # holds despite the Lehmer-pair proximity


def test_dimension_mismatch_rejected(riemann):
    with pytest.raises(DimensionError):
        track_extremum(riemann, 90, _ConstantCurve(4), steps=60)


def test_steps_floor(riemann):
    with pytest.raises(ValueError):
        track_extremum(riemann, 90, linear_curve(riemann, 90), steps=10)


def test_continuation_lost_is_a_verdict_not_an_exception(riemann):
    n = 91
    g = gram_point(riemann, n)
    curve = _JumpCurve(riemann.robust_cutoff(g))
    trace = track_extremum(riemann, n, curve, steps=60)
    assert trace.status is TraceStatus.CONTINUATION_LOST
    assert trace.r_event == pytest.approx(0.5, abs=0.02)
    with pytest.raises(TraceError):
        discriminant_at(riemann, n, curve, 1.0, steps=60)


def test_closed_form_hessian_anchors(riemann):
    h90 = closed_forms(riemann, 90).hessian_quadratic
    h126 = closed_forms(riemann, 126).hessian_quadratic
    assert h90 == pytest.approx(0.00203615, rel=0.01)
    assert h126 == pytest.approx(2.22893, rel=0.01)
    assert closed_forms(riemann, 90).hessian_constant == 4.0


def test_hessian_sign_law(riemann):
    assert closed_forms(riemann, 90).hessian_quadratic > 0
    assert closed_forms(riemann, 91).hessian_quadratic < 0


def test_gradient_identity_residual(riemann):
    for n in [90, 126, 6708]:
        rep = closed_forms(riemann, n)
        assert rep.gradient_identity_residual <= 1e-10


def test_grad_delta_formula(riemann):
    n = 126
    g = gram_point(riemann, n)
    rep = closed_forms(riemann, n)
    for k in [1, 2, 7]:
        expect = math.cos(126 * math.pi - math.log(k + 1) * g) / math.sqrt(k + 1)
        assert rep.grad_delta[k - 1] == pytest.approx(expect, abs=1e-9)


def test_finite_difference_gradients(riemann):
    eps = 1e-5
    for n in [90, 126]:
        g0 = gram_point(riemann, n)
        solver = _ExtremumSolver(riemann, n, g0)
        rep = closed_forms(riemann, n)
        n_dim = riemann.robust_cutoff(g0)
        sign0 = 1.0 if n % 2 == 0 else -1.0
        for k in [0, 1, 2, 4, 9, 19]:
            a = np.zeros(n_dim)
            a[k] = eps
            sol = solver.solve(a, g0)
            fd_delta = (solver.value(a, sol[0]) - sign0) / eps
            assert abs(fd_delta - rep.grad_delta[k]) <= 1e-4
            if abs(rep.grad_gram[k]) > 1e-3:
                fd_gram = (sol[0] - g0) / eps
                assert fd_gram == pytest.approx(rep.grad_gram[k], rel=1e-3)


def test_finite_difference_hessian(riemann):
    h = 0.01
    for n in [90, 126]:
        d0 = 1.0 if n % 2 == 0 else -1.0
        fd_h = (_delta_uniform(riemann, n, h) - 2 * d0
                + _delta_uniform(riemann, n, -h)) / h ** 2
        fd_h2 = (_delta_uniform(riemann, n, h / 2) - 2 * d0
                 + _delta_uniform(riemann, n, -h / 2)) / (h / 2) ** 2
        richardson = (4 * fd_h2 - fd_h) / 3
        closed = closed_forms(riemann, n).hessian_quadratic
        assert richardson == pytest.approx(closed, rel=1e-3)


def test_second_order_approx_origin(riemann):
    assert second_order_approx(riemann, 90, 0.0) == pytest.approx(1.0, abs=1e-9)
    assert second_order_approx(riemann, 91, 0.0) == pytest.approx(-1.0, abs=1e-9)


def test_second_order_cubic_decay(riemann):
    n = 90
    errs = [abs(_delta_uniform(riemann, n, r) - second_order_approx(riemann, n, r))
            for r in (0.05, 0.1, 0.2)]
    for ratio in (errs[1] / errs[0], errs[2] / errs[1]):
        assert 4.0 <= ratio <= 16.0  # cubic remainder: ratio ~ 8 within factor 2


def test_second_order_term_magnitude_126(riemann):
    from gramdelta import z_section
    n, r = 126, 0.3
    g = gram_point(riemann, n)
    term = second_order_approx(riemann, n, r) - z_section(riemann, g, r)
    assert term == pytest.approx(0.5 * 2.22893 * r * r, rel=0.01)
    assert term > 0
