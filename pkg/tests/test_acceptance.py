"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criteria 4 and 5 carry sub-asserts that are known-unreproducible from the
published values (see notes outside the package); they are asserted exactly
as stated and are expected to fail honestly rather than being loosened.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

import gramdelta as gd
from gramdelta.discriminant import _ExtremumSolver
from gramdelta.gram import GramKind, RecordSource


REPORT_LINES: list[str] = []


def _line(num: int, ok: bool, detail: str) -> str:
    text = f"CRITERION {num:02d} {'PASS' if ok else 'FAIL'} - {detail}"
    print(text)
    REPORT_LINES[:] = [l for l in REPORT_LINES if not l.startswith(f"CRITERION {num:02d} ")]
    REPORT_LINES.append(text)
    return text


@pytest.fixture(scope="module")
def model():
    return gd.riemann_model()


def test_c01_gram_point_contract(model):
    start = time.perf_counter()
    worst_resid, worst_gap = 0.0, 0.0
    for n in [0, 90, 126, 6708, 730119, 9807962]:
        g = gd.gram_point(model, n)
        resid = abs(model.theta(g) - math.pi * n) / max(1.0, math.pi * n)
        worst_resid = max(worst_resid, resid)
        worst_gap = max(worst_gap, abs(gd.gram_point_seed(model, n) - g))
    elapsed = time.perf_counter() - start
    ok = worst_resid <= 1e-9 and worst_gap < 0.5 and elapsed < 1.0
    assert ok, _line(1, ok, f"resid={worst_resid:.1e} gap={worst_gap:.2e} {elapsed:.2f}s")
    _line(1, ok, f"theta residual {worst_resid:.1e}, seed gap {worst_gap:.2e}, {elapsed:.2f}s")


def test_c02_first_bad_gram_point(model):
    start = time.perf_counter()
    kinds = [gd.classify(model, n).kind for n in range(0, 127)]
    elapsed = time.perf_counter() - start
    ok = all(k is GramKind.GOOD for k in kinds[:126]) \
        and kinds[126] is GramKind.BAD and elapsed < 5.0
    assert ok, _line(2, ok, f"first bad at {kinds.index(GramKind.BAD) if GramKind.BAD in kinds else None}")
    _line(2, ok, f"n=126 is the first bad Gram point, {elapsed:.2f}s")


def test_c03_hessian_anchors(model):
    start = time.perf_counter()
    anchors = {90: 0.00203615, 126: 2.22893}
    details = []
    ok = True
    for n, ref in anchors.items():
        closed = gd.closed_forms(model, n).hessian_quadratic
        ok &= abs(closed - ref) / ref <= 0.01
        h = 0.01
        d0 = 1.0 if n % 2 == 0 else -1.0
        solver = _ExtremumSolver(model, n, gd.gram_point(model, n))

        def delta(r):
            sol = solver.solve(float(r), solver.g0)
            return solver.value(float(r), sol[0])

        fd = (delta(h) - 2 * d0 + delta(-h)) / h ** 2
        fd2 = (delta(h / 2) - 2 * d0 + delta(-h / 2)) / (h / 2) ** 2
        richardson = (4 * fd2 - fd) / 3
        ok &= abs(richardson - closed) / abs(closed) <= 1e-3
        details.append(f"H_{n}={closed:.6g} (ref {ref}, fd {richardson:.6g})")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10.0
    assert ok, _line(3, ok, "; ".join(details))
    _line(3, ok, "; ".join(details) + f", kappa=4, {elapsed:.1f}s")


def test_c04_viscosity_anchors(model):
    start = time.perf_counter()
    anchors = [(6708, 6.41706, 0.01), (730119, 4.46023, 0.01),
               (9807962, 0.0750883, 0.02)]
    details, ok = [], True
    for n, ref, tol in anchors:
        mu = gd.classify(model, n).viscosity
        good = abs(mu - ref) / ref <= tol
        ok &= good
        details.append(f"mu({n})={mu:.6g} vs {ref} [{'ok' if good else 'OFF'}]")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 5.0
    _line(4, ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert ok, "known-unreproducible paper value at n=9807962 (true 0.0425): " + "; ".join(details)


def test_c05_newton_table(model):
    start = time.perf_counter()
    table = {
        6708: [7004.95, 7005.01, 7005.04, 7005.05, 7005.06],
        6709: [7005.84, 7005.23, 7005.15, 7005.12, 7005.10],
    }
    details, ok = [], True
    for n, refs in table.items():
        res = gd.find_zero_newton(model, gd.core_zero(model, n))
        diffs = [abs(res.iterates[k] - refs[k]) for k in range(5)]
        good = all(d <= 0.005 for d in diffs)
        ok &= good
        details.append(f"n={n} max|iter-table|={max(diffs):.4f} [{'ok' if good else 'OFF'}]")
    mis = gd.find_zero_newton(model, 450613.9648)
    hits = abs(mis.t - 450613.8004) <= 5e-4
    avoids = abs(mis.t - 450613.7144) > 5e-4
    ok &= hits and avoids
    details.append(f"misconvergence t={mis.t:.4f} "
                   f"[{'ok' if hits else 'OFF'}; adjacent-zero outcome {'ok' if avoids else 'OFF'}]")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30.0
    _line(5, ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert ok, ("Table 1 encodes true-Z Newton iterates; the robust-AFE run "
                "differs at the Lehmer pair (see notes): " + "; ".join(details))


def test_c06_discriminant_traces(model):
    start = time.perf_counter()
    ok = True
    details = []
    for n in [90, 126, 6708]:
        trace = gd.track_extremum(model, n, gd.linear_curve(model, n), steps=200)
        good = trace.status is gd.TraceStatus.NON_COLLIDING and trace.sign_invariant()
        ok &= good
        details.append(f"n={n}:{trace.status.value}")
    trace = gd.track_extremum(model, 730119, gd.linear_curve(model, 730119), steps=200)
    collided = trace.status is gd.TraceStatus.COLLISION and trace.r_event is not None \
        and 0.2 < trace.r_event < 0.3
    ok &= collided
    details.append(f"n=730119:{trace.status.value}@r={trace.r_event:.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600.0
    assert ok, _line(6, ok, "; ".join(details))
    _line(6, ok, "; ".join(details) + f", {elapsed:.0f}s")


def test_c07_derivative_oracles(model):
    start = time.perf_counter()
    eps = 1e-5
    ok = True
    for n in [90, 126]:
        g0 = gd.gram_point(model, n)
        solver = _ExtremumSolver(model, n, g0)
        rep = gd.closed_forms(model, n)
        dim = model.robust_cutoff(g0)
        sign0 = 1.0 if n % 2 == 0 else -1.0
        for k in [0, 1, 2, 4, 9, 19]:
            a = np.zeros(dim)
            a[k] = eps
            sol = solver.solve(a, g0)
            fd_delta = (solver.value(a, sol[0]) - sign0) / eps
            ok &= abs(fd_delta - rep.grad_delta[k]) <= 1e-4
            if abs(rep.grad_gram[k]) > 1e-3:
                ok &= abs((sol[0] - g0) / eps - rep.grad_gram[k]) \
                    <= 1e-3 * abs(rep.grad_gram[k])
        h = 0.01
        fd = (solver.value(h, solver.solve(h, g0)[0]) - 2 * sign0
              + solver.value(-h, solver.solve(-h, g0)[0])) / h ** 2
        fd2 = (solver.value(h / 2, solver.solve(h / 2, g0)[0]) - 2 * sign0
               + solver.value(-h / 2, solver.solve(-h / 2, g0)[0])) / (h / 2) ** 2
        richardson = (4 * fd2 - fd) / 3
        ok &= abs(richardson - rep.hessian_quadratic) <= 1e-3 * abs(rep.hessian_quadratic)
    elapsed = time.perf_counter() - start
    assert ok, _line(7, ok, "finite-difference checks")
    _line(7, ok, f"gradient/Gram-shift/Hessian FD checks at n=90,126, {elapsed:.1f}s")


def test_c08_adjustment_identities(model):
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in rng.integers(100, 10 ** 6, size=20):
        rep = gd.adjustments(model, int(n))
        worst = max(worst, rep.residual_z, rep.residual_zprime)
    ok = worst <= 1e-10
    g = gd.gram_point(model, 730119)
    rep = gd.adjustments(model, 730119)
    target = math.log(g / (2 * math.pi)) / math.pi
    ok &= abs(rep.alpha_s[-1] - target) / target <= 0.01
    elapsed = time.perf_counter() - start
    assert ok, _line(8, ok, f"worst residual {worst:.2e}")
    _line(8, ok, f"worst synthetic residual {worst:.2e}, alpha_s endpoint ok, {elapsed:.1f}s")


def test_c09_gbg_desk_scan(model):
    start = time.perf_counter()
    report = gd.gbg_scan(model, 0, 5000)
    isolated_bad = [b for b in report.bad_points if b.isolated]
    ok = bool(isolated_bad) and all(b.viscosity > 4.0 for b in isolated_bad)
    source = RecordSource(model)
    rec = source.get(9807962)
    scan = gd.gbg_scan(model, 9807962, 9807962, source=source)
    point = scan.bad_points[0]
    ok &= rec.kind is GramKind.BAD and point.corrupt and not point.isolated
    block = gd.blocks(model, 9807960, 9807963, source=source)[0]
    ok &= block.start == 9807960 and block.length == 3 \
        and 9807962 in block.interior_bad
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120.0
    assert ok, _line(9, ok, "G-B-G scan")
    _line(9, ok, f"{len(isolated_bad)} isolated bad in [0,5000], min visc "
                 f"{min(b.viscosity for b in isolated_bad):.2f} > 4; corrupt 9807962 "
                 f"interior to length-3 block, {elapsed:.0f}s")


def test_c10_term_table_regression(model):
    from test_curves import PAPER_A, PAPER_B
    start = time.perf_counter()
    table = gd.term_table(model, 730119, 15)
    ok = all(abs(table.a[i] - PAPER_A[i]) <= 0.005 for i in range(15))
    ok &= all(abs(table.b[i] - PAPER_B[i]) <= 0.05 for i in range(15))
    ok &= gd.select_shift_indices(model, 730119, 1.5) == {1, 2, 4, 6, 12}
    elapsed = time.perf_counter() - start
    assert ok, _line(10, ok, "term table")
    _line(10, ok, f"all 30 A/B entries match to 2 decimals; "
                  f"selection {{1,2,4,6,12}}, {elapsed:.1f}s")


def test_c11_corrected_curve(model):
    start = time.perf_counter()
    rep = gd.corrected_curve(model, 730119, tau=1.5, steps=200)
    ok = rep.verdict == "true" and rep.descent.energy_ok
    pts = [(p.r1, p.r2) for p in rep.shifting.points]
    detail = []
    for wr1, wr2 in [(0.25, 0.05), (0.55, 0.15), (0.75, 0.25), (1.0, 0.41)]:
        i = min(range(len(pts)), key=lambda j: abs(pts[j][0] - wr1))
        diff = abs(pts[i][1] - wr2)
        ok &= diff <= 0.1
        detail.append(f"r1={wr1}:dr2={diff:.3f}")
    sign = -1.0
    ok &= all(sign * p.delta > 0 for p in rep.points)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1800.0
    assert ok, _line(11, ok, f"verdict={rep.verdict} " + " ".join(detail))
    _line(11, ok, f"verdict true, waypoints within 0.1 ({' '.join(detail)}), "
                  f"energy bound holds, {elapsed:.0f}s")


def test_c12_dh_violation(model):
    start = time.perf_counter()
    rep = gd.dh_violation_experiment(steps=100)
    ok = rep.violation
    ok &= rep.first_order_deviation_ratio < 0.15
    ok &= rep.max_displacement < rep.displacement_bound
    contrast = gd.riemann_contrast(0, 199, steps=50)
    ok &= contrast.clean
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60.0
    assert ok, _line(12, ok, "DH violation")
    _line(12, ok, f"DH corrected-law violation at n=44 (collision r={rep.collision_r:.3f}), "
                  f"deviation ratio {rep.first_order_deviation_ratio:.3f}, "
                  f"0 Riemann violations in [0,199], {elapsed:.0f}s")


def test_c13_monte_carlo(model):
    start = time.perf_counter()
    n = 730119
    gv = gd.gram_vectors(model, n, trials=1000, seed=42)
    vals = gd.classical_afe(model, gd.gram_point(model, n))
    sign = -1.0 if n % 2 else 1.0
    se = gv.baseline_standard_error()
    ok = abs(gv.sum_baseline()) <= 3.0 * se
    ok &= abs(gv.sum_essential() - sign * vals.z / 2.0) <= 3.0 * se
    rerun = gd.gram_vectors(model, n, trials=1000, seed=42)
    ok &= np.array_equal(gv.baseline, rerun.baseline) \
        and np.array_equal(gv.essential, rerun.essential) \
        and np.array_equal(gv.sorted_v, rerun.sorted_v)
    elapsed = time.perf_counter() - start
    assert ok, _line(13, ok, "Monte-Carlo")
    _line(13, ok, f"baseline within 3SE ({abs(gv.sum_baseline()):.3f} <= {3*se:.3f}), "
                  f"essential sum matches, bit-identical rerun, {elapsed:.1f}s")
