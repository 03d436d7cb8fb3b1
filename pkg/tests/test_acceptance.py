"""Acceptance gate: every documented criterion, one PASS/FAIL line each.

Each criterion drives the same suite runner the CLI uses, at the documented
sample counts, tolerances, and runtime budgets.  Run with -s to see the
lines on success; on failure the line is part of the assertion message.
"""

import numpy as np

from twistorlab.riemann import curvature, get_metric
from twistorlab.suites import make_config, run_suite


def _gate(label, report, budget_s, extra_ok=True, extra_msg=""):
    line = (f"[{label}] {'PASS' if (report.passed and extra_ok) else 'FAIL'} "
            f"suite={report.suite} metric={report.metric} "
            f"samples={report.n_samples} max_abs={report.max_abs_err:.3e} "
            f"max_rel={report.max_rel_err:.3e} tol={report.tolerance:g} "
            f"({report.wall_time_ms:.0f} ms)")
    print(line)
    assert report.passed, line
    assert extra_ok, f"{line} :: {extra_msg}"
    assert report.wall_time_ms <= budget_s * 1000.0, f"over budget: {line}"
    return report


def test_criterion_01_structure_algebra():
    """1000 random plus/minus structure pairs commute to 1e-12 in under 1 s."""
    r = run_suite(make_config("algebra", samples=1000, tolerance=1e-12))
    _gate("criterion 01", r, budget_s=1.0)


def test_criterion_02_bracket_identities():
    """Lift/hat bracket identities on three metrics, 20 samples, 1e-5, < 30 s."""
    total = 0.0
    for metric in ("flat", "s4:1.4142135623730951", "conformal_bump:0.1"):
        r = run_suite(make_config("brackets", metric=metric, samples=20,
                                  tolerance=1e-5))
        _gate("criterion 02", r, budget_s=30.0)
        total += r.wall_time_ms
    assert total <= 30_000.0, f"bracket sweep took {total:.0f} ms"


def test_criterion_03_domega_closed_vs_fd():
    """Pure-direction triples of d omega: zeros, the closed (V,H,H) value, and
    the flat reduction to -U_ij; 20 samples per metric, 1e-5, < 30 s."""
    total = 0.0
    for metric in ("flat", "s4:1.0", "conformal_bump:0.1", "xy_bump:0.1"):
        r = run_suite(make_config("domega", metric=metric, samples=20,
                                  tolerance=1e-5))
        _gate("criterion 03", r, budget_s=30.0)
        total += r.wall_time_ms
    assert total <= 30_000.0, f"domega sweep took {total:.0f} ms"


def test_criterion_04_kaehler_radius_criterion():
    """The radius-sqrt2 sphere is Kahler (s = 6, R on Lambda+ = Id/2, and
    |d omega| <= 1e-5 over 20 points); radius 1 fails the Kahler test while
    the finite differences still match the closed formula."""
    m = get_metric("s4", (np.sqrt(2.0),))
    for x in (np.zeros(4), np.array([0.3, -0.2, 0.1, 0.4])):
        d = curvature(m, x)
        assert abs(d.s - 6.0) < 1e-5
        assert np.abs(d.plus_block - 0.5 * np.eye(3)).max() < 1e-5
    r = run_suite(make_config("kaehler", metric="s4:1.4142135623730951",
                              samples=20, tolerance=1e-5))
    _gate("criterion 04", r, budget_s=30.0)

    wrong = run_suite(make_config("kaehler", metric="s4:1.0", samples=20,
                                  tolerance=1e-5))
    ok = (not wrong.passed and wrong.max_abs_err > 10.0 * wrong.tolerance
          and wrong.max_rel_err <= wrong.tolerance)
    print(f"[criterion 04] {'PASS' if ok else 'FAIL'} expected-fail "
          f"suite=kaehler metric=s4:1.0 defect={wrong.max_abs_err:.3e} "
          f"agreement={wrong.max_rel_err:.3e}")
    assert ok, "wrong-radius sphere must fail the Kahler test with FD agreement"


def test_criterion_05_hessian_asd_six_cases():
    """Six closed hessian formulas vs FD, 10 configurations per metric on the
    flat and radius-sqrt2 metrics, 2e-4, sigma calibrated once; < 5 min."""
    total = 0.0
    for metric in ("flat", "s4:1.4142135623730951"):
        r = run_suite(make_config("hessian-asd", metric=metric, samples=10,
                                  tolerance=2e-4))
        _gate("criterion 05", r, budget_s=300.0,
              extra_ok=r.sigma in (-1, 1), extra_msg=f"sigma={r.sigma!r}")
        total += r.wall_time_ms
    assert total <= 300_000.0, f"hessian-asd sweep took {total:.0f} ms"


def test_criterion_06_hessian_hyperkaehler_slot():
    """All 35 pure-type 4-slot multisets on flat space: only the mixed
    (Hh, Vh, Ha, Va) slot is nonzero, matching -1/2 (U2a U1h)_ij; < 2 min."""
    r = run_suite(make_config("hessian-hk", metric="flat", samples=5,
                              tolerance=2e-4))
    _gate("criterion 06", r, budget_s=120.0,
          extra_ok=r.sigma in (-1, 1), extra_msg=f"sigma={r.sigma!r}")


def test_criterion_07_nijenhuis_integrability():
    """N vanishes on the anti-self-dual metrics and is decisively nonzero on
    the self-dual-Weyl perturbation; < 1 min."""
    total = 0.0
    for metric in ("flat", "s4:1.4142135623730951"):
        r = run_suite(make_config("nijenhuis", metric=metric, samples=20,
                                  tolerance=1e-5))
        _gate("criterion 07", r, budget_s=60.0)
        total += r.wall_time_ms
    rb = run_suite(make_config("nijenhuis", metric="xy_bump:0.1", samples=20,
                               tolerance=1e-5))
    ok = rb.passed and rb.max_abs_err > 10.0 * rb.tolerance
    print(f"[criterion 07] {'PASS' if ok else 'FAIL'} detection "
          f"metric=xy_bump:0.1 max|N|={rb.max_abs_err:.3e}")
    assert ok, "perturbed metric must trip the integrability obstruction"
    total += rb.wall_time_ms
    assert total <= 60_000.0, f"nijenhuis sweep took {total:.0f} ms"


def test_criterion_08_cycle_volume_law():
    """vol(twistor line) = fiber area 8 pi to 1e-4 relative; quadratic law
    fits with max relative residual 1e-4, kappa > 0, vol >= V0; < 2 min."""
    r = run_suite(make_config("cycles-vol", samples=50, tolerance=1e-4))
    fiber = 8.0 * np.pi
    extra = (abs(r.V0 - fiber) / fiber <= 1e-4 and r.kappa > 0.0)
    _gate("criterion 08", r, budget_s=120.0, extra_ok=extra,
          extra_msg=f"V0={r.V0!r} kappa={r.kappa!r}")


def test_criterion_09_levi_form_plurisubharmonicity():
    """Levi form matches V0 kappa |n|^2 to 1e-3 relative over 30 draws and
    stays >= -1e-6 over 200 positivity draws; < 3 min."""
    r = run_suite(make_config("cycles-levi", samples=30, tolerance=1e-3))
    _gate("criterion 09", r, budget_s=180.0)


def test_criterion_10_determinism():
    """Same-seed reruns and thread-count changes leave every residual
    bit-for-bit identical."""
    import os

    def strip(rep):
        d = rep.as_dict()
        d.pop("wall_time_ms")
        return d

    a = run_suite(make_config("domega", metric="s4:1.0", samples=6))
    b = run_suite(make_config("domega", metric="s4:1.0", samples=6))
    same_seed = strip(a) == strip(b)

    prev = os.environ.get("TWISTORLAB_THREADS")
    try:
        os.environ["TWISTORLAB_THREADS"] = "1"
        serial = run_suite(make_config("brackets", samples=8))
        os.environ["TWISTORLAB_THREADS"] = "4"
        parallel = run_suite(make_config("brackets", samples=8))
    finally:
        if prev is None:
            os.environ.pop("TWISTORLAB_THREADS", None)
        else:
            os.environ["TWISTORLAB_THREADS"] = prev
    same_threads = strip(serial) == strip(parallel)

    ok = same_seed and same_threads
    print(f"[criterion 10] {'PASS' if ok else 'FAIL'} determinism "
          f"same_seed={same_seed} parallel_serial={same_threads}")
    assert same_seed, "same-seed reruns disagree"
    assert same_threads, "parallel and serial residuals disagree"
