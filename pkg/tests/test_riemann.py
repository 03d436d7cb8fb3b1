"""Metric, connection, and curvature tests.

Oracles: Christoffel symbols recomputed from pure central differences of the
raw metric evaluator, the coordinate Riemann tensor rebuilt from those, and
the frozen round-sphere values s = 12 / r^2 with curvature operator Id / r^2.
"""

import numpy as np
import pytest

from twistorlab.algebra import PAIRS
from twistorlab.errors import ConfigError, DomainError
from twistorlab.riemann import (
    christoffel, connection_form, curvature, geometry_at, get_metric,
    orthonormal_frame, parse_metric_spec,
)

POINTS = [
    np.array([0.0, 0.0, 0.0, 0.0]),
    np.array([0.3, -0.2, 0.1, 0.4]),
    np.array([-0.5, 0.25, -0.35, 0.15]),
]


def _fd_christoffel(m, x, h=1e-5):
    """Gamma from central differences of the raw metric only (oracle path)."""
    g = m.metric(x)
    ginv = np.linalg.inv(g)
    dg = np.empty((4, 4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        dg[a] = (m.metric(x + e) - m.metric(x - e)) / (2.0 * h)
    gamma = np.empty((4, 4, 4))
    for k in range(4):
        for i in range(4):
            for j in range(4):
                acc = 0.0
                for l in range(4):
                    acc += ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                gamma[k, i, j] = 0.5 * acc
    return gamma


def _oracle_curvature_op(m, x, h=1e-4):
    """Coordinate Riemann via FD of christoffel, pushed to the Lambda^2 operator.

    Standard convention R(d_a, d_b) d_c = d_a Gamma_bc - d_b Gamma_ac + ...,
    then the package sign flip (its R is the negative of the standard one),
    then frame conversion and the pair-basis matrix.
    """
    gamma = christoffel(m, x)
    dgamma = np.empty((4, 4, 4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        dgamma[a] = (christoffel(m, x + e) - christoffel(m, x - e)) / (2.0 * h)
    # Rstd[d, c, a, b] = coefficient of d_d in R(d_a, d_b) d_c
    Rstd = np.empty((4, 4, 4, 4))
    for d in range(4):
        for c in range(4):
            for a in range(4):
                for b in range(4):
                    val = dgamma[a][d, b, c] - dgamma[b][d, a, c]
                    for e_ in range(4):
                        val += gamma[d, a, e_] * gamma[e_, b, c]
                        val -= gamma[d, b, e_] * gamma[e_, a, c]
                    Rstd[d, c, a, b] = val
    theta = orthonormal_frame(m, x)
    g = m.metric(x)
    Rf = np.einsum('dcab,ck,ai,bj->dkij', Rstd, theta, theta, theta)
    M = -np.einsum('dl,de,ekij->lkij', theta, g, Rf)
    Rop = np.empty((6, 6))
    for col, (i, j) in enumerate(PAIRS):
        for row, (p, q) in enumerate(PAIRS):
            Rop[row, col] = M[q, p, i, j]
    return Rop


def test_flat_geometry_is_trivial():
    m = get_metric("flat")
    for x in POINTS:
        gp = geometry_at(m, x)
        assert np.abs(gp.theta - np.eye(4)).max() < 1e-14
        assert np.abs(gp.gamma).max() < 1e-14
        assert np.abs(gp.eta).max() < 1e-12
        d = curvature(m, x)
        assert np.abs(d.Rop).max() < 1e-12
        assert abs(d.s) < 1e-12


def test_sphere_scalar_curvature_frozen_values():
    for r in (1.0, np.sqrt(2.0), 0.9):
        m = get_metric("s4", (r,))
        for x in POINTS:
            d = curvature(m, x)
            assert abs(d.s - 12.0 / r**2) < 1e-8, f"s4:{r} s={d.s}"
            assert np.abs(d.Rop - np.eye(6) / r**2).max() < 1e-8
            assert np.abs(d.Wplus).max() < 1e-8
            assert np.abs(d.Wminus).max() < 1e-8
            assert np.abs(d.B).max() < 1e-8


def test_orthonormal_frame_properties():
    rng = np.random.default_rng(21)
    for spec in ("s4:1.3", "conformal_bump:0.2", "xy_bump:0.3"):
        m = parse_metric_spec(spec)
        for _ in range(10):
            x = rng.uniform(-0.6, 0.6, size=4)
            theta = orthonormal_frame(m, x)
            g = m.metric(x)
            assert np.abs(theta.T @ g @ theta - np.eye(4)).max() < 1e-12
            assert np.linalg.det(theta) > 0.0
            gp = geometry_at(m, x)
            assert np.abs(gp.theta_inv @ gp.theta - np.eye(4)).max() < 1e-12


def test_christoffel_against_fd_oracle():
    rng = np.random.default_rng(22)
    for spec in ("conformal_bump:0.2", "xy_bump:0.3", "s4:1.1"):
        m = parse_metric_spec(spec)
        for _ in range(5):
            x = rng.uniform(-0.5, 0.5, size=4)
            err = np.abs(christoffel(m, x) - _fd_christoffel(m, x)).max()
            assert err < 1e-8, f"{spec} christoffel off oracle by {err:.3e}"


def test_christoffel_symmetry_and_metric_compatibility():
    rng = np.random.default_rng(23)
    m = parse_metric_spec("conformal_bump:0.25")
    for _ in range(5):
        x = rng.uniform(-0.5, 0.5, size=4)
        gamma = christoffel(m, x)
        assert np.abs(gamma - np.transpose(gamma, (0, 2, 1))).max() < 1e-12
        dg = m.dmetric(x)
        g = m.metric(x)
        # nabla g = 0: d_a g_ij = Gamma^l_ai g_lj + Gamma^l_aj g_il
        cov = dg - np.einsum('lai,lj->aij', gamma, g) - np.einsum('laj,il->aij', gamma, g)
        assert np.abs(cov).max() < 1e-11


def test_connection_form_is_skew():
    rng = np.random.default_rng(24)
    m = parse_metric_spec("s4:1.2")
    for _ in range(8):
        x = rng.uniform(-0.5, 0.5, size=4)
        X = rng.normal(size=4)
        eta = connection_form(m, x, X)
        assert np.abs(eta + eta.T).max() < 1e-9, "connection form not skew"


def test_curvature_against_coordinate_oracle():
    rng = np.random.default_rng(25)
    for spec in ("conformal_bump:0.2", "xy_bump:0.25"):
        m = parse_metric_spec(spec)
        for _ in range(3):
            x = rng.uniform(-0.4, 0.4, size=4)
            err = np.abs(curvature(m, x).Rop - _oracle_curvature_op(m, x)).max()
            assert err < 5e-7, f"{spec} curvature off oracle by {err:.3e}"


def test_curvature_operator_symmetries():
    rng = np.random.default_rng(26)
    for spec in ("s4:0.9", "conformal_bump:0.2", "xy_bump:0.25"):
        m = parse_metric_spec(spec)
        x = rng.uniform(-0.4, 0.4, size=4)
        d = curvature(m, x)
        assert np.abs(d.Rop - d.Rop.T).max() < 1e-8
        assert abs(d.s - 2.0 * np.trace(d.Rop)) < 1e-10
        assert abs(np.trace(d.Wplus)) < 1e-9
        assert abs(np.trace(d.Wminus)) < 1e-9
        assert np.abs(d.plus_block - d.Wplus - (d.s / 12.0) * np.eye(3)).max() < 1e-12
        b6 = rng.normal(size=6)
        assert np.allclose(d.apply(b6), d.Rop @ b6)


def test_block_structure_of_bump_metrics():
    m = parse_metric_spec("conformal_bump:0.1")
    x1, x2 = np.array([0.3, 0.1, -0.2, 0.25]), np.array([0.0, 0.0, 0.0, 0.0])
    d1, d2 = curvature(m, x1), curvature(m, x2)
    # conformally flat: both Weyl halves vanish, Ricci block and s do not
    assert np.abs(d1.Wplus).max() < 1e-8
    assert np.abs(d1.Wminus).max() < 1e-8
    assert np.abs(d1.B).max() > 1e-3
    assert abs(d1.s - d2.s) > 1e-2, "conformal_bump scalar curvature is constant?"
    mb = parse_metric_spec("xy_bump:0.1")
    db = curvature(mb, x1)
    assert np.abs(db.Wplus).max() > 5e-3, "xy_bump should carry self-dual Weyl"


def test_apply_B_isolates_off_diagonal_block():
    m = parse_metric_spec("conformal_bump:0.2")
    d = curvature(m, np.array([0.2, -0.3, 0.1, 0.15]))
    rng = np.random.default_rng(27)
    from twistorlab.algebra import BASIS_MINUS, BASIS_PLUS
    bplus = BASIS_PLUS.T @ rng.normal(size=3)
    out = d.apply_B(bplus)
    # image of a self-dual input under the B part is anti-self-dual
    assert np.abs(BASIS_PLUS @ out).max() < 1e-10
    assert np.allclose(BASIS_MINUS @ out, d.B.T @ (BASIS_PLUS @ bplus), atol=1e-10)


def test_metric_registry_errors():
    with pytest.raises(ConfigError):
        get_metric("nosuch")
    with pytest.raises(ConfigError):
        get_metric("s4", (-1.0,))
    with pytest.raises(ConfigError):
        get_metric("s4", ())
    with pytest.raises(ConfigError):
        get_metric("flat", (1.0,))
    with pytest.raises(ConfigError):
        get_metric("xy_bump", (0.9,))
    with pytest.raises(ConfigError):
        parse_metric_spec("s4:abc")
    with pytest.raises(ConfigError):
        parse_metric_spec(3.14)
    assert parse_metric_spec("s4:1.5").spec == "s4:1.5"
    assert parse_metric_spec("flat").spec == "flat"


def test_domain_guard():
    m = parse_metric_spec("s4:1.0")
    with pytest.raises(DomainError):
        christoffel(m, np.array([5.0, 0.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        curvature(m, np.array([0.0, 0.0, 0.0, 1.1999]))
    assert m.interior(np.zeros(4))
    assert not m.interior(np.array([0.0, 0.0, 0.0, 1.1999]))


def test_conformal_metric_closed_form_oracles():
    """For g = e^{2f} delta: Gamma^k_ij = d_i f d^k... the standard conformal
    formula, and the Gram-Schmidt frame is e^{-f} times the coordinate basis."""
    eps = 0.2
    m = parse_metric_spec(f"conformal_bump:{eps}")
    rng = np.random.default_rng(28)
    for _ in range(5):
        x = rng.uniform(-0.5, 0.5, size=4)
        f = eps * np.exp(-(x @ x))
        df = -2.0 * x * f
        expect = np.zeros((4, 4, 4))
        for k in range(4):
            for i in range(4):
                for j in range(4):
                    expect[k, i, j] = ((k == i) * df[j] + (k == j) * df[i]
                                       - (i == j) * df[k])
        assert np.abs(christoffel(m, x) - expect).max() < 1e-9
        theta = orthonormal_frame(m, x)
        assert np.abs(theta - np.exp(-f) * np.eye(4)).max() < 1e-10


def test_metric_values_at_origin():
    m = get_metric("s4", (1.0,))
    assert np.abs(m.metric(np.zeros(4)) - 4.0 * np.eye(4)).max() < 1e-12
    m0 = get_metric("conformal_bump", (0.0,))
    x = np.array([0.3, -0.1, 0.2, 0.05])
    assert np.abs(m0.metric(x) - np.eye(4)).max() < 1e-15
    assert np.abs(christoffel(m0, x)).max() < 1e-12


def test_curvature_two_form_identity():
    """R(X, Y) = -(d eta + eta ^ eta)(X, Y) as frame endomorphisms.

    Checks the stated sign convention by rebuilding both sides in coordinate
    directions: the left side from the pair-basis operator matrix, the right
    side from finite differences of the cached connection forms.
    """
    m = parse_metric_spec("s4:1.3")
    x = np.array([0.15, -0.2, 0.3, 0.1])
    d = curvature(m, x)
    # unpack the operator into the full frame tensor M[l, k, i, j]
    M = np.zeros((4, 4, 4, 4))
    for col, (i, j) in enumerate(PAIRS):
        for row, (p, q) in enumerate(PAIRS):
            v = d.Rop[row, col]
            for (a, b, s1) in ((p, q, 1.0), (q, p, -1.0)):
                for (c, e, s2) in ((i, j, 1.0), (j, i, -1.0)):
                    M[b, a, c, e] = s1 * s2 * v
    gp = geometry_at(m, x)
    h = 1e-4
    for a, b in ((0, 1), (0, 3), (2, 3)):
        ea, eb = np.zeros(4), np.zeros(4)
        ea[a], eb[b] = h, h
        deta_a = (geometry_at(m, x + eb).eta[a] - geometry_at(m, x - eb).eta[a]) / (2 * h)
        deta_b = (geometry_at(m, x + ea).eta[b] - geometry_at(m, x - ea).eta[b]) / (2 * h)
        F = deta_b - deta_a + gp.eta[a] @ gp.eta[b] - gp.eta[b] @ gp.eta[a]
        # convert the coordinate pair (a, b) to frame coefficients
        ca, cb = gp.theta_inv[:, a], gp.theta_inv[:, b]
        lhs = np.einsum('lkij,i,j->lk', M, ca, cb)
        assert np.abs(lhs + F).max() < 1e-6, f"sign identity fails on pair {(a, b)}"
