"""Flat-model cycle space: sections of the twistor fibration, volume, Levi form.

The twistor space of flat euclidean R^4 is the total space of O(1) + O(1) over
the projective line.  Holomorphic 1-cycles in the component of the twistor
lines are exactly the global sections, parametrised by (a, b, c, d) in C^4 as
mu -> (a mu + b, c mu + d).  The identification with R^4 x S^2 sends a section
value at mu to the base point

    z1 = (conj(c) conj(mu) + conj(d) + a |mu|^2 + b conj(mu)) / (1 + |mu|^2)
    z2 = (-conj(a) conj(mu) - conj(b) + c |mu|^2 + d conj(mu)) / (1 + |mu|^2)

under z1 = x1 + i x2, z2 = x3 + i x4, and to the fiber structure
u(mu) = stereo_structure(1/mu), written in the form smooth at mu = 0.  The
inverse fiber coordinate is forced: it is the unique choice making the
embedding J-holomorphic (the Cauchy-Riemann residual test pins it down, and
twistor lines c = -conj(b), d = conj(a) embed as fibers, x constant).

The volume of a section cycle is the integral of the pulled-back metric form
over the parametrising sphere (the two agree on holomorphic curves).  The
integrand is evaluated by central differences of the embedding map in the
chart plane and integrated by a Gauss-Legendre rule in cos(theta) times a
uniform azimuth grid; per chart-plane node the sphere measure contributes
(1 + |w|^2)^2 / 4.  The volume is exactly quadratic in (a, b, c, d), so the
five-point Levi stencil is exact up to quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import QI, QJ, QK, make_compatible_structure
from .errors import ConfigError, DomainError
from .riemann import get_metric
from .twistor import NORTH, ChartContext, abc_to_chart, point_from_structure

TWO_PI = 2.0 * np.pi


@dataclass
class Section:
    """Holomorphic section mu -> (a mu + b, c mu + d), a point of the cycle space."""
    a: complex
    b: complex
    c: complex
    d: complex

    def as_array(self):
        return np.array([self.a, self.b, self.c, self.d], dtype=complex)

    @classmethod
    def from_array(cls, arr):
        a, b, c, d = (complex(v) for v in arr)
        return cls(a, b, c, d)

    def shifted(self, t, n):
        """Section + t * n for a complex scalar t and a tangent section n."""
        return Section.from_array(self.as_array() + t * n.as_array())


def twistor_line(z1, z2):
    """The section whose cycle is the fiber over (z1, z2): c = -conj(b), d = conj(a)."""
    return Section(a=complex(z1), b=-np.conj(z2), c=complex(z2), d=np.conj(z1))


@dataclass
class Quadrature:
    """Sphere product rule: Gauss-Legendre in cos(theta) x uniform azimuth."""
    n_theta: int = 64
    n_phi: int = 128

    def __post_init__(self):
        if self.n_theta < 16 or self.n_phi < 32:
            raise ConfigError("quadrature too coarse: need n_theta >= 16, n_phi >= 32")


def stereo_structure(zeta):
    """Compatible structure ((1-|z|^2) I + i(z-conj z) J + (z+conj z) K)/(1+|z|^2)."""
    zeta = complex(zeta)
    den = 1.0 + abs(zeta) ** 2
    abc = np.array([(1.0 - abs(zeta) ** 2) / den,
                    -2.0 * zeta.imag / den,
                    2.0 * zeta.real / den])
    return make_compatible_structure(*abc)


def chart_map(s, mu):
    """Base point (z1, z2) of the section value at mu; accepts mu arrays."""
    mu = np.asarray(mu, dtype=complex)
    mb = np.conj(mu)
    m2 = (mu * mb).real
    den = 1.0 + m2
    z1 = (np.conj(s.c) * mb + np.conj(s.d) + s.a * m2 + s.b * mb) / den
    z2 = (-np.conj(s.a) * mb - np.conj(s.b) + s.c * m2 + s.d * mb) / den
    return z1, z2


def _chart_map_inv(s, nu):
    """chart_map at mu = 1/nu, written smooth at nu = 0; accepts nu arrays."""
    nu = np.asarray(nu, dtype=complex)
    n2 = (nu * np.conj(nu)).real
    den = 1.0 + n2
    z1 = (s.a + (s.b + np.conj(s.c)) * nu + np.conj(s.d) * n2) / den
    z2 = (s.c + (s.d - np.conj(s.a)) * nu - np.conj(s.b) * n2) / den
    return z1, z2


def _fiber_abc(mu):
    """(a, b, c) of u(mu) = stereo_structure(1/mu) in the form smooth at 0."""
    mu = np.asarray(mu, dtype=complex)
    m2 = (mu * np.conj(mu)).real
    den = 1.0 + m2
    return np.stack([(m2 - 1.0) / den,
                     2.0 * np.imag(mu) / den,
                     2.0 * np.real(mu) / den])


def _fiber_abc_inv(nu):
    """(a, b, c) of stereo_structure(nu): the fiber in the nu = 1/mu plane."""
    nu = np.asarray(nu, dtype=complex)
    n2 = (nu * np.conj(nu)).real
    den = 1.0 + n2
    return np.stack([(1.0 - n2) / den,
                     -2.0 * np.imag(nu) / den,
                     2.0 * np.real(nu) / den])


def _matrices_of(abc):
    """(N,4,4) structure matrices from stacked (3,N) coefficients."""
    return (abc[0][..., None, None] * QI + abc[1][..., None, None] * QJ
            + abc[2][..., None, None] * QK)


def _embed(s, w, inverse_chart):
    """Vectorized embedding: chart-plane points w -> (x (N,4), u (N,4,4))."""
    if inverse_chart:
        z1, z2 = _chart_map_inv(s, w)
        abc = _fiber_abc_inv(w)
    else:
        z1, z2 = chart_map(s, w)
        abc = _fiber_abc(w)
    x = np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)
    return x, _matrices_of(abc)


def section_embed(s, mu):
    """TwistorPoint of the section value at mu (scalar)."""
    x, _ = _embed(s, np.asarray([complex(mu)]), inverse_chart=False)
    abc = _fiber_abc(np.asarray([complex(mu)]))[:, 0]
    return point_from_structure(x[0], abc)


def cr_residual(s, mu, h=None):
    """Cauchy-Riemann defect of the embedding at mu, via the twistor chart.

    Compares J applied to the finite-difference mu_re derivative against the
    mu_im derivative; vanishes iff the embedding is holomorphic there.
    """
    mu = complex(mu)
    m = get_metric("flat")
    abc0 = _fiber_abc(np.asarray([mu]))[:, 0]
    _, tchart = abc_to_chart(abc0)
    ctx = ChartContext(m, tchart)

    def q_of(w):
        x, _ = _embed(s, np.asarray([w]), inverse_chart=False)
        a, b, c = _fiber_abc(np.asarray([w]))[:, 0]
        zeta = (c - 1j * b) / (1.0 + a) if tchart == NORTH else (c - 1j * b) / (1.0 - a)
        return np.array([*x[0], zeta.real, zeta.imag])

    if h is None:
        h = 1e-5 * max(1.0, abs(mu))
    q0 = q_of(mu)
    dre = (q_of(mu + h) - q_of(mu - h)) / (2.0 * h)
    dim = (q_of(mu + 1j * h) - q_of(mu - 1j * h)) / (2.0 * h)
    return np.abs(ctx.j_chart(q0, dre) - dim).max()


def _density(s, w, inverse_chart, fd_step):
    """Pullback of the metric form onto the chart plane at nodes w, by FD."""
    h = fd_step * np.maximum(1.0, np.abs(w))
    x_p, u_p = _embed(s, w + h, inverse_chart)
    x_m, u_m = _embed(s, w - h, inverse_chart)
    dx1 = (x_p - x_m) / (2.0 * h[:, None])
    du1 = (u_p - u_m) / (2.0 * h[:, None, None])
    x_p, u_p = _embed(s, w + 1j * h, inverse_chart)
    x_m, u_m = _embed(s, w - 1j * h, inverse_chart)
    dx2 = (x_p - x_m) / (2.0 * h[:, None])
    du2 = (u_p - u_m) / (2.0 * h[:, None, None])
    _, u0 = _embed(s, w, inverse_chart)
    # omega(t1, t2) = (u h1) . h2 + g0(u v1, v2), flat base so h = dx, v = du
    horiz = np.einsum("nij,nj,ni->n", u0, dx1, dx2)
    vert = -0.5 * np.einsum("nij,njk,nki->n", u0, du1, du2)
    return horiz + vert


def vol(s, quad=None, chart_policy="auto", fd_step=1e-4):
    """Volume of the section cycle: integral of the pulled-back metric form.

    chart_policy picks the parametrising plane per quadrature node: "auto"
    splits at the equator (both planes stay inside the unit disc), "mu" or
    "inv" force a single plane over the whole sphere.
    """
    if quad is None:
        quad = Quadrature()
    if chart_policy not in ("auto", "mu", "inv"):
        raise ConfigError(f"unknown chart_policy {chart_policy!r}")
    xg, wg = np.polynomial.legendre.leggauss(quad.n_theta)
    phi = TWO_PI * np.arange(quad.n_phi) / quad.n_phi
    w_phi = TWO_PI / quad.n_phi

    total = 0.0
    for inverse_chart in (False, True):
        if chart_policy == "auto":
            mask = xg < 0.0 if inverse_chart else xg >= 0.0
        else:
            mask = np.ones_like(xg, dtype=bool) if (
                (chart_policy == "inv") == inverse_chart) else np.zeros_like(xg, dtype=bool)
        if not mask.any():
            continue
        xs, ws = xg[mask], wg[mask]
        if inverse_chart:
            rad = np.sqrt((1.0 + xs) / (1.0 - xs))
            nodes = rad[:, None] * np.exp(-1j * phi)[None, :]
        else:
            rad = np.sqrt((1.0 - xs) / (1.0 + xs))
            nodes = rad[:, None] * np.exp(1j * phi)[None, :]
        flat_nodes = nodes.ravel()
        dens = _density(s, flat_nodes, inverse_chart, fd_step)
        measure = ((1.0 + np.abs(flat_nodes) ** 2) ** 2) / 4.0
        node_w = np.repeat(ws, quad.n_phi) * w_phi
        total += float(np.sum(dens.real * measure * node_w))
    return total


def vol_error_estimate(s, quad=None, chart_policy="auto", fd_step=1e-4):
    """Quadrature error proxy for vol(s, quad).

    Difference against the half-resolution rule; at the minimum grid, where
    halving is not allowed, against the double-resolution rule instead.
    """
    if quad is None:
        quad = Quadrature()
    if quad.n_theta // 2 >= 16 and quad.n_phi // 2 >= 32:
        other = Quadrature(quad.n_theta // 2, quad.n_phi // 2)
    else:
        other = Quadrature(quad.n_theta * 2, quad.n_phi * 2)
    full = vol(s, quad, chart_policy, fd_step)
    return abs(full - vol(s, other, chart_policy, fd_step))


def vol_closed(s, V0, kappa):
    """Closed-form volume V0 (1 + kappa (|a - conj d|^2 + |conj b + c|^2))."""
    q1 = abs(s.a - np.conj(s.d)) ** 2
    q2 = abs(np.conj(s.b) + s.c) ** 2
    return V0 * (1.0 + kappa * (q1 + q2))


def quadratic_moduli(s):
    """The two squared moduli (|a - conj d|^2, |conj b + c|^2) driving vol."""
    return abs(s.a - np.conj(s.d)) ** 2, abs(np.conj(s.b) + s.c) ** 2


def fit_volume_constants(quad=None, n_fit=20, seed=1234, chart_policy="auto",
                         fd_step=1e-4):
    """Measure (V0, kappa): V0 from a twistor line, kappa by least squares.

    The constants are measured rather than transcribed because the closed
    formula's normalization depends on a fiber-volume convention; here V0 is
    the fiber volume under G (8 pi for the norm-sqrt(2) sphere).
    """
    if quad is None:
        quad = Quadrature()
    V0 = vol(Section(0, 0, 0, 0), quad, chart_policy, fd_step)
    rng = np.random.default_rng(seed)
    num, den = 0.0, 0.0
    for _ in range(n_fit):
        arr = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
        s = Section.from_array(arr)
        q = sum(quadratic_moduli(s))
        r = vol(s, quad, chart_policy, fd_step) / V0 - 1.0
        num += q * r
        den += q * q
    return V0, num / den


def fit_two_coefficients(quad=None, n_fit=20, seed=1234, chart_policy="auto",
                         fd_step=1e-4):
    """Fit vol/V0 - 1 = k1 |a - conj d|^2 + k2 |conj b + c|^2 separately.

    Returns (V0, k1, k2); the two coefficients agreeing is the structural
    claim behind the single-kappa model.
    """
    if quad is None:
        quad = Quadrature()
    V0 = vol(Section(0, 0, 0, 0), quad, chart_policy, fd_step)
    rng = np.random.default_rng(seed)
    M = np.zeros((2, 2))
    rhs = np.zeros(2)
    for _ in range(n_fit):
        arr = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
        s = Section.from_array(arr)
        q = np.array(quadratic_moduli(s))
        r = vol(s, quad, chart_policy, fd_step) / V0 - 1.0
        M += np.outer(q, q)
        rhs += q * r
    k1, k2 = np.linalg.solve(M, rhs)
    return V0, k1, k2


def levi_form(s, n, eps=1e-2, quad=None, chart_policy="auto", fd_step=1e-4):
    """Complex-hessian value d^2/dt dconj(t) vol(s + t n) at t = 0.

    Five-point stencil (vol(s+eps n) + vol(s-eps n) + vol(s+i eps n)
    + vol(s-i eps n) - 4 vol(s)) / (4 eps^2); normalized so |s|^2 on C gives 1.
    vol is exactly quadratic in the section, so the stencil carries no
    truncation error, only quadrature noise.
    """
    if not 1e-4 <= eps <= 1e-1:
        raise DomainError(f"eps must lie in [1e-4, 1e-1], got {eps}")
    if quad is None:
        quad = Quadrature()
    v0 = vol(s, quad, chart_policy, fd_step)
    stencil = sum(vol(s.shifted(t, n), quad, chart_policy, fd_step)
                  for t in (eps, -eps, 1j * eps, -1j * eps))
    return (stencil - 4.0 * v0) / (4.0 * eps * eps)
