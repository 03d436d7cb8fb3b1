"""Metrics on chart domains of R^4 and their frame-level curvature data.

Curvature sign convention: R(X, Y)Z = [nabla_Y, nabla_X]Z + nabla_[X,Y] Z,
equivalently R(X, Y) = -(d eta + eta ^ eta)(X, Y) in an orthonormal frame
with connection form eta.  With this sign the induced operator on Lambda^2
is +Id/r^2 for the round sphere of radius r, and its block decomposition in
the self-dual / anti-self-dual splitting is

    [[Wplus + s/12, B], [B^T, Wminus + s/12]].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import BASIS_MINUS, BASIS_PLUS, PAIRS
from .errors import ConfigError, DomainError

_EYE4 = np.eye(4)


class MetricField:
    """A metric evaluator on a box chart, with optional analytic derivatives.

    fn(x) -> (4,4) SPD matrix.  dfn(x) -> (4,4,4) with dfn[a] = d_a g, and
    d2fn(x) -> (4,4,4,4) with d2fn[a,b] = d_a d_b g; when either is missing
    central finite differences with steps h_g (first) and h2 (second) fill in.
    """

    def __init__(self, name, params, fn, dfn=None, d2fn=None,
                 box=None, h_g=1e-4, h2=1e-3):
        self.name = name
        self.params = tuple(params)
        self.fn = fn
        self.dfn = dfn
        self.d2fn = d2fn
        self.box = np.array([[-1.2] * 4, [1.2] * 4]) if box is None else np.asarray(box)
        self.h_g = h_g
        self.h2 = h2
        self._frame_cache = {}
        self._geom_cache = {}

    @property
    def spec(self):
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(repr(float(p)) for p in self.params)

    def metric(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def dmetric(self, x):
        x = np.asarray(x, dtype=float)
        if self.dfn is not None:
            return self.dfn(x)
        h = self.h_g
        out = np.empty((4, 4, 4))
        for a in range(4):
            e = np.zeros(4)
            e[a] = h
            out[a] = (self.fn(x + e) - self.fn(x - e)) / (2.0 * h)
        return out

    def d2metric(self, x):
        x = np.asarray(x, dtype=float)
        if self.d2fn is not None:
            return self.d2fn(x)
        h = self.h2
        out = np.empty((4, 4, 4, 4))
        g0 = self.fn(x)
        for a in range(4):
            ea = np.zeros(4)
            ea[a] = h
            out[a, a] = (self.fn(x + ea) - 2.0 * g0 + self.fn(x - ea)) / (h * h)
            for b in range(a + 1, 4):
                eb = np.zeros(4)
                eb[b] = h
                mixed = (self.fn(x + ea + eb) - self.fn(x + ea - eb)
                         - self.fn(x - ea + eb) + self.fn(x - ea - eb)) / (4.0 * h * h)
                out[a, b] = mixed
                out[b, a] = mixed
        return out

    def interior(self, x, margin=None):
        x = np.asarray(x, dtype=float)
        m = 2.0 * self.h_g if margin is None else margin
        return bool(np.all(x >= self.box[0] + m) and np.all(x <= self.box[1] - m))

    def require_interior(self, x, margin=None):
        if not self.interior(x, margin):
            raise DomainError(f"point {np.asarray(x)} too close to the chart boundary")


def _conformal(name, params, f_grad_hess, box=None):
    """Metric e^{2f} delta from f with analytic gradient and hessian."""
    fgh = f_grad_hess

    def fn(x):
        f, _, _ = fgh(x)
        return np.exp(2.0 * f) * _EYE4

    def dfn(x):
        f, gr, _ = fgh(x)
        s = np.exp(2.0 * f)
        return (2.0 * s) * gr[:, None, None] * _EYE4[None, :, :]

    def d2fn(x):
        f, gr, hess = fgh(x)
        s = np.exp(2.0 * f)
        coef = 2.0 * hess + 4.0 * np.outer(gr, gr)
        return s * coef[:, :, None, None] * _EYE4[None, None, :, :]

    return MetricField(name, params, fn, dfn, d2fn, box=box)


def _flat():
    # globally defined, so the chart box only needs to bound desk-scale work
    return MetricField(
        "flat", (),
        fn=lambda x: _EYE4.copy(),
        dfn=lambda x: np.zeros((4, 4, 4)),
        d2fn=lambda x: np.zeros((4, 4, 4, 4)),
        box=np.array([[-100.0] * 4, [100.0] * 4]),
    )


def _s4(r):
    # Stereographic chart of the round 4-sphere of radius r:
    # g = 4 r^4 / (r^2 + |x|^2)^2 delta, scalar curvature 12 / r^2.
    r2 = r * r

    def fgh(x):
        q = r2 + x @ x
        f = np.log(2.0 * r2) - np.log(q)
        gr = -2.0 * x / q
        hess = -2.0 * _EYE4 / q + 4.0 * np.outer(x, x) / (q * q)
        return f, gr, hess

    return _conformal("s4", (r,), fgh)


def _conformal_bump(eps):
    # g = e^{2f} delta with f = eps * exp(-|x|^2): conformally flat (W = 0)
    # with non-constant scalar curvature.
    def fgh(x):
        f = eps * np.exp(-(x @ x))
        gr = -2.0 * x * f
        hess = (-2.0 * _EYE4 + 4.0 * np.outer(x, x)) * f
        return f, gr, hess

    return _conformal("conformal_bump", (eps,), fgh)


def _xy_bump(eps):
    # Non-conformally-flat perturbation: g = delta + eps x1 x2 (e1 (x) e2 + e2 (x) e1).
    pert = np.zeros((4, 4))
    pert[0, 1] = pert[1, 0] = 1.0

    def fn(x):
        return _EYE4 + (eps * x[0] * x[1]) * pert

    def dfn(x):
        out = np.zeros((4, 4, 4))
        out[0] = eps * x[1] * pert
        out[1] = eps * x[0] * pert
        return out

    def d2fn(x):
        out = np.zeros((4, 4, 4, 4))
        out[0, 1] = eps * pert
        out[1, 0] = eps * pert
        return out

    return MetricField("xy_bump", (eps,), fn, dfn, d2fn)


def get_metric(name, params=()):
    """Look up a registered metric; unknown names or bad params are config errors."""
    params = tuple(float(p) for p in params)
    if name == "flat":
        if params:
            raise ConfigError("flat takes no parameters")
        return _flat()
    if name == "s4":
        if len(params) != 1 or params[0] <= 0.0:
            raise ConfigError("s4 requires one positive radius parameter")
        return _s4(params[0])
    if name == "conformal_bump":
        if len(params) != 1 or not np.isfinite(params[0]):
            raise ConfigError("conformal_bump requires one finite amplitude parameter")
        return _conformal_bump(params[0])
    if name == "xy_bump":
        if len(params) != 1 or abs(params[0]) > 0.5:
            raise ConfigError("xy_bump requires one amplitude parameter with |eps| <= 0.5")
        return _xy_bump(params[0])
    raise ConfigError(f"unknown metric {name!r}")


def parse_metric_spec(spec):
    """Parse 'name' or 'name:p1[,p2...]' into a MetricField."""
    if not isinstance(spec, str):
        raise ConfigError(f"metric spec must be a string, got {type(spec).__name__}")
    name, _, tail = spec.partition(":")
    if not tail:
        return get_metric(name)
    try:
        params = [float(t) for t in tail.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad metric parameters in {spec!r}") from exc
    return get_metric(name, params)


def christoffel(m, x):
    """Christoffel symbols Gamma[k, i, j] of the Levi-Civita connection at x."""
    x = np.asarray(x, dtype=float)
    m.require_interior(x)
    g = m.metric(x)
    dg = m.dmetric(x)
    ginv = np.linalg.inv(g)
    # S[l, i, j] = d_i g_{lj} + d_j g_{li} - d_l g_{ij}
    S = np.einsum('ilj->lij', dg) + np.einsum('jli->lij', dg) - dg
    return 0.5 * np.einsum('kl,lij->kij', ginv, S)


def _christoffel_derivs(m, x):
    """(Gamma, dGamma) with dGamma[a, k, i, j] = d_a Gamma[k, i, j]."""
    x = np.asarray(x, dtype=float)
    g = m.metric(x)
    dg = m.dmetric(x)
    ginv = np.linalg.inv(g)
    S = np.einsum('ilj->lij', dg) + np.einsum('jli->lij', dg) - dg
    gamma = 0.5 * np.einsum('kl,lij->kij', ginv, S)
    if m.d2fn is not None:
        d2g = m.d2metric(x)
        dginv = -np.einsum('kl,alm,mn->akn', ginv, dg, ginv)
        dS = (np.einsum('ailj->alij', d2g) + np.einsum('ajli->alij', d2g)
              - np.einsum('alij->alij', d2g))
        dgamma = 0.5 * (np.einsum('akl,lij->akij', dginv, S)
                        + np.einsum('kl,alij->akij', ginv, dS))
    else:
        h = m.h2
        dgamma = np.empty((4, 4, 4, 4))
        for a in range(4):
            e = np.zeros(4)
            e[a] = h
            dgamma[a] = (christoffel(m, x + e) - christoffel(m, x - e)) / (2.0 * h)
    return gamma, dgamma


def orthonormal_frame(m, x):
    """Oriented g-orthonormal frame from Gram-Schmidt on the coordinate vectors.

    Returns a 4x4 matrix whose columns are the frame vectors' coordinate
    components, processed in the fixed order d1, d2, d3, d4; the last vector
    is negated if needed so that det > 0.
    """
    x = np.asarray(x, dtype=float)
    g = m.metric(x)
    theta = np.zeros((4, 4))
    for j in range(4):
        v = np.zeros(4)
        v[j] = 1.0
        for i in range(j):
            v = v - (theta[:, i] @ g @ v) * theta[:, i]
        nrm = np.sqrt(v @ g @ v)
        theta[:, j] = v / nrm
    if np.linalg.det(theta) < 0.0:
        theta[:, 3] = -theta[:, 3]
    return theta


def _frame_at(m, x):
    key = x.tobytes()
    got = m._frame_cache.get(key)
    if got is None:
        if len(m._frame_cache) > 200000:
            m._frame_cache.clear()
        got = orthonormal_frame(m, x)
        m._frame_cache[key] = got
    return got


@dataclass
class CurvatureDecomp:
    """Curvature operator on Lambda^2 in an orthonormal frame, with its blocks."""
    Rop: np.ndarray      # 6x6 in the Bivector6 basis
    Wplus: np.ndarray    # 3x3 trace-free
    Wminus: np.ndarray   # 3x3 trace-free
    B: np.ndarray        # 3x3, the Lambda^- -> Lambda^+ block in the +/- bases
    s: float             # scalar curvature
    plus_block: np.ndarray  # Wplus + (s/12) Id, the operator restricted to Lambda^+
    _Bop6: np.ndarray = field(default=None, repr=False)

    def apply(self, b6):
        return self.Rop @ np.asarray(b6)

    def apply_B(self, b6):
        """Apply only the off-diagonal (traceless-Ricci) part of the operator."""
        return self._Bop6 @ np.asarray(b6)


def curvature(m, x):
    """Curvature decomposition at x (frame components, sign convention above)."""
    x = np.asarray(x, dtype=float)
    m.require_interior(x)
    gamma, dgamma = _christoffel_derivs(m, x)
    # Rt[d, c, a, b]: coefficient of d_d in (standard) R(d_a, d_b) d_c.
    Rt = (np.transpose(dgamma, (1, 3, 0, 2)) - np.transpose(dgamma, (1, 3, 2, 0))
          + np.einsum('dae,ebc->dcab', gamma, gamma)
          - np.einsum('dbe,eac->dcab', gamma, gamma))
    theta = _frame_at(m, x)
    g = m.metric(x)
    Rf = np.einsum('dcab,ck,ai,bj->dkij', Rt, theta, theta, theta)
    M = -np.einsum('dl,de,ekij->lkij', theta, g, Rf)  # frame endos, package sign
    Rop = np.empty((6, 6))
    for col, (i, j) in enumerate(PAIRS):
        for row, (p, q) in enumerate(PAIRS):
            Rop[row, col] = M[q, p, i, j]
    P6 = np.vstack([BASIS_PLUS, BASIS_MINUS])
    A = P6 @ Rop @ P6.T
    s = 2.0 * np.trace(Rop)
    eye3 = np.eye(3)
    Bblk = A[:3, 3:]
    Bop_pm = np.zeros((6, 6))
    Bop_pm[:3, 3:] = Bblk
    Bop_pm[3:, :3] = Bblk.T
    return CurvatureDecomp(
        Rop=Rop,
        Wplus=A[:3, :3] - (s / 12.0) * eye3,
        Wminus=A[3:, 3:] - (s / 12.0) * eye3,
        B=Bblk,
        s=s,
        plus_block=A[:3, :3],
        _Bop6=P6.T @ Bop_pm @ P6,
    )


@dataclass
class GeomPoint:
    """Cached per-point frame data: theta, its inverse, Gamma, eta, metric."""
    x: np.ndarray
    g: np.ndarray
    theta: np.ndarray
    theta_inv: np.ndarray
    gamma: np.ndarray
    eta: np.ndarray          # eta[a] = connection form on d_a, 4x4 skew (frame indices)
    _metricfield: MetricField = field(repr=False, default=None)
    _curv: CurvatureDecomp = field(default=None, repr=False)

    def curv(self):
        if self._curv is None:
            self._curv = curvature(self._metricfield, self.x)
        return self._curv

    def eta_of(self, X):
        """Connection form on a coordinate-component vector X (complex allowed)."""
        return np.einsum('a,aij->ij', np.asarray(X), self.eta)


def geometry_at(m, x):
    x = np.asarray(x, dtype=float)
    key = x.tobytes()
    got = m._geom_cache.get(key)
    if got is not None:
        return got
    if len(m._geom_cache) > 60000:
        m._geom_cache.clear()
    g = m.metric(x)
    theta = _frame_at(m, x)
    gamma = christoffel(m, x)
    h = m.h_g
    eta = np.empty((4, 4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        dtheta = (_frame_at(m, x + e) - _frame_at(m, x - e)) / (2.0 * h)
        cov = dtheta + np.einsum('kb,bj->kj', gamma[:, a, :], theta)
        eta[a] = theta.T @ g @ cov
    gp = GeomPoint(x=x, g=g, theta=theta, theta_inv=np.linalg.inv(theta),
                   gamma=gamma, eta=eta, _metricfield=m)
    m._geom_cache[key] = gp
    return gp


def connection_form(m, x, X):
    """eta(X) in frame components, eta_ij(X) = g(nabla_X theta_j, theta_i)."""
    return geometry_at(m, np.asarray(x, dtype=float)).eta_of(X)
