"""Twistor space of a metric chart: points, tangents, forms, and FD calculus.

The twistor space is trivialized by the orthonormal frame as (chart of M) x S^2,
where the fiber sphere is the set of frame-component matrices u = a QI + b QJ + c QK,
a^2 + b^2 + c^2 = 1.  All vertical objects (u, sections A, eta values) are 4x4
matrices in frame components; all horizontal vectors are frame-component 4-vectors.

A TwistorTangent is the pair (h, v): h the frame components of the pushed-down
base vector, v the vertical part, a skew matrix anticommuting with u.  In the
6-dim chart (x1..x4, xi, tau) a tangent dq decomposes as

    h = theta^{-1} dx,    v = du - [u, eta(dx)],

since the horizontal lift of X moves the fiber coordinate by [u, eta(X)].

The almost complex structure acts by J(h, v) = (u h, u v); the metric G is the
euclidean pairing on h plus g0 on v, extended complex-bilinearly; the metric
form is omega = G(J ., .).

Finite differences: all fields are smooth callables q -> complex 6-vector with
the sphere chart frozen to the one active at the base point.  Lie brackets and
the Palais formula for exterior derivatives use central differences (default
step 1e-3 for first derivatives, 5e-3 inside the nested hessian evaluation),
optionally Richardson-extrapolated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .algebra import QI, QJ, QK, g0_inner, phi_inv, wedge
from .errors import DomainError, UsageError
from .riemann import MetricField, geometry_at

NORTH = "north"
SOUTH = "south"

_E4 = np.eye(4)


# ---------------------------------------------------------------------------
# Sphere charts


def chart_abc(xi, tau, chart):
    """(a, b, c) coefficients of u at chart coordinates (xi, tau)."""
    rho2 = xi * xi + tau * tau
    den = 1.0 + rho2
    a = (1.0 - rho2) / den if chart == NORTH else (rho2 - 1.0) / den
    return np.array([a, -2.0 * tau / den, 2.0 * xi / den])


def chart_vert_basis(xi, tau, chart):
    """Analytic tangent matrices (du/dxi, du/dtau) of the sphere chart."""
    rho2 = xi * xi + tau * tau
    den2 = (1.0 + rho2) ** 2
    sgn = -1.0 if chart == NORTH else 1.0
    da_dxi, da_dta = sgn * 4.0 * xi / den2, sgn * 4.0 * tau / den2
    db_dxi = 4.0 * xi * tau / den2
    db_dta = -2.0 * (1.0 + xi * xi - tau * tau) / den2
    dc_dxi = 2.0 * (1.0 + tau * tau - xi * xi) / den2
    dc_dta = -4.0 * xi * tau / den2
    B_xi = da_dxi * QI + db_dxi * QJ + dc_dxi * QK
    B_ta = da_dta * QI + db_dta * QJ + dc_dta * QK
    return B_xi, B_ta


def abc_to_chart(abc):
    """Pick the chart with |zeta| <= 1 and return (zeta, chart)."""
    a, b, c = abc
    if a >= 0.0:
        return (c - 1j * b) / (1.0 + a), NORTH
    return (c - 1j * b) / (1.0 - a), SOUTH


def structure_from_abc(abc):
    return abc[0] * QI + abc[1] * QJ + abc[2] * QK


# ---------------------------------------------------------------------------
# Points and tangents


@dataclass
class TwistorPoint:
    """Point of the twistor space: base point, structure, active sphere chart."""
    x: np.ndarray
    abc: np.ndarray
    u: np.ndarray
    zeta: complex
    chart: str


def point_from_structure(x, abc):
    abc = np.asarray(abc, dtype=float)
    if abs(abc @ abc - 1.0) > 1e-9:
        raise DomainError("fiber coefficients (a, b, c) must be a unit vector")
    zeta, chart = abc_to_chart(abc)
    return TwistorPoint(x=np.asarray(x, dtype=float), abc=abc,
                        u=structure_from_abc(abc), zeta=zeta, chart=chart)


def point_from_chart(x, zeta, chart=NORTH):
    zeta = complex(zeta)
    abc = chart_abc(zeta.real, zeta.imag, chart)
    return TwistorPoint(x=np.asarray(x, dtype=float), abc=abc,
                        u=structure_from_abc(abc), zeta=zeta, chart=chart)


def point_q(p):
    """Chart coordinates (x1..x4, xi, tau) of a TwistorPoint."""
    return np.array([*p.x, p.zeta.real, p.zeta.imag])


@dataclass
class TwistorTangent:
    """Tangent in the horizontal/vertical splitting, complex components."""
    h: np.ndarray  # (4,) frame components of the base part
    v: np.ndarray  # (4,4) skew, anticommutes with u

    def __add__(self, other):
        return TwistorTangent(self.h + other.h, self.v + other.v)

    def __sub__(self, other):
        return TwistorTangent(self.h - other.h, self.v - other.v)

    def scale(self, c):
        return TwistorTangent(c * self.h, c * self.v)

    def norm(self):
        return max(np.abs(self.h).max(), np.abs(self.v).max())


def horizontal_lift(m, p, X):
    """Lift of the coordinate-component base vector X: frame components, no v."""
    gp = geometry_at(m, p.x)
    return TwistorTangent(h=gp.theta_inv @ np.asarray(X), v=np.zeros((4, 4)))


def vertical_tangent(p, V):
    V = np.asarray(V)
    return TwistorTangent(h=np.zeros(4, dtype=V.dtype), v=V)


def j_apply(p, t):
    """Almost complex structure: u on the base part, u on the vertical part."""
    return TwistorTangent(h=p.u @ t.h, v=p.u @ t.v)


def g_inner(p, t1, t2):
    """G = g on horizontal + g0 on vertical, complex-bilinear."""
    return t1.h @ t2.h + g0_inner(t1.v, t2.v)


def omega(p, t1, t2):
    """Metric form omega(., .) = G(J ., .)."""
    return g_inner(p, j_apply(p, t1), t2)


def type_project(p, t, which):
    """(1,0) part for which='h' ((t - iJt)/2), (0,1) part for which='a'."""
    if which == "h":
        return TwistorTangent(0.5 * (t.h - 1j * (p.u @ t.h)),
                              0.5 * (t.v - 1j * (p.u @ t.v)))
    if which == "a":
        return TwistorTangent(0.5 * (t.h + 1j * (p.u @ t.h)),
                              0.5 * (t.v + 1j * (p.u @ t.v)))
    raise UsageError(f"type must be 'h' or 'a', got {which!r}")


def vertical_components(p, t, tol=1e-10):
    """Frame matrix V_ij of a vertical tangent, column convention V theta_j = sum V_ij theta_i."""
    if np.abs(t.h).max() > tol:
        raise DomainError("tangent has a nonzero horizontal part")
    anti = p.u @ t.v + t.v @ p.u
    if np.abs(anti).max() > tol * max(1.0, np.abs(t.v).max()):
        raise DomainError("vertical part does not anticommute with u")
    return t.v


# ---------------------------------------------------------------------------
# Chart-level tangent conversion and field compilation


class ChartContext:
    """Fixed (metric, sphere chart) context for FD walks in the 6-dim chart."""

    def __init__(self, metric: MetricField, chart: str):
        self.metric = metric
        self.chart = chart

    @classmethod
    def at_point(cls, metric, p):
        return cls(metric, p.chart)

    def u_at(self, q):
        return structure_from_abc(chart_abc(q[4], q[5], self.chart))

    def point(self, q):
        return point_from_chart(q[:4], complex(q[4], q[5]), self.chart)

    def _vert_project(self, q, du):
        """Chart components (dxi, dta) of a sphere-tangent matrix du."""
        B_xi, B_ta = chart_vert_basis(q[4], q[5], self.chart)
        gram = np.array([[g0_inner(B_xi, B_xi), g0_inner(B_xi, B_ta)],
                         [g0_inner(B_ta, B_xi), g0_inner(B_ta, B_ta)]])
        rhs = np.array([g0_inner(du, B_xi), g0_inner(du, B_ta)])
        return np.linalg.solve(gram, rhs)

    def to_tangent(self, q, dq):
        dq = np.asarray(dq)
        gp = geometry_at(self.metric, q[:4])
        u = self.u_at(q)
        dx = dq[:4]
        B_xi, B_ta = chart_vert_basis(q[4], q[5], self.chart)
        du = dq[4] * B_xi + dq[5] * B_ta
        etaX = gp.eta_of(dx)
        v = du - (u @ etaX - etaX @ u)
        return TwistorTangent(h=gp.theta_inv @ dx, v=v)

    def from_tangent(self, q, t):
        gp = geometry_at(self.metric, q[:4])
        u = self.u_at(q)
        dx = gp.theta @ t.h
        etaX = gp.eta_of(dx)
        du = t.v + (u @ etaX - etaX @ u)
        dxi, dta = self._vert_project(q, du)
        dq = np.empty(6, dtype=complex)
        dq[:4] = dx
        dq[4], dq[5] = dxi, dta
        return dq

    def j_chart(self, q, dq):
        return self.from_tangent(q, j_apply_matrix(self.u_at(q), self.to_tangent(q, dq)))

    def typed_chart(self, q, dq, which):
        jdq = self.j_chart(q, dq)
        return 0.5 * (dq - 1j * jdq) if which == "h" else 0.5 * (dq + 1j * jdq)


def j_apply_matrix(u, t):
    return TwistorTangent(h=u @ t.h, v=u @ t.v)


# Symbolic vector field specs, compiled to chart-level callables.

@dataclass(frozen=True)
class LiftField:
    """Horizontal lift of the i-th frame field."""
    index: int


@dataclass(frozen=True)
class HatField:
    """Vertical field [u, A(x)] of a section A (constant matrix or callable)."""
    section: Union[np.ndarray, Callable]


@dataclass(frozen=True)
class JField:
    base: object


@dataclass(frozen=True)
class TypedField:
    base: object
    which: str


@dataclass(frozen=True)
class ComboField:
    """sum_i c_i * LiftField(i) + HatField(A), as one evaluation."""
    coeffs: tuple
    section: object


def compile_field(ctx: ChartContext, spec):
    if isinstance(spec, LiftField):
        i = spec.index

        def f(q):
            gp = geometry_at(ctx.metric, q[:4])
            dx = gp.theta[:, i]
            u = ctx.u_at(q)
            etaX = gp.eta_of(dx)
            du = u @ etaX - etaX @ u
            dq = np.zeros(6, dtype=complex)
            dq[:4] = dx
            dq[4:] = ctx._vert_project(q, du)
            return dq
        return f

    if isinstance(spec, HatField):
        sec = spec.section
        secfn = sec if callable(sec) else (lambda x, A=np.asarray(sec): A)

        def f(q):
            u = ctx.u_at(q)
            A = secfn(q[:4])
            du = u @ A - A @ u
            dq = np.zeros(6, dtype=complex)
            dq[4:] = ctx._vert_project(q, du)
            return dq
        return f

    if isinstance(spec, ComboField):
        coeffs = np.asarray(spec.coeffs)
        sec = spec.section
        secfn = sec if callable(sec) else (lambda x, A=np.asarray(sec): A)

        def f(q):
            gp = geometry_at(ctx.metric, q[:4])
            dx = gp.theta @ coeffs
            u = ctx.u_at(q)
            etaX = gp.eta_of(dx)
            du = u @ (etaX + secfn(q[:4])) - (etaX + secfn(q[:4])) @ u
            dq = np.zeros(6, dtype=complex)
            dq[:4] = dx
            dq[4:] = ctx._vert_project(q, du)
            return dq
        return f

    if isinstance(spec, JField):
        base = compile_field(ctx, spec.base)

        def f(q):
            return ctx.j_chart(q, base(q))
        return f

    if isinstance(spec, TypedField):
        base = compile_field(ctx, spec.base)
        which = spec.which

        def f(q):
            return ctx.typed_chart(q, base(q), which)
        return f

    raise UsageError(f"unknown field spec {spec!r}")


# ---------------------------------------------------------------------------
# FD calculus


def _jacobian(f, q, h, richardson=False):
    """6x6 complex Jacobian J[k, a] = d_a f^k by central differences."""
    if richardson:
        return (4.0 * _jacobian(f, q, h / 2.0) - _jacobian(f, q, h)) / 3.0
    J = np.empty((6, 6), dtype=complex)
    for a in range(6):
        e = np.zeros(6)
        e[a] = h
        J[:, a] = (f(q + e) - f(q - e)) / (2.0 * h)
    return J


def _dirderiv(fn, q, vec, h, richardson=False):
    """Directional derivative of scalar fn along a complex chart vector."""
    if richardson:
        return (4.0 * _dirderiv(fn, q, vec, h / 2.0) - _dirderiv(fn, q, vec, h)) / 3.0
    out = 0.0 + 0.0j
    vr, vi = np.real(vec), np.imag(vec)
    if np.abs(vr).max() > 1e-14:
        out += (fn(q + h * vr) - fn(q - h * vr)) / (2.0 * h)
    if np.abs(vi).max() > 1e-14:
        out += 1j * (fn(q + h * vi) - fn(q - h * vi)) / (2.0 * h)
    return out


def lie_bracket_fd(m, p, spec1, spec2, h=1e-3, richardson=False):
    """FD Lie bracket of two field specs at p, as a TwistorTangent."""
    ctx = ChartContext.at_point(m, p)
    q = point_q(p)
    f1, f2 = compile_field(ctx, spec1), compile_field(ctx, spec2)
    val = _bracket_chart(f1, f2, q, h, richardson)
    return ctx.to_tangent(q, val)


def _bracket_chart(f1, f2, q, h, richardson=False):
    J1 = _jacobian(f1, q, h, richardson)
    J2 = _jacobian(f2, q, h, richardson)
    return J2 @ f1(q) - J1 @ f2(q)


@dataclass
class FormSpec:
    """A k-form given by a chart-level evaluator (ctx, q, *dq6) -> complex."""
    degree: int
    evaluator: Callable


def metric_form(m):
    def ev(ctx, q, dq1, dq2):
        t1, t2 = ctx.to_tangent(q, dq1), ctx.to_tangent(q, dq2)
        return omega_matrix(ctx.u_at(q), t1, t2)
    return FormSpec(degree=2, evaluator=ev)


def omega_matrix(u, t1, t2):
    jt = j_apply_matrix(u, t1)
    return jt.h @ t2.h + g0_inner(jt.v, t2.v)


def exterior_derivative_fd(m, p, form, specs, h=1e-3, hb=None, richardson=False):
    """Palais formula for (d form)(V_0, ..., V_k) at p with FD derivatives.

    d(form)(V0..Vk) = sum_i (-1)^i V_i(form(..no i..))
                    + sum_{i<j} (-1)^{i+j} form([V_i, V_j], ..no i, j..).
    """
    ctx = ChartContext.at_point(m, p)
    q = point_q(p)
    fields = [compile_field(ctx, s) for s in specs]
    if len(fields) != form.degree + 1:
        raise UsageError(f"need {form.degree + 1} fields for a {form.degree}-form")
    return _ext_d(ctx, form.evaluator, q, fields, h, h if hb is None else hb, richardson)


def _ext_d(ctx, ev, q, fields, h, hb, richardson=False):
    k = len(fields) - 1
    total = 0.0 + 0.0j
    for i in range(k + 1):
        rest = fields[:i] + fields[i + 1:]

        def scalar(qq, rest=rest):
            return ev(ctx, qq, *[f(qq) for f in rest])

        total += (-1) ** i * _dirderiv(scalar, q, fields[i](q), h, richardson)
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            br = _bracket_chart(fields[i], fields[j], q, hb, richardson)
            rest = [fields[n](q) for n in range(k + 1) if n != i and n != j]
            total += (-1) ** (i + j) * ev(ctx, q, br, *rest)
    return total


# ---------------------------------------------------------------------------
# Closed forms


def domega_closed(m, p, U, X, Y):
    """d omega(U-hat, H X, H Y) = G((Id/2 - R)(X ^ Y)-hat, J U).

    U: vertical matrix at p (anticommuting with u); X, Y: frame-component
    base vectors.  Closed-form counterpart of the FD evaluation; on the flat
    metric it reduces to -U[i, j] on frame basis pairs.
    """
    curv = geometry_at(m, p.x).curv()
    return _domega_value(p.u, curv, np.asarray(U), np.asarray(X), np.asarray(Y))


def _domega_value(u, curv, U, X, Y):
    W6 = wedge(X, Y)
    MW = 0.5 * W6 - curv.apply(W6)
    A = phi_inv(MW)
    hatM = u @ A - A @ u
    return g0_inner(hatM, u @ U)


def domega_closed_any(m, p, tangents):
    """Closed-form d omega on three arbitrary TwistorTangents.

    Expands multilinearly; only one-vertical-two-horizontal terms survive.
    """
    curv = geometry_at(m, p.x).curv()
    t1, t2, t3 = tangents
    u = p.u
    return (_domega_value(u, curv, t1.v, t2.h, t3.h)
            - _domega_value(u, curv, t2.v, t1.h, t3.h)
            + _domega_value(u, curv, t3.v, t1.h, t2.h))


def _typed_frame_vec(u, i, which):
    e = _E4[:, i]
    return 0.5 * (e - 1j * (u @ e)) if which == "h" else 0.5 * (e + 1j * (u @ e))


def _hat(u, A):
    return u @ A - A @ u


def _typed_matrix(u, V, which):
    return 0.5 * (V - 1j * (u @ V)) if which == "h" else 0.5 * (V + 1j * (u @ V))


def dprime_closed_va_hh(m, p, Ua, i, j):
    """(2,1)-part slot d'omega(U^a, H theta_i^h, H theta_j^h) = (s/6 - 1) U^a_ij.

    Valid pointwise wherever the metric is anti-self-dual (W+ = 0); s is the
    local scalar curvature.
    """
    s = geometry_at(m, p.x).curv().s
    return (s / 6.0 - 1.0) * np.asarray(Ua)[i, j]


def dprime_closed_vh_ha(m, p, Uh, i, j):
    """(2,1)-part slot d'omega(U^h, H theta_i^h, H theta_j^a) = -i G(B(theta_i^h ^ theta_j^a)-hat, U^h)."""
    curv = geometry_at(m, p.x).curv()
    u = p.u
    W6 = wedge(_typed_frame_vec(u, i, "h"), _typed_frame_vec(u, j, "a"))
    hatB = _hat(u, phi_inv(curv.apply_B(W6)))
    return -1j * g0_inner(hatB, np.asarray(Uh))


def type_component(ctx, ev, q, args, pattern):
    """Sum of ev over all type assignments of args with pattern = (#h, #a)."""
    k = len(args)
    ph, pa = pattern
    if ph + pa != k:
        raise UsageError("pattern must assign a type to every slot")
    total = 0.0 + 0.0j
    for types in itertools.product("ha", repeat=k):
        if types.count("h") != ph:
            continue
        typed = [ctx.typed_chart(q, a, t) for a, t in zip(args, types)]
        total += ev(ctx, q, *typed)
    return total


def dprime_form(m):
    """(2,1)-projection of the closed-form d omega, as a 3-form field."""
    def ev_domega(ctx, q, *dqs):
        p = ctx.point(q)
        return domega_closed_any(ctx.metric, p, [ctx.to_tangent(q, d) for d in dqs])

    def ev(ctx, q, dq1, dq2, dq3):
        return type_component(ctx, ev_domega, q, [dq1, dq2, dq3], (2, 1))

    return FormSpec(degree=3, evaluator=ev)


# ---------------------------------------------------------------------------
# Hessian: closed form (six slots) and FD oracle


_CASE_ARGS = {
    1: ("A1", "A2", "A3", "A4"),
    2: ("A1", "A2", "A3", "i"),
    3: ("i", "j", "A1", "A2"),
    4: ("i", "A1", "j", "A2"),
    5: ("i", "j", "A1", "k"),
    6: ("i", "j", "k", "l"),
}


def hessian_closed_asd(m, p, case, *, i=None, j=None, k=None, l=None,
                       A1=None, A2=None, A3=None, A4=None, fd_step=1e-3):
    """Closed-form i d'd''omega on the six canonical pure-type slots.

    Cases (slot order fixed):
      1: (U1^h, U2^h, U3^a, U4^a)                  -> 0
      2: (U1^h, U2^h, U3^a, H theta_i^a)           -> 0 (and its mirror)
      3: (H theta_i^h, H theta_j^h, U1^a, U2^a)    -> 0 (and its mirror)
      4: (H theta_i^h, U1^h, H theta_j^a, U2^a)    -> three-term formula
      5: (H theta_i^h, H theta_j^h, U1^a, H theta_k^a) -> 0 (and its mirror)
      6: (H theta_i^h, H theta_j^h, H theta_k^a, H theta_l^a)
         -> G(B(theta_j^h ^ theta_l^a)-hat, B(theta_i^h ^ theta_k^a)-hat)
            - G(B(theta_i^h ^ theta_l^a)-hat, B(theta_j^h ^ theta_k^a)-hat)
            - i (s/6 - 1)(s/12) ((theta_k^a ^ theta_l^a)-hat)^a_ij

    Vertical slots are the hatted constant sections A1, A2 (the same sections
    must feed the FD comparison).  Requires an anti-self-dual metric with the
    relevant constancy of s for the suite-level claims; the formula itself is
    evaluated pointwise.
    """
    if case not in _CASE_ARGS:
        raise UsageError(f"case must be 1..6, got {case}")
    given = {"i": i, "j": j, "k": k, "l": l, "A1": A1, "A2": A2, "A3": A3, "A4": A4}
    for name in _CASE_ARGS[case]:
        if given[name] is None:
            raise UsageError(f"case {case} requires argument {name}")
    if case in (1, 2, 3, 5):
        return 0.0 + 0.0j

    gp = geometry_at(m, p.x)
    curv = gp.curv()
    s = curv.s
    u = p.u

    if case == 4:
        U1 = _hat(u, np.asarray(A1))
        U2 = _hat(u, np.asarray(A2))
        U1h = _typed_matrix(u, U1, "h")
        U2a = _typed_matrix(u, U2, "a")

        def hatB(u_, idx_a, idx_h):
            W6 = wedge(_typed_frame_vec(u_, idx_a, "a"), _typed_frame_vec(u_, idx_h, "h"))
            return _hat(u_, phi_inv(curv.apply_B(W6)))

        # fiber derivative of G(B(theta_i^h ^ theta_j^a)-hat, U1^h) along U2^a
        ctx = ChartContext.at_point(m, p)
        q = point_q(p)

        def fiber_fn(qq):
            u_ = ctx.u_at(qq)
            W6 = wedge(_typed_frame_vec(u_, i, "h"), _typed_frame_vec(u_, j, "a"))
            hB = _hat(u_, phi_inv(curv.apply_B(W6)))
            U1h_ = _typed_matrix(u_, _hat(u_, np.asarray(A1)), "h")
            return g0_inner(hB, U1h_)

        dq_dir = np.zeros(6, dtype=complex)
        dq_dir[4:] = ctx._vert_project(q, U2a)
        term1 = -_dirderiv(fiber_fn, q, dq_dir, fd_step)
        term2 = -0.5j * sum(U2a[mm, j] * g0_inner(hatB(u, mm, i), U1h)
                            for mm in range(4))
        term3 = 0.5 * (s / 6.0 - 1.0) * (U2a @ U1h)[i, j]
        return term1 + term2 + term3

    # case 6
    def hatB_ha(idx_h, idx_a):
        W6 = wedge(_typed_frame_vec(u, idx_h, "h"), _typed_frame_vec(u, idx_a, "a"))
        return _hat(u, phi_inv(curv.apply_B(W6)))

    t1 = (g0_inner(hatB_ha(j, l), hatB_ha(i, k))
          - g0_inner(hatB_ha(i, l), hatB_ha(j, k)))
    V = _hat(u, phi_inv(wedge(_typed_frame_vec(u, k, "a"), _typed_frame_vec(u, l, "a"))))
    t2 = -1j * (s / 6.0 - 1.0) * (s / 12.0) * _typed_matrix(u, V, "a")[i, j]
    return t1 + t2


def case_field_specs(case, *, i=None, j=None, k=None, l=None,
                     A1=None, A2=None, A3=None, A4=None):
    """Typed field 4-tuples matching the hessian_closed_asd slot order."""
    Uh = lambda A: TypedField(HatField(A), "h")
    Ua = lambda A: TypedField(HatField(A), "a")
    Hh = lambda n: TypedField(LiftField(n), "h")
    Ha = lambda n: TypedField(LiftField(n), "a")
    if case == 1:
        return (Uh(A1), Uh(A2), Ua(A3), Ua(A4))
    if case == 2:
        return (Uh(A1), Uh(A2), Ua(A3), Ha(i))
    if case == 3:
        return (Hh(i), Hh(j), Ua(A1), Ua(A2))
    if case == 4:
        return (Hh(i), Uh(A1), Ha(j), Ua(A2))
    if case == 5:
        return (Hh(i), Hh(j), Ua(A1), Ha(k))
    if case == 6:
        return (Hh(i), Hh(j), Ha(k), Ha(l))
    raise UsageError(f"case must be 1..6, got {case}")


def hessian_fd(m, p, specs, sigma, h=5e-3, hb=None, richardson=False):
    """sigma * i * d(d'omega) at p on four field specs, all-FD exterior derivative.

    d'omega is the pointwise (2,1)-projection of the closed-form d omega; the
    outer exterior derivative (directional derivatives and Lie brackets) is
    finite differences.  sigma is the frozen global sign from calibrate_hessian_sign.
    """
    val = exterior_derivative_fd(m, p, dprime_form(m), specs,
                                 h=h, hb=hb, richardson=richardson)
    return sigma * 1j * val


def calibrate_hessian_sign(h=5e-3):
    """Fix the global sign so the flat-metric (H h, U^h, H a, U^a) slot is -1/2 (U2^a U1^h)_ij.

    Returns (sigma, residual): sigma in {+1, -1} and the matched slot residual.
    """
    from .riemann import get_metric
    m = get_metric("flat")
    p = point_from_chart(np.zeros(4), 0.1 + 0.05j, NORTH)
    A1, A2 = QJ, QK
    i, j = 0, 1
    closed = hessian_closed_asd(m, p, 4, i=i, j=j, A1=A1, A2=A2)
    raw = exterior_derivative_fd(m, p, dprime_form(m),
                                 case_field_specs(4, i=i, j=j, A1=A1, A2=A2), h=h)
    plus, minus = 1j * raw, -1j * raw
    if abs(minus - closed) <= abs(plus - closed):
        return -1, abs(minus - closed)
    return 1, abs(plus - closed)


# ---------------------------------------------------------------------------
# Nijenhuis tensor


def nijenhuis(m, p, t1, t2, h=1e-3, richardson=False):
    """N(v, w) = [Jv, Jw] - J[Jv, w] - J[v, Jw] - [v, w] via FD brackets.

    v, w are extended canonically: horizontal parts to constant-coefficient
    combinations of frame lifts, vertical parts to hatted constant sections.
    Vanishes identically iff the almost complex structure is integrable.
    """
    ctx = ChartContext.at_point(m, p)
    q = point_q(p)
    u = p.u

    def extend(t):
        A = -0.25 * _hat(u, t.v)
        return ComboField(tuple(np.asarray(t.h)), A)

    s1, s2 = extend(t1), extend(t2)
    f1, f2 = compile_field(ctx, s1), compile_field(ctx, s2)
    jf1, jf2 = compile_field(ctx, JField(s1)), compile_field(ctx, JField(s2))

    b = lambda fa, fb: _bracket_chart(fa, fb, q, h, richardson)
    val = (b(jf1, jf2) - ctx.j_chart(q, b(jf1, f2)) - ctx.j_chart(q, b(f1, jf2))
           - b(f1, f2))
    return ctx.to_tangent(q, val)
