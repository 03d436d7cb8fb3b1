"""Linear algebra of skew endomorphisms and bivectors on euclidean R^4.

Conventions used throughout the package:

* Skew4: a 4x4 antisymmetric matrix (real or complex entries).
* Bivector6: coefficients of a 2-vector in the ordered basis
  e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4 (orthonormal for the metric
  induced on Lambda^2 by the euclidean metric).
* Inner products extend complex-bilinearly, never hermitian.

QI, QJ, QK are left multiplication by the quaternions i, j, k under the
identification R^4 ~ H, x = x1 + x2 i + x3 j + x4 k.  They satisfy
QI QJ = QK and its cyclic mates, and span the self-dual sphere of
orientation-compatible orthogonal complex structures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

QI = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])

QJ = np.array([
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
])

QK = np.array([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
])

# Index pairs (i, j), i < j, matching the Bivector6 ordering.
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

_SQ2 = np.sqrt(2.0)

# Rows are the orthonormal bases of the +/-1 eigenspaces of the Hodge star:
# (e12 +- e34)/sqrt2, (e13 -+ e24)/sqrt2, (e14 +- e23)/sqrt2.
BASIS_PLUS = np.array([
    [1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    [0.0, 1.0, 0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
]) / _SQ2

BASIS_MINUS = np.array([
    [1.0, 0.0, 0.0, 0.0, 0.0, -1.0],
    [0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0, -1.0, 0.0, 0.0],
]) / _SQ2


def phi(A):
    """Bivector of a skew matrix: g(phi(A), v^w) = g(Av, w).

    On the basis pairs this reads phi(A)_(i,j) = g(A e_i, e_j) = A[j, i].
    phi(QI) = e1^e2 + e3^e4 and cyclically, so phi carries the compatible
    structures onto the norm-sqrt2 sphere of self-dual bivectors.
    """
    A = np.asarray(A)
    return np.array([A[j, i] for (i, j) in PAIRS])


def phi_inv(b):
    """Skew matrix of a bivector; inverse of phi."""
    b = np.asarray(b)
    A = np.zeros((4, 4), dtype=b.dtype)
    for idx, (i, j) in enumerate(PAIRS):
        A[j, i] = b[idx]
        A[i, j] = -b[idx]
    return A


def wedge(x, y):
    """Bivector6 coefficients of x ^ y for 4-vectors x, y."""
    x = np.asarray(x)
    y = np.asarray(y)
    return np.array([x[i] * y[j] - x[j] * y[i] for (i, j) in PAIRS])


@dataclass
class SelfDualSplit:
    plus: np.ndarray   # coordinates in BASIS_PLUS
    minus: np.ndarray  # coordinates in BASIS_MINUS


def selfdual_split(b):
    """Split a Bivector6 into self-dual / anti-self-dual coordinates."""
    b = np.asarray(b)
    return SelfDualSplit(plus=BASIS_PLUS @ b, minus=BASIS_MINUS @ b)


def selfdual_recompose(split):
    return BASIS_PLUS.T @ split.plus + BASIS_MINUS.T @ split.minus


def g0_inner(V, W):
    """Fiber inner product on skew matrices, g0(V, W) = -tr(VW)/2.

    Complex-bilinear on complexified arguments.  g0(QI, QI) = 2, so the
    sphere of compatible structures has radius sqrt2 in this metric.
    """
    return -0.5 * np.trace(np.asarray(V) @ np.asarray(W))


def bracket(A, B):
    """Matrix commutator [A, B] = AB - BA."""
    A = np.asarray(A)
    B = np.asarray(B)
    return A @ B - B @ A


@dataclass
class CompatStructure:
    """Orthogonal complex structure u = a QI + b QJ + c QK, a^2+b^2+c^2 = 1."""
    abc: np.ndarray
    matrix: np.ndarray


def structure_matrix(a, b, c):
    return a * QI + b * QJ + c * QK


def make_compatible_structure(a, b, c):
    """Unit (a, b, c) -> compatible structure; non-unit input is rejected."""
    nrm2 = a * a + b * b + c * c
    if abs(nrm2 - 1.0) > 1e-9:
        raise DomainError(
            f"(a, b, c) must be a unit vector: |a^2+b^2+c^2 - 1| = {abs(nrm2 - 1.0):.3e}"
        )
    return CompatStructure(abc=np.array([a, b, c]), matrix=structure_matrix(a, b, c))


def _check_anti_involutive_isometry(A, tol=1e-9):
    A = np.asarray(A)
    if np.abs(A @ A + np.eye(4)).max() > tol:
        raise DomainError("matrix is not anti-involutive (A^2 != -Id)")
    if np.abs(A.T @ A - np.eye(4)).max() > tol:
        raise DomainError("matrix is not an isometry (A^T A != Id)")


def respects_orientation(A, tol=1e-9):
    """True iff the anti-involutive isometry A induces the standard orientation.

    Equivalently, iff phi(A) is self-dual.  The two families (left and right
    quaternion multiplications) land entirely in the +1 / -1 eigenspaces of
    the star operator, so the split is clean for valid input.
    """
    _check_anti_involutive_isometry(A, tol)
    s = selfdual_split(phi(A))
    np_, nm = np.linalg.norm(s.plus), np.linalg.norm(s.minus)
    if min(np_, nm) > 1e-6:
        raise DomainError("phi(A) is neither self-dual nor anti-self-dual")
    return np_ > nm
