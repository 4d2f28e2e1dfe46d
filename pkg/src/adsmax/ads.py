"""Signature-(2,2) linear algebra and the models of AdS3 and its boundary.

Conventions
-----------
Points of R^{2,2} are length-4 arrays ``(x0, x1, x2, x3)`` with the pairing
``<x, y> = x0 y0 + x1 y1 - x2 y2 - x3 y3``.  AdS3 (double cover) is the
quadric ``<x, x> = -1``; its boundary is the set of null rays, parameterised
by the torus ``(theta, theta') -> (cos theta, sin theta, cos theta', sin theta')``.

Segre identification.  A vector ``x`` is identified with the 2x2 matrix::

    M(x) = [[x2 + x0, x1 + x3],
            [x1 - x3, x2 - x0]]      det M(x) = -<x, x>

so null vectors are exactly the rank-one matrices ``M = a b^T``.  The column
direction ``a`` is the *left* factor and the row direction ``b`` the *right*
factor; a pair ``(A, B)`` in SL(2,R) x SL(2,R) acts by ``M -> A M B^T``.
On the torus, ``a = [cos d : sin d]`` and ``b = [cos s : sin s]`` with
``d = (theta - theta')/2`` and ``s = (theta + theta')/2``.

Lines with the left factor fixed form the *left* foliation, lines with the
right factor fixed the *right* foliation.  Both are light-like for the
conformal class ``d theta^2 - d theta'^2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import config

J = np.diag([1.0, 1.0, -1.0, -1.0])
TWO_PI = 2.0 * np.pi


def bilinear_form(x, y):
    """The signature-(2,2) pairing; broadcasts over leading axes."""
    x = np.asarray(x)
    y = np.asarray(y)
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2] - x[..., 3] * y[..., 3]


def quadratic_form(x):
    return bilinear_form(x, x)


def wrap_angle(a):
    """Reduce angles to the interval (-pi, pi]."""
    r = np.mod(np.asarray(a, dtype=float) + np.pi, TWO_PI) - np.pi
    r = np.where(r == -np.pi, np.pi, r)
    return float(r) if np.ndim(r) == 0 else r


def wrap_projective(a):
    """Reduce an RP^1 angle to [0, pi)."""
    r = np.mod(a, np.pi)
    return float(r) if np.ndim(r) == 0 else r


def projective_angle_diff(a, b):
    """Signed difference of RP^1 angles reduced to (-pi/2, pi/2]."""
    r = np.mod(np.asarray(a) - np.asarray(b) + np.pi / 2, np.pi) - np.pi / 2
    return float(r) if np.ndim(r) == 0 else r


def direction(alpha):
    return np.array([np.cos(alpha), np.sin(alpha)])


def torus_to_null(theta, theta_prime):
    return np.array([np.cos(theta), np.sin(theta), np.cos(theta_prime), np.sin(theta_prime)])


def null_to_torus(x, tol=None):
    """Torus angles of the null ray through ``x``.

    A positive multiple of ``torus_to_null(t, t')`` gives back ``(t, t')``;
    a negative multiple gives the antipodal ray ``(t + pi, t' + pi)``,
    which is the same projective boundary point.
    """
    tol = config.get().null if tol is None else tol
    x = np.asarray(x, dtype=float)
    scale = np.linalg.norm(x)
    if scale == 0.0:
        raise ValueError("zero vector has no boundary point")
    xn = x / scale
    if abs(quadratic_form(xn)) > tol:
        raise ValueError(f"vector is not null: <x,x>/|x|^2 = {quadratic_form(xn):.3e}")
    if np.hypot(xn[0], xn[1]) <= tol or np.hypot(xn[2], xn[3]) <= tol:
        raise ValueError("vector has a vanishing (x0,x1) or (x2,x3) pair")
    theta = np.mod(np.arctan2(xn[1], xn[0]), TWO_PI)
    theta_prime = np.mod(np.arctan2(xn[3], xn[2]), TWO_PI)
    return float(theta), float(theta_prime)


def to_matrix(x):
    x = np.asarray(x)
    return np.array([[x[2] + x[0], x[1] + x[3]], [x[1] - x[3], x[2] - x[0]]])


def from_matrix(m):
    m = np.asarray(m)
    return np.array([
        (m[0, 0] - m[1, 1]) / 2,
        (m[0, 1] + m[1, 0]) / 2,
        (m[0, 0] + m[1, 1]) / 2,
        (m[0, 1] - m[1, 0]) / 2,
    ])


def factor_angles(x):
    """Left and right RP^1 angles (each in [0, pi)) of a null vector."""
    m = to_matrix(np.asarray(x, dtype=float))
    cols = np.linalg.norm(m, axis=0)
    rows = np.linalg.norm(m, axis=1)
    a = m[:, int(np.argmax(cols))]
    b = m[int(np.argmax(rows)), :]
    return wrap_projective(np.arctan2(a[1], a[0])), wrap_projective(np.arctan2(b[1], b[0]))


def factors_to_torus(alpha, beta):
    """Torus angles of the canonical ray over the factor pair ``(alpha, beta)``.

    ``alpha`` and ``beta`` may be unwrapped reals; continuous lifts of the
    factor angles give continuous lifts on the torus.
    """
    return beta + alpha, beta - alpha


def projective_distance(x, y):
    """Distance between the lines through ``x`` and ``y`` (sign-insensitive)."""
    xn = np.asarray(x, dtype=float) / np.linalg.norm(x)
    yn = np.asarray(y, dtype=float) / np.linalg.norm(y)
    return float(min(np.linalg.norm(xn - yn), np.linalg.norm(xn + yn)))


class CausalClass(enum.Enum):
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"
    TIMELIKE = "timelike"


@dataclass(frozen=True)
class BoundaryPoint:
    """A null ray of R^{2,2}, i.e. a point of the boundary torus."""

    theta: float
    theta_prime: float
    null_rep: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_angles(cls, theta, theta_prime):
        t, tp = float(np.mod(theta, TWO_PI)), float(np.mod(theta_prime, TWO_PI))
        return cls(t, tp, torus_to_null(t, tp))

    @classmethod
    def from_null(cls, x, tol=None):
        t, tp = null_to_torus(x, tol)
        return cls(t, tp, torus_to_null(t, tp))

    @classmethod
    def from_factors(cls, alpha, beta):
        return cls.from_angles(*factors_to_torus(alpha, beta))

    @property
    def left(self):
        return wrap_projective((self.theta - self.theta_prime) / 2)

    @property
    def right(self):
        return wrap_projective((self.theta + self.theta_prime) / 2)

    def same_projective_point(self, other, tol=1e-9):
        return projective_distance(self.null_rep, other.null_rep) <= tol

    def as_list(self):
        return [self.theta, self.theta_prime]


def causal_class(p: BoundaryPoint, q: BoundaryPoint, tol=1e-9) -> CausalClass:
    """Causal relation of two boundary points for the class ``[d theta^2 - d theta'^2]``."""
    delta = wrap_angle(q.theta - p.theta)
    delta_p = wrap_angle(q.theta_prime - p.theta_prime)
    if abs(delta) <= tol and abs(delta_p) <= tol:
        raise ValueError("causal class of a point with itself is undefined")
    gap = abs(delta) - abs(delta_p)
    if abs(gap) <= tol:
        return CausalClass.LIGHTLIKE
    return CausalClass.SPACELIKE if gap > 0 else CausalClass.TIMELIKE


def in_so22(g, tol=None):
    tol = config.get().form if tol is None else tol
    g = np.asarray(g)
    return float(np.max(np.abs(g.T @ J @ g - J))) <= tol * max(1.0, float(np.max(np.abs(g))) ** 2)


def mobius(a, alpha):
    """Projective action of a 2x2 matrix on an RP^1 angle."""
    v = np.asarray(a) @ np.array([np.cos(alpha), np.sin(alpha)])
    return wrap_projective(np.arctan2(v[1], v[0]))


def _check_unimodular(a, name, tol=1e-9):
    a = np.asarray(a, dtype=float)
    if a.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2, got shape {a.shape}")
    if abs(np.linalg.det(a) - 1.0) > tol * max(1.0, float(np.abs(a).max()) ** 2):
        raise ValueError(f"{name} must have determinant 1, got {np.linalg.det(a):.6g}")
    return a


def _rep4(a, b):
    g = np.empty((4, 4))
    for i in range(4):
        e = np.zeros(4)
        e[i] = 1.0
        g[:, i] = from_matrix(a @ to_matrix(e) @ b.T)
    return g


@dataclass(frozen=True)
class IsometryPair:
    """An element of SL(2,R) x SL(2,R) together with its SO0(2,2) image."""

    left: np.ndarray
    right: np.ndarray
    rep4: np.ndarray = field(repr=False)

    def __matmul__(self, other: "IsometryPair") -> "IsometryPair":
        return IsometryPair(self.left @ other.left, self.right @ other.right, self.rep4 @ other.rep4)

    def inverse(self) -> "IsometryPair":
        return isometry_from_pair(np.linalg.inv(self.left), np.linalg.inv(self.right))

    def power(self, n: int) -> "IsometryPair":
        a, b = self.left, self.right
        if n < 0:
            # SL(2) inverse is exact: adjugate
            a = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]])
            b = np.array([[b[1, 1], -b[0, 1]], [-b[1, 0], b[0, 0]]])
        a = np.linalg.matrix_power(a, abs(n))
        b = np.linalg.matrix_power(b, abs(n))
        return IsometryPair(a, b, _rep4(a, b))

    def act(self, p: BoundaryPoint) -> BoundaryPoint:
        return BoundaryPoint.from_null(self.rep4 @ p.null_rep)

    def act_factors(self, alpha, beta):
        return mobius(self.left, alpha), mobius(self.right, beta)

    def to_dict(self):
        return {"left": self.left.tolist(), "right": self.right.tolist()}


def isometry_from_pair(a, b) -> IsometryPair:
    a = _check_unimodular(a, "left matrix")
    b = _check_unimodular(b, "right matrix")
    return IsometryPair(a, b, _rep4(a, b))


def fixed_points(a):
    """Attracting and repelling fixed points (RP^1 angles) of a hyperbolic matrix."""
    a = np.asarray(a, dtype=float)
    tr = np.trace(a)
    if abs(tr) <= 2.0:
        raise ValueError(f"matrix is not hyperbolic (|tr| = {abs(tr):.6g} <= 2)")
    evals, evecs = np.linalg.eig(a)
    evals, evecs = evals.real, evecs.real
    order = np.argsort(-np.abs(evals))
    att, rep = evecs[:, order[0]], evecs[:, order[1]]
    return (wrap_projective(np.arctan2(att[1], att[0])),
            wrap_projective(np.arctan2(rep[1], rep[0])))


def limit_fixed_pair(a, b):
    """The four boundary points x^{++}, x^{+-}, x^{-+}, x^{--} of the pair ``(a, b)``."""
    la, lr = fixed_points(a)
    ra, rr = fixed_points(b)
    return {
        "++": BoundaryPoint.from_factors(la, ra),
        "+-": BoundaryPoint.from_factors(la, rr),
        "-+": BoundaryPoint.from_factors(lr, ra),
        "--": BoundaryPoint.from_factors(lr, rr),
    }


def hyperbolic_pair_sample(rng, min_trace=2.5, max_trace=6.0):
    """Random hyperbolic SL(2,R) matrix, conjugated by a random rotation and shear."""
    tr = rng.uniform(min_trace, max_trace)
    lam = (tr + np.sqrt(tr * tr - 4)) / 2
    phi = rng.uniform(0, np.pi)
    c, s = np.cos(phi), np.sin(phi)
    rot = np.array([[c, -s], [s, c]])
    shear = np.array([[1.0, rng.uniform(-0.5, 0.5)], [0.0, 1.0]])
    p = rot @ shear
    return p @ np.diag([lam, 1 / lam]) @ np.linalg.inv(p)


def random_sl2(rng, scale=1.0):
    m = rng.normal(scale=scale, size=(2, 2)) + np.eye(2)
    d = np.linalg.det(m)
    if d < 0:
        m[:, 0] *= -1
        d = -d
    return m / np.sqrt(d)
