"""
Seeded samplers for points, isometries and frustum points
"""

from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.stats import ortho_group

from lorentz_lab.geometry.euclid import EucIsometry
from lorentz_lab.geometry.horoboundary import FrustumPoint
from lorentz_lab.geometry.isometry import HypIsometry, from_block, renormalize_block
from lorentz_lab.geometry.lorentz_core import SparseVec, j_matrix
from lorentz_lab.geometry.models import BallPoint, HPoint, IdealPoint


def _spatial(values: np.ndarray, start: int = 1) -> SparseVec:
    return SparseVec.from_dense(range(start, start + values.size), values)


def random_hpoint(rng: np.random.Generator, dims: int, scale: float = 1.0) -> HPoint:
    """Point (sqrt(1 + |w|^2), w) with Gaussian w on e1..e_dims"""
    w = rng.normal(scale=scale, size=dims)
    coords = SparseVec.basis(0, float(np.sqrt(1.0 + w @ w))) + _spatial(w)
    return HPoint(coords=coords)


def random_ideal(rng: np.random.Generator, dims: int) -> IdealPoint:
    return IdealPoint.toward(_spatial(rng.normal(size=dims)))


def random_ball_point(rng: np.random.Generator, dims: int, radius: float = 0.9) -> BallPoint:
    """Point of the open ball of the given radius, uniform direction"""
    direction = rng.normal(size=dims)
    direction /= np.linalg.norm(direction)
    return BallPoint(coords=_spatial(direction * radius * rng.uniform()))


def random_frustum_point(
    rng: np.random.Generator, dims: int, sheet: bool = False
) -> FrustumPoint:
    """Frustum point with interior ball component; ``sheet`` puts it on r = 1"""
    x = random_ball_point(rng, dims, radius=0.95)
    if sheet:
        return FrustumPoint(x=x, r=1.0)
    return FrustumPoint.of(x.coords, rng.uniform(x.norm, 1.0))


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 1:
        return np.array([[rng.choice([-1.0, 1.0])]])
    return ortho_group.rvs(n, random_state=rng)


def lie_element(rng: np.random.Generator, dims: int, boost: float, spin: float) -> np.ndarray:
    """Random element [[0, v^T], [v, W]] of so(1, dims) with W antisymmetric"""
    v = rng.normal(scale=boost, size=dims)
    W = rng.normal(scale=spin, size=(dims, dims))
    X = np.zeros((dims + 1, dims + 1))
    X[0, 1:] = v
    X[1:, 0] = v
    X[1:, 1:] = W - W.T
    return X


def random_isometry(
    rng: np.random.Generator, dims: int, boost: float = 0.5, spin: float = 0.5
) -> HypIsometry:
    """exp of a random Lie algebra element, re-orthonormalized, on e0..e_dims"""
    block = expm(lie_element(rng, dims, boost, spin))
    return renormalize_block(range(dims + 1), block)


def random_stabilizer_element(rng: np.random.Generator, dims: int) -> HypIsometry:
    """Random isometry fixing e0"""
    block = np.eye(dims + 1)
    block[1:, 1:] = random_orthogonal(rng, dims)
    return from_block(range(dims + 1), block)


def parabolic_block(s: float, indices: Sequence[int] = (0, 1, 2)) -> HypIsometry:
    """Unipotent isometry fixing the ideal point e0 + e_i, translating by s along e_j"""
    active = tuple(indices)
    J = j_matrix(active)
    a = np.zeros(len(active))
    b = np.zeros(len(active))
    a[0], a[1], b[2] = 1.0, 1.0, 1.0
    X = np.outer(a, b) @ J - np.outer(b, a) @ J
    return from_block(active, expm(s * X))


def boost_block(t: float, indices: Sequence[int] = (0, 1)) -> HypIsometry:
    """Transvection of length |t| along the e_i axis through e0"""
    c, s = np.cosh(t), np.sinh(t)
    return from_block(tuple(indices), np.array([[c, s], [s, c]]))


def random_euclidean(
    rng: np.random.Generator,
    dims: int,
    translation_scale: float = 1.0,
    rotation: Optional[np.ndarray] = None,
) -> EucIsometry:
    """Random orthogonal block on e1..e_dims with a Gaussian translation"""
    A = random_orthogonal(rng, dims) if rotation is None else rotation
    b = _spatial(rng.normal(scale=translation_scale, size=dims))
    return EucIsometry(active=tuple(range(1, dims + 1)), A=A, b=b)


def random_hilbert_vector(rng: np.random.Generator, dims: int, scale: float = 1.0) -> SparseVec:
    return _spatial(rng.normal(scale=scale, size=dims))
