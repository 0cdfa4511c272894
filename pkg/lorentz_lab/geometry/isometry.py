"""
Isometries of the hyperbolic space as finite-rank perturbations of the identity

A ``HypIsometry`` stores a finite active index set S (always containing 0) and
a |S| x |S| block preserving the restricted Lorentz form; it acts as the
identity on every other coordinate.
"""

from enum import Enum
from typing import List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.linalg import null_space, polar, schur
from scipy.optimize import brentq

from lorentz_lab.core.config import settings, tolerance
from lorentz_lab.core.errors import (
    CoincidentPoints,
    CollinearCenter,
    CollinearDegenerate,
    DegenerateSpan,
    EmptyProbeSet,
    IdentityInput,
    InvariantViolation,
    Unattainable,
    UnequalRadii,
)
from lorentz_lab.core.logging import get_logger
from lorentz_lab.geometry.lorentz_core import (
    LorentzFrame,
    SparseVec,
    fresh_index,
    j_matrix,
    merge_indices,
    lorentz_form,
    q_orthonormalize,
    q_residual,
    quadratic_form,
    union_support,
)
from lorentz_lab.geometry.models import (
    Geodesic,
    HPoint,
    IdealPoint,
    dist,
    initial_vector,
    midpoint,
)

logger = get_logger(__name__)

# Classification thresholds
FIXED_VECTOR_RCOND = 1e-8
TIMELIKE_THRESHOLD = 1e-10
ISOTROPIC_THRESHOLD = 1e-8
PARABOLIC_SPECTRAL_GAP = 1e-4
ELLIPTIC_SPECTRAL_GAP = 1e-8

# Rotation construction
RADIUS_TOLERANCE = 1e-7
COLLINEAR_SINE = 1e-7

TRIM_TOLERANCE = 1e-14


class IsometryType(str, Enum):
    """Conjugacy-invariant type of an isometry"""

    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


class HypIsometry(BaseModel):
    """Lorentz block on a finite active set, identity elsewhere"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    active: Tuple[int, ...]
    block: np.ndarray
    depth: int = 0

    @field_validator("block", mode="before")
    @classmethod
    def freeze_block(cls, value) -> np.ndarray:
        block = np.array(value, dtype=np.float64, copy=True)
        block.flags.writeable = False
        return block

    @model_validator(mode="after")
    def check_lorentz_block(self) -> "HypIsometry":
        active = self.active
        if not active or active[0] != 0 or any(a >= b for a, b in zip(active, active[1:])):
            raise InvariantViolation(f"active set {active} must be sorted, distinct and contain 0")
        n = len(active)
        if self.block.shape != (n, n):
            raise InvariantViolation(f"block shape {self.block.shape} for {n} active indices")
        if not np.all(np.isfinite(self.block)):
            raise InvariantViolation("block has non-finite entries")
        defect = j_orthogonality_defect(self)
        scale = np.linalg.norm(self.block, np.inf) ** 2
        if defect > tolerance(scale):
            raise InvariantViolation(f"block is not J-orthogonal (defect {defect:.3e})")
        if self.block[0, 0] <= 0:
            raise InvariantViolation("block swaps the sheets of the hyperboloid")
        return self

    @property
    def size(self) -> int:
        return len(self.active)

    def expanded(self, indices: Sequence[int]) -> np.ndarray:
        """Dense block on a superset of the active indices"""
        indices = np.asarray(indices, dtype=np.int64)
        pos = np.searchsorted(indices, np.asarray(self.active))
        out = np.eye(indices.size)
        out[np.ix_(pos, pos)] = self.block
        return out

    def trimmed(self) -> "HypIsometry":
        """Drop active indices (other than 0) on which the block is the identity"""
        block = self.block
        eye = np.eye(self.size)
        keep = [
            i
            for i in range(self.size)
            if i == 0
            or np.max(np.abs(block[i] - eye[i])) > TRIM_TOLERANCE
            or np.max(np.abs(block[:, i] - eye[:, i])) > TRIM_TOLERANCE
        ]
        if len(keep) == self.size:
            return self
        return HypIsometry(
            active=tuple(self.active[i] for i in keep),
            block=block[np.ix_(keep, keep)],
            depth=self.depth,
        )


def j_orthogonality_defect(g: HypIsometry) -> float:
    """max |B^T J B - J| over the active block"""
    J = j_matrix(g.active)
    return float(np.max(np.abs(g.block.T @ J @ g.block - J)))


def identity() -> HypIsometry:
    return HypIsometry(active=(0,), block=np.eye(1))


def from_block(active: Sequence[int], block: np.ndarray) -> HypIsometry:
    """Build an isometry from an arbitrary-order index list, adding index 0 if absent"""
    active = [int(a) for a in active]
    block = np.asarray(block, dtype=np.float64)
    if 0 not in active:
        active = [0] + active
        padded = np.eye(len(active))
        padded[1:, 1:] = block
        block = padded
    order = np.argsort(active)
    return HypIsometry(active=tuple(active[i] for i in order), block=block[np.ix_(order, order)])


def _apply_vector(g: HypIsometry, v: SparseVec) -> SparseVec:
    local = v.dense(g.active)
    image = g.block @ local
    return v + SparseVec.from_dense(g.active, image - local)


def apply(g: HypIsometry, x: Union[HPoint, IdealPoint, SparseVec]):
    """Action on points, ideal points (renormalized to x0 = 1) and raw vectors"""
    if isinstance(x, HPoint):
        return HPoint(coords=_apply_vector(g, x.coords))
    if isinstance(x, IdealPoint):
        return IdealPoint.from_ray(_apply_vector(g, x.coords))
    return _apply_vector(g, x)


def compose(g: HypIsometry, h: HypIsometry) -> HypIsometry:
    """g after h, on the union of the active sets"""
    active = merge_indices(g.active, h.active)
    block = g.expanded(active) @ h.expanded(active)
    depth = g.depth + h.depth + 1
    if depth >= settings.renormalize_every:
        return renormalize_block(active, block)
    return HypIsometry(active=active, block=block, depth=depth)


def inverse(g: HypIsometry) -> HypIsometry:
    J = j_matrix(g.active)
    return HypIsometry(active=g.active, block=J @ g.block.T @ J, depth=g.depth)


def renormalize_block(active: Sequence[int], block: np.ndarray) -> HypIsometry:
    """Project a nearly J-orthogonal block back onto the group.

    Modified Gram-Schmidt on the columns in the Lorentz inner product: column 0
    gets Q = +1 and a positive time coordinate, the others Q = -1.
    """
    J = j_matrix(active)
    signs = np.diag(J)
    cols = np.array(block, dtype=np.float64, copy=True)
    for j in range(cols.shape[1]):
        v = cols[:, j]
        for _ in range(2):
            for i in range(j):
                v = v - signs[i] * (v @ J @ cols[:, i]) * cols[:, i]
        q = v @ J @ v
        v = v / np.sqrt(abs(q))
        if j == 0 and v[0] < 0:
            v = -v
        cols[:, j] = v
    return HypIsometry(active=tuple(active), block=cols, depth=0)


def renormalize(g: HypIsometry) -> HypIsometry:
    return renormalize_block(g.active, g.block)


def allclose(g: HypIsometry, h: HypIsometry, atol: float = 1e-9) -> bool:
    active = merge_indices(g.active, h.active)
    return bool(np.max(np.abs(g.expanded(active) - h.expanded(active))) <= atol)


def is_identity(g: HypIsometry, atol: float = 1e-9) -> bool:
    return bool(np.max(np.abs(g.block - np.eye(g.size))) <= atol)


def is_involution(g: HypIsometry, atol: float = 1e-9) -> bool:
    scale = max(1.0, np.linalg.norm(g.block, np.inf) ** 2)
    return bool(np.max(np.abs(g.block @ g.block - np.eye(g.size))) <= atol * scale)


def _frame_operator(
    sources: Sequence[SparseVec],
    images: Sequence[SparseVec],
    signs: Sequence[float],
    support: Sequence[int] = (),
) -> HypIsometry:
    """I + (G - F) diag(signs) F^T J: maps each Q-orthonormal source to its image, fixes the rest"""
    active = merge_indices((0,), union_support(*sources, *images), support)
    F = np.column_stack([v.dense(active) for v in sources])
    G = np.column_stack([v.dense(active) for v in images])
    J = j_matrix(active)
    block = np.eye(len(active)) + (G - F) @ np.diag(signs) @ F.T @ J
    return HypIsometry(active=active, block=block)


def _plane_rotation(center: HPoint, f1: SparseVec, f2: SparseVec, theta: float) -> HypIsometry:
    """Rotation by theta about ``center`` in the tangent plane (f1, f2)"""
    c, s = np.cos(theta), np.sin(theta)
    return _frame_operator(
        [center.coords, f1, f2],
        [center.coords, f1 * c + f2 * s, f2 * c - f1 * s],
        [1.0, -1.0, -1.0],
    )


def transvection(gamma: Geodesic, t: float) -> HypIsometry:
    """Translation by t along gamma"""
    base, direction = gamma.base.coords, gamma.direction
    ch, sh = np.cosh(t), np.sinh(t)
    return _frame_operator(
        [base, direction],
        [base * ch + direction * sh, base * sh + direction * ch],
        [1.0, -1.0],
    )


def _tangent_split(u: SparseVec, v: SparseVec) -> Tuple[SparseVec, float, float]:
    """Component of the unit tangent v orthogonal to the unit tangent u, with its size and cos"""
    cos = -lorentz_form(u, v)
    w = v.axpy(lorentz_form(v, u), u)
    w = w.axpy(lorentz_form(w, u), u)
    return w, float(np.sqrt(max(-quadratic_form(w), 0.0))), cos


def rotation_mapping(p: HPoint, a: HPoint, b: HPoint, strict: bool = False) -> HypIsometry:
    """Rotation about p taking a to b.

    When a, p, b are collinear with p between them the plane is undetermined;
    the half-turn is then taken in the plane of the first unused axis, unless
    ``strict`` asks for ``CollinearDegenerate``.
    """
    ra, rb = dist(p, a), dist(p, b)
    if abs(ra - rb) > RADIUS_TOLERANCE * max(1.0, ra):
        raise UnequalRadii(f"dist(p, a) = {ra:.12g} but dist(p, b) = {rb:.12g}")
    if dist(a, b) <= tolerance(1.0):
        return identity()

    u = initial_vector(p, a.coords)
    v = initial_vector(p, b.coords)
    w, sine, cos = _tangent_split(u, v)
    if sine <= COLLINEAR_SINE:
        if strict:
            raise CollinearDegenerate("a and b lie on opposite rays from p")
        f2 = SparseVec.basis(fresh_index(p.coords, a.coords, b.coords))
        theta = float(np.arctan2(0.0, cos))
    else:
        f2 = w / sine
        theta = float(np.arctan2(sine, cos))
    return _plane_rotation(p, u, f2, theta)


def symmetry(frame: LorentzFrame, support: Sequence[int] = ()) -> HypIsometry:
    """Involution fixing span(frame) and negating its Lorentz complement on the active set"""
    active = merge_indices((0,), frame.support, support)
    J = j_matrix(active)
    P = np.zeros((len(active), len(active)))
    for f, s in zip(frame.vectors, frame.signs):
        col = f.dense(active)
        P += s * np.outer(col, col) @ J
    return HypIsometry(active=active, block=2.0 * P - np.eye(len(active)))


def point_symmetry(m: HPoint, support: Sequence[int] = ()) -> HypIsometry:
    """Geodesic symmetry about the point m"""
    return symmetry(LorentzFrame(positive=m.coords), support)


def match_pointwise(g: HypIsometry, points: Sequence[HPoint]) -> HypIsometry:
    """Small-support isometry agreeing with g on the given points.

    Witt-style extension: the Gram matrices of the points and of their images
    coincide, so the Gram-Schmidt frame built from the points maps linearly
    onto the one built from the images; both frames are completed inside the
    common span of points, images and e0.
    """
    if not points:
        return identity()
    xs = [p.coords for p in points]
    ys = [apply(g, p).coords for p in points]
    e0 = SparseVec.basis(0)
    source = q_orthonormalize(xs[1:] + ys + [e0], xs[0], skip_dependent=True)
    target = q_orthonormalize(ys[1:] + xs + [e0], ys[0], skip_dependent=True)
    if len(source) != len(target):
        raise DegenerateSpan(
            f"frames of points ({len(source)}) and images ({len(target)}) differ in rank"
        )
    h = _frame_operator(source.vectors, target.vectors, source.signs)
    logger.debug("pointwise match built", points=len(points), active=len(h.active))
    return h


def pointwise_dist(g: HypIsometry, h: HypIsometry, probes: Sequence[HPoint]) -> float:
    """max over probes of d(g x, h x)"""
    if not probes:
        raise EmptyProbeSet("pointwise distance needs at least one probe")
    return max(dist(apply(g, x), apply(h, x)) for x in probes)


def classify(g: HypIsometry) -> Tuple[IsometryType, float]:
    """Type and translation length from the fixed subspace and the spectral radius"""
    block = g.block
    spectral_radius = float(np.max(np.abs(np.linalg.eigvals(block))))
    log_radius = max(0.0, float(np.log(spectral_radius)))

    fixed = null_space(block - np.eye(g.size), rcond=FIXED_VECTOR_RCOND)
    gram_eigs = np.empty(0)
    if fixed.size:
        gram = fixed.T @ j_matrix(g.active) @ fixed
        gram_eigs = np.linalg.eigvalsh((gram + gram.T) / 2.0)

    if gram_eigs.size and gram_eigs.max() > TIMELIKE_THRESHOLD:
        return IsometryType.ELLIPTIC, 0.0
    if (
        gram_eigs.size
        and np.min(np.abs(gram_eigs)) <= ISOTROPIC_THRESHOLD
        and log_radius < PARABOLIC_SPECTRAL_GAP
    ):
        return IsometryType.PARABOLIC, 0.0
    if log_radius <= ELLIPTIC_SPECTRAL_GAP:
        return IsometryType.ELLIPTIC, 0.0
    return IsometryType.HYPERBOLIC, log_radius


def translation_length(g: HypIsometry) -> float:
    return classify(g)[1]


def cartan_decompose(g: HypIsometry) -> Tuple[HypIsometry, HypIsometry]:
    """g = p k with p a positive transvection from e0 and k in the stabilizer of e0"""
    k_block, p_block = polar(g.block, side="left")
    p_block = (p_block + p_block.T) / 2.0
    k_block = np.array(k_block, copy=True)
    k_block[0, :] = 0.0
    k_block[:, 0] = 0.0
    k_block[0, 0] = 1.0
    p = HypIsometry(active=g.active, block=p_block).trimmed()
    k = HypIsometry(active=g.active, block=k_block).trimmed()
    return p, k


def _stabilizer_involutions(k: HypIsometry) -> List[HypIsometry]:
    """Split an element fixing e0 into at most two involutions fixing e0.

    Real Schur form of the spatial block: each rotation block R(theta) is the
    product of the reflections across the lines at angles theta/2 and 0.
    """
    spatial = k.block[1:, 1:]
    m = spatial.shape[0]
    if m == 0:
        return []
    T, Z = schur(spatial, output="real")
    first = np.eye(m)
    second = np.eye(m)
    i = 0
    while i < m:
        if i + 1 < m and abs(T[i + 1, i]) > TRIM_TOLERANCE * 100:
            theta = np.arctan2(T[i + 1, i], T[i, i])
            c, s = np.cos(theta), np.sin(theta)
            first[i:i + 2, i:i + 2] = [[c, s], [s, -c]]
            second[i:i + 2, i:i + 2] = [[1.0, 0.0], [0.0, -1.0]]
            i += 2
        else:
            if T[i, i] < 0:
                first[i, i] = -1.0
            i += 1

    factors = []
    for reflection in (first, second):
        if np.allclose(reflection, np.eye(m), atol=TRIM_TOLERANCE):
            continue
        block = np.eye(m + 1)
        block[1:, 1:] = Z @ reflection @ Z.T
        factors.append(HypIsometry(active=k.active, block=block).trimmed())
    return factors


def symmetry_decompose(g: HypIsometry) -> List[HypIsometry]:
    """Write g as an ordered product of symmetries (at most three are produced)"""
    if is_identity(g):
        raise IdentityInput("the identity is not a product of symmetries")
    if is_involution(g):
        return [g]

    origin = HPoint.origin()
    moved = apply(g, origin)
    factors: List[HypIsometry] = []
    k = g
    if dist(origin, moved) > tolerance(1.0):
        sigma = point_symmetry(midpoint(origin, moved), support=g.active)
        factors.append(sigma.trimmed())
        k = compose(sigma, g)
    factors.extend(_stabilizer_involutions(k))
    logger.debug("symmetry decomposition", factors=len(factors), active=len(g.active))
    return factors


def adjust_distance_rotation(z: HPoint, w: HPoint, y: HPoint, delta: float) -> HypIsometry:
    """Rotation about z, in the plane of z, w, y, placing w at distance delta from y"""
    a, c = dist(z, w), dist(z, y)
    slack = RADIUS_TOLERANCE * max(1.0, a + c)
    if delta < abs(a - c) - slack or delta > a + c + slack:
        raise Unattainable(
            f"distance {delta:.12g} outside [{abs(a - c):.12g}, {a + c:.12g}]"
        )
    if a <= tolerance(1.0) or c <= tolerance(1.0):
        return identity()

    f1 = initial_vector(z, y.coords)
    u_w = initial_vector(z, w.coords)
    residual, sine, cos = _tangent_split(f1, u_w)
    if sine <= COLLINEAR_SINE:
        f2 = SparseVec.basis(fresh_index(z.coords, w.coords, y.coords))
        start = 0.0 if cos > 0 else np.pi
    else:
        f2 = residual / sine
        start = float(np.arctan2(sine, cos))

    ch, sh = np.cosh(a), np.sinh(a)

    def gap(phi: float) -> float:
        point = HPoint.project(z.coords * ch + (f1 * np.cos(phi) + f2 * np.sin(phi)) * sh)
        return dist(point, y) - delta

    if gap(0.0) >= 0.0:
        target = 0.0
    elif gap(np.pi) <= 0.0:
        target = np.pi
    else:
        target = brentq(gap, 0.0, np.pi, xtol=1e-15, maxiter=200)
    return _plane_rotation(z, f1, f2, target - start)


def steinhaus_factor(
    g: HypIsometry, x: HPoint, y: HPoint, z: HPoint
) -> Tuple[HypIsometry, HypIsometry]:
    """Two rotations with rho2 rho1 g fixing x: rho1 about z, rho2 about y"""
    frame = q_orthonormalize([y.coords], x.coords, skip_dependent=True)
    off_line = q_residual(z.coords, frame.vectors, frame.signs)
    if -quadratic_form(off_line) <= tolerance(z.coords.norm() ** 2):
        raise CollinearCenter("rotation center lies on the geodesic through x and y")

    gx = apply(g, x)
    rho1 = adjust_distance_rotation(z, gx, y, dist(x, y))
    moved = apply(rho1, gx)
    try:
        rho2 = rotation_mapping(y, moved, x)
    except CoincidentPoints:
        rho2 = identity()
    logger.debug(
        "steinhaus factorization",
        displacement=dist(gx, x),
        residual=dist(apply(rho2, moved), x),
    )
    return rho1, rho2
