"""
Isometries of the Hilbert space, its horofunctions, and the dense conjugacy class

The Hilbert space is realized on the coordinates e1, e2, ... so that its ball
model and the Klein ball of the hyperbolic space share ``BallPoint`` and
``FrustumPoint``.  An ``EucIsometry`` acts as x -> A x + b with A an
orthogonal block on a finite active set and the identity elsewhere.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.linalg import null_space, schur

from lorentz_lab.core.config import tolerance
from lorentz_lab.core.errors import (
    BoundExceeded,
    InsufficientAngleDensity,
    InvalidFrustumPair,
    InvariantViolation,
    LengthMismatch,
    NotInHilbertSpace,
    ZeroTranslation,
)
from lorentz_lab.core.logging import get_logger
from lorentz_lab.geometry.horoboundary import FrustumPoint
from lorentz_lab.geometry.lorentz_core import SparseVec, fresh_index, merge_indices, union_support
from lorentz_lab.geometry.models import BallPoint

logger = get_logger(__name__)

FULL_CHECK_LIMIT = 64
PROBE_COLUMNS = 8
FIXED_VECTOR_RCOND = 1e-9
SCHUR_COUPLING = 1e-12
SPAN_RCOND = 1e-10
TRANSLATION_TOLERANCE = 1e-12
TWO_PI = 2.0 * np.pi


class EucIsometry(BaseModel):
    """x -> A x + b with A orthogonal on ``active`` and the identity elsewhere"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    active: Tuple[int, ...] = ()
    A: np.ndarray = Field(default_factory=lambda: np.eye(0))
    b: SparseVec = Field(default_factory=SparseVec.zero)

    @field_validator("A", mode="before")
    @classmethod
    def freeze_rotation(cls, value) -> np.ndarray:
        block = np.array(value, dtype=np.float64, copy=True)
        block.flags.writeable = False
        return block

    @model_validator(mode="after")
    def check_orthogonal(self) -> "EucIsometry":
        if any(i < 1 for i in self.active) or 0 in self.b.support:
            raise NotInHilbertSpace("Euclidean isometries act on indices >= 1")
        if any(a >= b for a, b in zip(self.active, self.active[1:])):
            raise InvariantViolation(f"active set {self.active} must be sorted and distinct")
        n = len(self.active)
        if self.A.shape != (n, n):
            raise InvariantViolation(f"rotation block shape {self.A.shape} for {n} indices")
        if n == 0:
            return self
        if n <= FULL_CHECK_LIMIT:
            defect = float(np.max(np.abs(self.A.T @ self.A - np.eye(n))))
        else:
            probes = np.random.default_rng(0).standard_normal((n, PROBE_COLUMNS))
            defect = float(np.max(np.abs(self.A.T @ (self.A @ probes) - probes)))
            defect /= float(np.max(np.abs(probes)))
        if defect > tolerance(float(n)):
            raise InvariantViolation(f"rotation block is not orthogonal (defect {defect:.3e})")
        return self

    def expanded(self, indices: Sequence[int]) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        out = np.eye(indices.size)
        if self.active:
            pos = np.searchsorted(indices, np.asarray(self.active))
            out[np.ix_(pos, pos)] = self.A
        return out


class BlockRotation(EucIsometry):
    """Block-diagonal rotation remembering its coordinate planes (i, j, angle)"""

    planes: Tuple[Tuple[int, int, float], ...] = ()

    @property
    def angles(self) -> List[float]:
        return [plane[2] for plane in self.planes]


class ConjugacyReport(BaseModel):
    """Outcome of approximating a target by a conjugate of the dense operator"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    error: float
    bound: float
    snapped: List[Tuple[float, float]] = []
    translation_length: float = 0.0
    radius: Optional[float] = None
    translation_angle: Optional[float] = None
    used_finite_rank: bool = False
    relabel_offset: int = 0
    conjugator: Optional[EucIsometry] = None


def _check_hilbert(v: SparseVec):
    if 0 in v.support:
        raise NotInHilbertSpace("Hilbert vectors live on indices >= 1")


def e_identity() -> EucIsometry:
    return EucIsometry()


def translation(v: SparseVec) -> EucIsometry:
    return EucIsometry(b=v)


def rotation(active: Sequence[int], A: np.ndarray) -> EucIsometry:
    active = [int(i) for i in active]
    order = np.argsort(active)
    A = np.asarray(A, dtype=np.float64)
    return EucIsometry(active=tuple(active[i] for i in order), A=A[np.ix_(order, order)])


def rotation_part(g: EucIsometry) -> EucIsometry:
    return EucIsometry(active=g.active, A=g.A)


def _rotate(g: EucIsometry, v: SparseVec) -> SparseVec:
    if not g.active:
        return v
    local = v.dense(g.active)
    return v + SparseVec.from_dense(g.active, g.A @ local - local)


def e_apply(g: EucIsometry, x: SparseVec) -> SparseVec:
    _check_hilbert(x)
    return _rotate(g, x) + g.b


def e_compose(g: EucIsometry, h: EucIsometry) -> EucIsometry:
    """(A1, b1)(A2, b2) = (A1 A2, A1 b2 + b1)"""
    active = merge_indices(g.active, h.active)
    A = g.expanded(active) @ h.expanded(active)
    return EucIsometry(active=active, A=A, b=_rotate(g, h.b) + g.b)


def e_inverse(g: EucIsometry) -> EucIsometry:
    back = EucIsometry(active=g.active, A=g.A.T)
    return EucIsometry(active=g.active, A=g.A.T, b=-_rotate(back, g.b))


def e_allclose(g: EucIsometry, h: EucIsometry, atol: float = 1e-9) -> bool:
    active = merge_indices(g.active, h.active)
    rotation_gap = float(np.max(np.abs(g.expanded(active) - h.expanded(active)), initial=0.0))
    return rotation_gap <= atol and g.b.allclose(h.b, atol=atol)


def relabel(g: EucIsometry, offset: int) -> EucIsometry:
    """Conjugate by the index shift e_i -> e_{i + offset}"""
    shifted_b = SparseVec.from_dense(g.b.indices + offset, g.b.values)
    active = tuple(i + offset for i in g.active)
    if isinstance(g, BlockRotation):
        planes = tuple((i + offset, j + offset, a) for i, j, a in g.planes)
        return BlockRotation(active=active, A=g.A, b=shifted_b, planes=planes)
    return EucIsometry(active=active, A=g.A, b=shifted_b)


def split_parallel(g: EucIsometry) -> Tuple[SparseVec, SparseVec]:
    """b = b0 + b1 with b0 in im(I - A) and b1 in ker(I - A)"""
    if not g.active:
        return SparseVec.zero(), g.b
    local = g.b.dense(g.active)
    kernel = null_space(np.eye(len(g.active)) - g.A, rcond=FIXED_VECTOR_RCOND)
    parallel = kernel @ (kernel.T @ local) if kernel.size else np.zeros_like(local)
    b0 = SparseVec.from_dense(g.active, local - parallel)
    return b0, g.b - b0


def e_translation_length(g: EucIsometry) -> float:
    return split_parallel(g)[1].norm()


def fixed_point_center(g: EucIsometry, b0: Optional[SparseVec] = None) -> SparseVec:
    """A point z0 with A z0 + b0 = z0 (least squares on the active block)"""
    if not g.active:
        return SparseVec.zero()
    b0 = split_parallel(g)[0] if b0 is None else b0
    z, *_ = np.linalg.lstsq(np.eye(len(g.active)) - g.A, b0.dense(g.active), rcond=None)
    return SparseVec.from_dense(g.active, z)


def hilbert_horofunction(y: BallPoint, r: float, z: SparseVec) -> float:
    """Horofunction of the Hilbert space with frustum coordinates (y, r), evaluated at z"""
    if r < 0.0 or r > 1.0 + tolerance(1.0) or y.norm > r + tolerance(1.0):
        raise InvalidFrustumPair(f"|y| = {y.norm!r}, r = {r!r}")
    if z.nnz() == 0:
        return 0.0
    if r >= 1.0:
        return -y.coords.dot(z)
    gap = np.sqrt(1.0 - r * r)
    s = r / gap
    w = y.coords / gap
    radicand = s * s - 2.0 * z.dot(w) + z.dot(z)
    return float(np.sqrt(max(radicand, 0.0)) - s)


def hilbert_frustum_action(g: EucIsometry, F: FrustumPoint) -> FrustumPoint:
    """Orthogonal part rotates x and keeps r; the translation part moves the level too"""
    x = _rotate(g, F.x.coords)
    v = g.b
    if F.r >= 1.0 or v.nnz() == 0:
        return FrustumPoint.of(x, F.r)
    gap = np.sqrt(1.0 - F.r * F.r)
    w = x / gap
    s = F.r / gap
    lam2 = max(s * s + v.dot(v) + 2.0 * v.dot(w), 0.0)
    scale = np.sqrt(1.0 + lam2)
    moved = (w + v) / scale
    level = min(max(float(np.sqrt(lam2) / scale), moved.norm()), 1.0)
    return FrustumPoint.of(moved, level)


def orthonormal_columns(vectors: Sequence[SparseVec], indices: Sequence[int]) -> np.ndarray:
    """Orthonormal basis of the span, as dense columns on ``indices`` (SVD, rank-revealing)"""
    if not vectors:
        return np.zeros((len(indices), 0))
    M = np.column_stack([v.dense(indices) for v in vectors])
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if not s.size or s[0] == 0.0:
        return np.zeros((len(indices), 0))
    return U[:, s > SPAN_RCOND * s[0]]


def _complement_columns(basis: np.ndarray, subspace: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(basis) minus span(subspace)"""
    if basis.shape[1] == 0:
        return basis
    residual = basis - subspace @ (subspace.T @ basis)
    U, s, _ = np.linalg.svd(residual, full_matrices=False)
    return U[:, s > 0.5]


def finite_rank_match(A: EucIsometry, points: Sequence[SparseVec]) -> EucIsometry:
    """Rotation agreeing with A on the points and the identity off span(points, A points)"""
    if not points:
        return e_identity()
    for x in points:
        _check_hilbert(x)
    rot = rotation_part(A)
    images = [_rotate(rot, x) for x in points]
    indices = union_support(*points, *images)
    if not indices:
        return e_identity()

    X = orthonormal_columns(points, indices)
    Y = A.expanded(indices) @ X
    span = orthonormal_columns(list(points) + images, indices)
    S = np.hstack([X, _complement_columns(span, X)])
    D = np.hstack([Y, _complement_columns(span, Y)])
    if S.shape != D.shape:
        raise InvariantViolation("point span and image span differ in dimension")
    block = np.eye(len(indices)) + (D - S) @ S.T
    return EucIsometry(active=indices, A=block)


def build_dense_U(
    angles: Sequence[float], block_dims: Sequence[int], start_index: int = 1
) -> BlockRotation:
    """Block-diagonal rotation, rotating every plane of the n-th block by angles[n]"""
    if len(angles) != len(block_dims):
        raise LengthMismatch(f"{len(angles)} angles for {len(block_dims)} blocks")
    if any(d <= 0 or d % 2 for d in block_dims):
        raise LengthMismatch("block dimensions must be positive and even")
    if start_index < 1:
        raise NotInHilbertSpace("dense operator must start at index >= 1")

    planes = []
    index = start_index
    for theta, dim in zip(angles, block_dims):
        for _ in range(dim // 2):
            planes.append((index, index + 1, float(theta)))
            index += 2
    n = index - start_index
    A = np.eye(n)
    for i, j, theta in planes:
        p, q = i - start_index, j - start_index
        c, s = np.cos(theta), np.sin(theta)
        A[p, p], A[p, q], A[q, p], A[q, q] = c, -s, s, c
    return BlockRotation(active=tuple(range(start_index, index)), A=A, planes=tuple(planes))


def max_angle_gap(angles: Sequence[float]) -> float:
    """Largest circular gap between consecutive angles"""
    if not len(angles):
        return TWO_PI
    ring = np.sort(np.mod(np.asarray(angles, dtype=np.float64), TWO_PI))
    gaps = np.diff(np.append(ring, ring[0] + TWO_PI))
    return float(gaps.max())


def _circular_distance(a: float, b: float) -> float:
    d = abs((a - b) % TWO_PI)
    return min(d, TWO_PI - d)


def _rotation_planes(E: EucIsometry) -> Tuple[List[Tuple[np.ndarray, np.ndarray, float]], List[np.ndarray]]:
    """Oriented invariant planes with angles in (0, pi], and the -1 directions"""
    planes: List[Tuple[np.ndarray, np.ndarray, float]] = []
    flips: List[np.ndarray] = []
    if not E.active:
        return planes, flips
    T, Z = schur(E.A, output="real")
    m = T.shape[0]
    i = 0
    while i < m:
        if i + 1 < m and abs(T[i + 1, i]) > SCHUR_COUPLING:
            theta = float(np.arctan2(T[i + 1, i], T[i, i]))
            z1, z2 = Z[:, i], Z[:, i + 1]
            if theta < 0:
                z1, z2, theta = z2, z1, -theta
            planes.append((z1, z2, theta))
            i += 2
        else:
            if T[i, i] < 0:
                flips.append(Z[:, i])
            i += 1
    return planes, flips


def swap_conjugator(pairs: Sequence[Tuple[SparseVec, SparseVec]]) -> EucIsometry:
    """Orthogonal involution exchanging q and p for each orthonormal pair (q, p)"""
    vectors = [v for pair in pairs for v in pair]
    indices = union_support(*vectors)
    T = np.eye(len(indices))
    for q, p in pairs:
        qd, pd = q.dense(indices), p.dense(indices)
        T += -np.outer(qd, qd) - np.outer(pd, pd) + np.outer(pd, qd) + np.outer(qd, pd)
    return EucIsometry(active=indices, A=T)


def translation_by_rotation(
    b1: SparseVec,
    points: Sequence[SparseVec],
    eps: float,
    angles: Optional[Sequence[float]] = None,
) -> EucIsometry:
    """Rotation about a far center R u that moves the points almost like the translation b1.

    Without an angle set, R is the smallest power of two with R >= |b1|, R > r
    and R (1 - 1 / sqrt(1 + r^2 / R^2)) < eps, where r bounds the projections
    of the points and b1 on the b1 axis, scaled by |b1| / eps.  With an angle
    set, the smallest admissible angle fixes R = |b1| / sin(angle).
    """
    length = b1.norm()
    if length <= TRANSLATION_TOLERANCE:
        raise ZeroTranslation("translation vector is zero")
    axis = b1 / length
    u = SparseVec.basis(fresh_index(b1, *points))

    if angles is None:
        reach = max([length] + [abs(x.dot(axis)) for x in points])
        r = reach * length / eps
        R = 2.0 ** np.ceil(np.log2(length))
        while not (R >= length and R > r and R * (1.0 - 1.0 / np.sqrt(1.0 + (r / R) ** 2)) < eps):
            R *= 2.0
        alpha = float(np.arcsin(min(length / R, 1.0)))
    else:
        admissible = sorted(a for a in np.mod(angles, TWO_PI) if 0.0 < a <= np.pi / 2)
        if not admissible:
            raise InsufficientAngleDensity("no angle in (0, pi/2] to carry the translation")
        alpha = float(admissible[0])
        R = length / np.sin(alpha)

    return _affine_plane_rotation(u * R, -u, axis, alpha)


def _affine_plane_rotation(center: SparseVec, p1: SparseVec, p2: SparseVec, theta: float) -> EucIsometry:
    """x -> c + L (x - c) with L the rotation by theta taking p1 toward p2"""
    indices = union_support(p1, p2)
    L = np.eye(len(indices))
    d1, d2 = p1.dense(indices), p2.dense(indices)
    c, s = np.cos(theta), np.sin(theta)
    L += (c - 1.0) * (np.outer(d1, d1) + np.outer(d2, d2)) + s * (np.outer(d2, d1) - np.outer(d1, d2))
    L_rot = EucIsometry(active=indices, A=L)
    return EucIsometry(active=indices, A=L, b=center - _rotate(L_rot, center))


def _motion_rank(E: EucIsometry) -> int:
    if not E.active:
        return 0
    return int(np.linalg.matrix_rank(np.eye(len(E.active)) - E.A, tol=1e-9))


def approximate_by_conjugate(
    U: BlockRotation,
    g: EucIsometry,
    points: Sequence[SparseVec],
    eps: float,
    fixed_point: Optional[SparseVec] = None,
) -> Tuple[EucIsometry, ConjugacyReport]:
    """Conjugate of U within sqrt(5) eps of g on the points.

    The target is reduced to its fixed-point-centred elliptic part plus a
    parallel translation; the elliptic planes are snapped to unused planes of
    U, the translation is replaced by a rotation about a far center whose
    angle is also taken from U, and U is conjugated by a swap of coordinate
    planes followed by a translation.

    Trading a translation of length L for a rotation by the smallest usable
    angle a of U leaves an offset of L tan(a / 2), so on a fixed angle grid a
    long enough translation raises BoundExceeded even when the density check
    passes.
    """
    if eps <= 0:
        raise InvariantViolation("accuracy must be positive")
    bound = float(np.sqrt(5.0) * eps)
    k = len(points)
    if k == 0:
        return U, ConjugacyReport(error=0.0, bound=bound)
    for x in points:
        _check_hilbert(x)
    gap = max_angle_gap(U.angles)
    if gap / 2.0 >= eps / k:
        raise InsufficientAngleDensity(
            f"angle gap {gap:.4g} leaves a half-gap of at least eps/k = {eps / k:.4g}"
        )
    if e_allclose(g, U):
        return U, ConjugacyReport(error=0.0, bound=bound)

    b0, b1 = split_parallel(g)
    z0 = fixed_point_center(g, b0) if fixed_point is None else fixed_point
    shifted = [x - z0 for x in points]
    length = b1.norm()
    moving = length > TRANSLATION_TOLERANCE

    rot = rotation_part(g)
    matched = finite_rank_match(rot, shifted + ([b1] if moving else []))
    use_matched = _motion_rank(matched) < _motion_rank(rot)
    elliptic = matched if use_matched else rot
    planes, flips = _rotation_planes(elliptic)

    # indices reserved for the translation axis and a half-turn companion
    top = max(
        [fresh_index(*points, g.b, z0, b1)]
        + [max(g.active) + 1 if g.active else 1]
    )
    u_index, companion_index = top, top + 1
    offset = max(0, top + 2 - min(U.active)) if U.active else 0
    dense = relabel(U, offset) if offset else U

    basis = elliptic.active
    targets: List[Tuple[SparseVec, SparseVec, float]] = [
        (SparseVec.from_dense(basis, z1), SparseVec.from_dense(basis, z2), theta)
        for z1, z2, theta in planes
    ]
    flip_vectors = [SparseVec.from_dense(basis, f) for f in flips]
    while len(flip_vectors) >= 2:
        targets.append((flip_vectors.pop(), flip_vectors.pop(), np.pi))
    if flip_vectors:
        targets.append((flip_vectors.pop(), SparseVec.basis(companion_index), np.pi))

    used = set()
    swaps: List[Tuple[int, int, SparseVec, SparseVec, float]] = []
    snapped: List[Tuple[float, float]] = []
    for p1, p2, theta in targets:
        choice = min(
            (s for s in range(len(dense.planes)) if s not in used),
            key=lambda s: _circular_distance(dense.planes[s][2], theta),
            default=None,
        )
        if choice is None:
            raise InsufficientAngleDensity("dense operator has too few planes for the target")
        used.add(choice)
        i, j, angle = dense.planes[choice]
        swaps.append((i, j, p1, p2, angle))
        snapped.append((float(theta), float(angle)))

    center = SparseVec.zero()
    radius = None
    translation_angle = None
    if moving:
        axis = b1 / length
        u = SparseVec.basis(u_index)
        candidates = [
            s for s in range(len(dense.planes))
            if s not in used and 0.0 < dense.planes[s][2] % TWO_PI <= np.pi / 2
        ]
        if not candidates:
            raise InsufficientAngleDensity("no unused angle in (0, pi/2] for the translation")
        choice = min(candidates, key=lambda s: dense.planes[s][2] % TWO_PI)
        used.add(choice)
        i, j, angle = dense.planes[choice]
        translation_angle = float(angle % TWO_PI)
        radius = float(length / np.sin(translation_angle))
        center = u * radius
        swaps.append((i, j, -u, axis, angle))

    # L = T U T with T exchanging the used coordinate planes and the target planes
    target_vectors = [v for swap in swaps for v in swap[2:4]]
    active = merge_indices(dense.active, union_support(*target_vectors))
    L = dense.expanded(active)
    pos = {index: n for n, index in enumerate(active)}
    for i, j, p1, p2, angle in swaps:
        a, b = pos[i], pos[j]
        L[a, a], L[a, b], L[b, a], L[b, b] = 1.0, 0.0, 0.0, 1.0
        d1, d2 = p1.dense(active), p2.dense(active)
        c, s = np.cos(angle), np.sin(angle)
        L += (c - 1.0) * (np.outer(d1, d1) + np.outer(d2, d2)) + s * (np.outer(d2, d1) - np.outer(d1, d2))

    linear = EucIsometry(active=active, A=L)
    shift = z0 + center
    h = EucIsometry(active=active, A=L, b=shift - _rotate(linear, shift))

    error = max((e_apply(g, x) - e_apply(h, x)).norm() for x in points)
    swap_pairs = [(SparseVec.basis(i), p1) for i, _, p1, _, _ in swaps] + [
        (SparseVec.basis(j), p2) for _, j, _, p2, _ in swaps
    ]
    conjugator = e_compose(translation(shift), swap_conjugator(swap_pairs))
    report = ConjugacyReport(
        error=float(error),
        bound=bound,
        snapped=snapped,
        translation_length=float(length),
        radius=radius,
        translation_angle=translation_angle,
        used_finite_rank=use_matched,
        relabel_offset=offset,
        conjugator=conjugator,
    )
    logger.debug(
        "dense conjugate built",
        planes=len(swaps),
        error=report.error,
        bound=bound,
        radius=radius,
    )
    if error >= bound:
        raise BoundExceeded(f"achieved error {error:.4g} exceeds sqrt(5) eps = {bound:.4g}")
    return h, report
