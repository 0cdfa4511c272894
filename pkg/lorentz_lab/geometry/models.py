"""
Points of the hyperbolic space in hyperboloid and Klein coordinates

Hyperboloid: {Q(x) = 1, x0 > 0}.  Klein: the open unit ball of the indices
>= 1, reached by central projection x -> x_tail / x0.  Ideal points are
isotropic rays normalized to x0 = 1, so they project onto the unit sphere.
"""

from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from lorentz_lab.core.config import tolerance
from lorentz_lab.core.errors import (
    CoincidentPoints,
    InvariantViolation,
    NotInHilbertSpace,
    OnBoundary,
)
from lorentz_lab.geometry.lorentz_core import SparseVec, lorentz_form, quadratic_form


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class HPoint(_Frozen):
    """Point on the upper sheet of the hyperboloid"""

    coords: SparseVec

    @model_validator(mode="after")
    def check_on_sheet(self) -> "HPoint":
        q = quadratic_form(self.coords)
        if abs(q - 1.0) > tolerance(self.coords.norm() ** 2):
            raise InvariantViolation(f"Q = {q!r} off the hyperboloid")
        if self.coords.head() <= 0:
            raise InvariantViolation("point lies on the lower sheet")
        return self

    @classmethod
    def origin(cls) -> "HPoint":
        return cls(coords=SparseVec.basis(0))

    @classmethod
    def project(cls, v: SparseVec) -> "HPoint":
        """Rescale a future-directed timelike vector onto the sheet"""
        q = quadratic_form(v)
        if q <= 0 or v.head() <= 0:
            raise InvariantViolation(f"vector with Q = {q!r} is not future timelike")
        return cls(coords=v / np.sqrt(q))


class IdealPoint(_Frozen):
    """Isotropic ray, normalized so that coordinate 0 equals 1"""

    coords: SparseVec

    @model_validator(mode="after")
    def check_isotropic(self) -> "IdealPoint":
        if self.coords.head() != 1.0:
            raise InvariantViolation("ideal point must be normalized to x0 = 1")
        q = quadratic_form(self.coords)
        if abs(q) > tolerance(self.coords.norm() ** 2):
            raise InvariantViolation(f"Q = {q!r}, ray is not isotropic")
        return self

    @classmethod
    def from_ray(cls, v: SparseVec) -> "IdealPoint":
        head = v.head()
        if head <= 0:
            raise InvariantViolation("ray must point to the future (x0 > 0)")
        tail = v.tail()
        norm = tail.norm()
        if norm == 0.0:
            raise InvariantViolation("zero spatial part")
        # exact normalization keeps the head at 1.0 and the tail on the unit sphere
        return cls(coords=SparseVec.basis(0) + tail / norm)

    @classmethod
    def toward(cls, direction: SparseVec) -> "IdealPoint":
        """The ideal point e0 + u for the unit vector u along ``direction``"""
        if 0 in direction.support:
            raise NotInHilbertSpace("direction must be supported on indices >= 1")
        return cls.from_ray(SparseVec.basis(0) + direction / direction.norm())


class BallPoint(_Frozen):
    """Point of the Klein ball; ``closed`` admits the unit sphere"""

    coords: SparseVec
    closed: bool = False

    @model_validator(mode="after")
    def check_inside(self) -> "BallPoint":
        if 0 in self.coords.support:
            raise NotInHilbertSpace("ball coordinates live on indices >= 1")
        norm = self.coords.norm()
        if self.closed:
            if norm > 1.0 + tolerance(1.0):
                raise InvariantViolation(f"norm {norm!r} outside the closed ball")
        elif norm >= 1.0:
            raise InvariantViolation(f"norm {norm!r} outside the open ball")
        return self

    @property
    def norm(self) -> float:
        return self.coords.norm()


class Geodesic(_Frozen):
    """Unit-speed geodesic t -> cosh(t) base + sinh(t) direction"""

    base: HPoint
    direction: SparseVec

    @model_validator(mode="after")
    def check_unit_tangent(self) -> "Geodesic":
        q = quadratic_form(self.direction)
        scale = self.direction.norm() * self.base.coords.norm()
        if abs(q + 1.0) > tolerance(self.direction.norm() ** 2):
            raise InvariantViolation(f"direction has Q = {q!r}, expected -1")
        if abs(lorentz_form(self.base.coords, self.direction)) > tolerance(scale):
            raise InvariantViolation("direction is not tangent at the base point")
        return self


Target = Union[HPoint, IdealPoint]


def dist(x: HPoint, y: HPoint) -> float:
    """Hyperbolic distance, cosh d(x, y) = (x, y).

    Nearby points go through 2 asinh(sqrt(-Q(x - y)) / 2), equal to acosh((x, y))
    on the sheet but free of the cancellation in (x, y) - 1.
    """
    if x.coords == y.coords:
        return 0.0
    pairing = lorentz_form(x.coords, y.coords)
    if pairing >= 2.0:
        return float(np.arccosh(pairing))
    chord = max(-quadratic_form(x.coords - y.coords), 0.0)
    return 2.0 * float(np.arcsinh(np.sqrt(chord) / 2.0))


def from_klein(x: BallPoint) -> HPoint:
    """(e0 + x) / sqrt(1 - |x|^2)"""
    norm = x.norm
    if norm >= 1.0 - tolerance(1.0):
        raise OnBoundary(f"Klein point of norm {norm!r} is not interior")
    return HPoint(coords=(SparseVec.basis(0) + x.coords) / np.sqrt(1.0 - norm * norm))


def to_klein(x: HPoint) -> BallPoint:
    """Central projection onto the ball: x_tail / x0"""
    coords = x.coords.tail() / x.coords.head()
    norm = coords.norm()
    if norm >= 1.0:
        # rounding for very distant points
        coords = coords * (np.nextafter(1.0, 0.0) / norm)
    return BallPoint(coords=coords)


def to_klein_ideal(xi: IdealPoint) -> BallPoint:
    return BallPoint(coords=xi.coords.tail(), closed=True)


def from_klein_ideal(x: BallPoint) -> IdealPoint:
    """Inverse of ``to_klein_ideal`` for points on the unit sphere"""
    if abs(x.norm - 1.0) > tolerance(1.0):
        raise InvariantViolation(f"norm {x.norm!r} is not on the unit sphere")
    return IdealPoint.toward(x.coords)


def klein_distance(a: BallPoint, b: BallPoint) -> float:
    return dist(from_klein(a), from_klein(b))


def initial_vector(x: HPoint, z: SparseVec) -> SparseVec:
    """(z - (x, z) x) / sqrt(-Q(...)), the initial vector at x toward z"""
    w = z.axpy(-lorentz_form(x.coords, z), x.coords)
    q = quadratic_form(w)
    if -q <= (tolerance(1.0) * z.norm()) ** 2:
        raise CoincidentPoints("target coincides with the base point")
    return w / np.sqrt(-q)


def geodesic_through(x: HPoint, y: HPoint) -> Geodesic:
    if dist(x, y) <= tolerance(1.0):
        raise CoincidentPoints("geodesic through a single point is undetermined")
    return Geodesic(base=x, direction=initial_vector(x, y.coords))


def geodesic_toward(x: HPoint, xi: IdealPoint) -> Geodesic:
    """The unit-speed ray from x to the ideal point xi"""
    return Geodesic(base=x, direction=xi.coords / lorentz_form(x.coords, xi.coords) - x.coords)


def eval_geodesic(gamma: Geodesic, t: float) -> HPoint:
    v = gamma.base.coords * np.cosh(t) + gamma.direction * np.sinh(t)
    return HPoint.project(v)


def midpoint(x: HPoint, y: HPoint) -> HPoint:
    """(x + y) / sqrt(Q(x + y)), equidistant from x and y on [x, y]"""
    return HPoint.project(x.coords + y.coords)


def ideal_endpoint(gamma: Geodesic, sign: int = 1) -> IdealPoint:
    """Limit of eval(gamma, t) / cosh(t) as t -> sign * infinity"""
    s = 1.0 if sign >= 0 else -1.0
    return IdealPoint.from_ray(gamma.base.coords + gamma.direction * s)


def angle(p: HPoint, a: Target, b: Target) -> float:
    """Angle at p between the rays toward a and b; ideal targets allowed"""
    u = initial_vector(p, a.coords)
    v = initial_vector(p, b.coords)
    return float(np.arccos(np.clip(-lorentz_form(u, v), -1.0, 1.0)))


def klein_horofunction(center: SparseVec, r: float, y: SparseVec) -> float:
    """Closed-form horofunction with frustum coordinates (center, r), evaluated at the Klein point y.

    log((1 - <x,y> + sqrt((1 - <x,y>)^2 - (1 - |y|^2)(1 - r^2))) / ((1 + r) sqrt(1 - |y|^2)))
    """
    if y.nnz() == 0:
        return 0.0
    a = 1.0 - center.dot(y)
    gap = 1.0 - y.dot(y)
    radicand = max(a * a - gap * (1.0 - r * r), 0.0)
    return float(np.log((a + np.sqrt(radicand)) / ((1.0 + r) * np.sqrt(gap))))


def hyperboloid_horofunction(center: SparseVec, r: float, p: SparseVec) -> float:
    """``klein_horofunction`` at the Klein image of the hyperboloid point p, without projecting.

    Scaling by p0 turns it into log((a + sqrt(a^2 - (1 - r^2))) / (1 + r)) with
    a = p0 - <x, p_tail>.  When p runs toward the center, Q(p) = 1 gives
    a = (1 + |p_perp|^2 + (1 - |x|^2) <u, p_tail>^2) / (p0 + <x, p_tail>), u = x / |x|.
    """
    head, tail = p.head(), p.tail()
    along = center.dot(tail)
    if along > 0.0:
        c2 = center.dot(center)
        u = center / np.sqrt(c2)
        s = u.dot(tail)
        perp = tail.axpy(-s, u)
        a = (1.0 + perp.dot(perp) + max(1.0 - c2, 0.0) * s * s) / (head + along)
    else:
        a = head - along
    radicand = max(a * a - (1.0 - r * r), 0.0)
    return float(np.log((a + np.sqrt(radicand)) / (1.0 + r)))


def busemann(xi: IdealPoint, x: HPoint, x0: HPoint) -> float:
    """Busemann function of xi vanishing at x0; decreases toward xi"""
    center = to_klein_ideal(xi).coords
    return hyperboloid_horofunction(center, 1.0, x.coords) - hyperboloid_horofunction(
        center, 1.0, x0.coords
    )


def sigma_hilbert(x: SparseVec) -> BallPoint:
    """x -> x / sqrt(1 + |x|^2), the Hilbert space onto the open ball"""
    if 0 in x.support:
        raise NotInHilbertSpace("Hilbert vectors live on indices >= 1")
    norm = x.norm()
    return BallPoint(coords=x / np.sqrt(1.0 + norm * norm))


def sigma_hilbert_inverse(y: BallPoint) -> SparseVec:
    norm = y.norm
    if norm >= 1.0 - tolerance(1.0):
        raise OnBoundary(f"ball point of norm {norm!r} has no preimage")
    return y.coords / np.sqrt(1.0 - norm * norm)
