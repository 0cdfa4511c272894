"""
Horofunction compactification as the frustum {(x, r) : |x| <= r <= 1}

Frustum coordinates describe horofunctions normalized to vanish at the origin
of the Klein ball.  The same ``FrustumPoint`` serves the hyperbolic space here
and the Hilbert space in ``euclid``.
"""

from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from lorentz_lab.core.config import tolerance
from lorentz_lab.core.errors import (
    CoincidentPoints,
    EmptyFunctionals,
    EmptyProbeSet,
    InvariantViolation,
    NotInStabilizer,
    OnBoundary,
)
from lorentz_lab.geometry.isometry import HypIsometry, apply, inverse
from lorentz_lab.geometry.lorentz_core import SparseVec
from lorentz_lab.geometry.models import (
    BallPoint,
    HPoint,
    IdealPoint,
    busemann,
    dist,
    hyperboloid_horofunction,
    klein_horofunction,
    to_klein,
    to_klein_ideal,
)

STABILIZER_TOLERANCE = 1e-8


class FrustumPoint(BaseModel):
    """Horofunction with ball component x and level r"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: BallPoint
    r: float

    @model_validator(mode="after")
    def check_frustum(self) -> "FrustumPoint":
        if not 0.0 <= self.r <= 1.0:
            raise InvariantViolation(f"level r = {self.r!r} outside [0, 1]")
        if self.x.norm > self.r + tolerance(1.0):
            raise InvariantViolation(f"|x| = {self.x.norm!r} exceeds r = {self.r!r}")
        return self

    @classmethod
    def of(cls, x: SparseVec, r: float) -> "FrustumPoint":
        return cls(x=BallPoint(coords=x, closed=True), r=float(min(max(r, 0.0), 1.0)))

    @property
    def on_sheet(self) -> bool:
        """True on the r = 1 sheet of Busemann-type horofunctions"""
        return self.r == 1.0


def horofunction_eval(F: FrustumPoint, y: BallPoint) -> float:
    """Value at the open-ball point y of the horofunction with frustum coordinates F"""
    if y.norm >= 1.0 - tolerance(1.0):
        raise OnBoundary(f"evaluation point of norm {y.norm!r} is not interior")
    return klein_horofunction(F.x.coords, F.r, y.coords)


def embed_point(p: HPoint) -> FrustumPoint:
    """The horofunction d(p, .) - d(p, 0)"""
    x = to_klein(p).coords
    return FrustumPoint.of(x, x.norm())


def embed_ideal(xi: IdealPoint) -> FrustumPoint:
    """The Busemann function of xi vanishing at the origin"""
    return FrustumPoint(x=to_klein_ideal(xi), r=1.0)


def horo_compare(x: HPoint, y: HPoint, z: HPoint) -> float:
    """d(x, y) - d(x, z)"""
    if dist(y, z) <= tolerance(1.0):
        raise CoincidentPoints("comparison points coincide")
    return dist(x, y) - dist(x, z)


def frustum_action(g: HypIsometry, F: FrustumPoint) -> FrustumPoint:
    """Push the horofunction F forward by g.

    With mu = (g (e0 + x))_0 the ball component moves projectively and the
    level becomes sqrt(1 - (1 - r^2) / mu^2); the r = 1 sheet is invariant.
    """
    lifted = apply(g, SparseVec.basis(0) + F.x.coords)
    mu = lifted.head()
    x = lifted.tail() / mu
    if F.r == 1.0:
        r = 1.0
    else:
        r = float(np.sqrt(max(0.0, 1.0 - (1.0 - F.r * F.r) / (mu * mu))))
        r = min(max(r, x.norm()), 1.0)
    norm = x.norm()
    if norm > 1.0:
        x = x / norm
    return FrustumPoint.of(x, r)


def busemann_hom(g: HypIsometry, xi: IdealPoint, x0: HPoint) -> float:
    """Busemann character of g on the stabilizer of xi"""
    image = apply(g, xi)
    if not image.coords.allclose(xi.coords, atol=STABILIZER_TOLERANCE):
        raise NotInStabilizer("isometry moves the ideal point")
    return busemann(xi, apply(g, x0), x0)


def cocycle(g: HypIsometry, eta: IdealPoint, x0: HPoint) -> float:
    """c(g, eta) = beta_eta(x0, g^-1 x0)"""
    return busemann(eta, x0, apply(inverse(g), x0))


def cocycle_ext(g: HypIsometry, F: FrustumPoint, x0: HPoint) -> float:
    """Extension of the cocycle to every sheet, through the ball component of F"""
    back = apply(inverse(g), x0)
    center = F.x.coords
    return hyperboloid_horofunction(center, 1.0, x0.coords) - hyperboloid_horofunction(
        center, 1.0, back.coords
    )


class WeakProbeReport(BaseModel):
    """Per-element defects of a sequence against a candidate weak limit"""

    defects: List[float]
    tail_defect: float
    tail: int
    passed: bool


def weak_convergence_probe(
    sequence: Sequence[FrustumPoint],
    candidate: FrustumPoint,
    functionals: Sequence[BallPoint],
    tail: int = 3,
    threshold: Optional[float] = None,
) -> WeakProbeReport:
    """Finite-functional test of weak convergence x_n -> x together with r_n -> r"""
    if not functionals:
        raise EmptyFunctionals("weak convergence needs at least one functional")
    if not sequence:
        raise EmptyProbeSet("empty sequence")
    threshold = tolerance(1.0) if threshold is None else threshold

    defects = []
    for F in sequence:
        delta = F.x.coords - candidate.x.coords
        pairing = max(abs(delta.dot(phi.coords)) for phi in functionals)
        defects.append(float(max(pairing, abs(F.r - candidate.r))))
    tail = max(1, min(tail, len(defects)))
    tail_defect = max(defects[-tail:])
    return WeakProbeReport(
        defects=defects, tail_defect=tail_defect, tail=tail, passed=tail_defect < threshold
    )
