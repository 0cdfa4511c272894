"""
Independent numerical oracles used to audit the closed forms

Each oracle reaches its answer by a different route than the code it checks:
direct minimization against spectral translation lengths, far points on a ray
against the closed-form Busemann function, function-space pushforwards and
least-squares re-fits against the frustum actions.
"""

from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize

from lorentz_lab.geometry.euclid import (
    EucIsometry,
    e_apply,
    e_inverse,
    hilbert_frustum_action,
    hilbert_horofunction,
)
from lorentz_lab.geometry.horoboundary import FrustumPoint, frustum_action, horofunction_eval
from lorentz_lab.geometry.isometry import HypIsometry, apply, inverse
from lorentz_lab.geometry.lorentz_core import SparseVec, j_matrix, merge_indices
from lorentz_lab.geometry.models import (
    BallPoint,
    HPoint,
    IdealPoint,
    dist,
    eval_geodesic,
    from_klein,
    geodesic_toward,
    klein_horofunction,
    sigma_hilbert_inverse,
    to_klein,
)

RAY_LENGTH = 40.0


def _polished(fun, starts: Sequence[np.ndarray]) -> float:
    best = np.inf
    for x0 in starts:
        coarse = minimize(
            fun, x0, method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 40000, "maxfev": 40000},
        )
        fine = minimize(fun, coarse.x, method="Powell", options={"xtol": 1e-12, "ftol": 1e-15})
        best = min(best, float(coarse.fun), float(fine.fun))
    return best


def displacement_oracle(g: HypIsometry, rng: np.random.Generator, starts: int = 4) -> float:
    """inf_x d(g x, x) by direct minimization of (g x, x) over the active hyperboloid"""
    m = g.size - 1
    if m == 0:
        return 0.0
    J = j_matrix(g.active)
    block = g.block

    def pairing(w: np.ndarray) -> float:
        x = np.concatenate([[np.sqrt(1.0 + w @ w)], w])
        return float((block @ x) @ J @ x)

    best = _polished(pairing, [rng.normal(scale=0.5, size=m) for _ in range(starts)])
    return 2.0 * float(np.arcsinh(np.sqrt(max(best - 1.0, 0.0) / 2.0)))


def busemann_ray_oracle(xi: IdealPoint, x: HPoint, x0: HPoint, s: float = RAY_LENGTH) -> float:
    """d(x, gamma(s)) - d(x0, gamma(s)) for the ray gamma from x0 to xi"""
    far = eval_geodesic(geodesic_toward(x0, xi), s)
    return dist(x, far) - dist(x0, far)


def klein_grid(rng: np.random.Generator, dims: int, size: int = 64, radius: float = 0.8) -> List[BallPoint]:
    """Probe points of the Klein ball on e1..e_dims"""
    grid = []
    for _ in range(size):
        direction = rng.normal(size=dims)
        direction *= radius * rng.uniform() / np.linalg.norm(direction)
        grid.append(BallPoint(coords=SparseVec.from_dense(range(1, dims + 1), direction)))
    return grid


def _pull_back(g_inv: HypIsometry, y: BallPoint) -> BallPoint:
    return to_klein(apply(g_inv, from_klein(y)))


def frustum_pushforward_defect(g: HypIsometry, F: FrustumPoint, grid: Sequence[BallPoint]) -> float:
    """max over the grid of |xi_{gF}(y) - (xi_F(g^-1 y) - xi_F(g^-1 0))|"""
    g_inv = inverse(g)
    pushed = frustum_action(g, F)
    offset = horofunction_eval(F, _pull_back(g_inv, BallPoint(coords=SparseVec.zero())))
    return max(
        abs(horofunction_eval(pushed, y) - (horofunction_eval(F, _pull_back(g_inv, y)) - offset))
        for y in grid
    )


def refit_frustum_point(
    values: Sequence[float],
    grid: Sequence[BallPoint],
    start: Optional[FrustumPoint] = None,
) -> FrustumPoint:
    """Least-squares frustum coordinates reproducing the given horofunction values on the grid"""
    start_x = start.x.coords if start is not None else SparseVec.zero()
    indices = merge_indices(start_x.support, *(y.coords.support for y in grid))
    points = [y.coords for y in grid]
    target = np.asarray(values, dtype=np.float64)

    def residuals(theta: np.ndarray) -> np.ndarray:
        center = SparseVec.from_dense(indices, theta[:-1])
        return np.array([klein_horofunction(center, theta[-1], y) for y in points]) - target

    theta0 = np.append(start_x.dense(indices), start.r if start is not None else 0.5)
    lower = np.append(np.full(len(indices), -1.0), 0.0)
    upper = np.append(np.full(len(indices), 1.0), 1.0)
    fit = least_squares(residuals, theta0, bounds=(lower, upper), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    x = SparseVec.from_dense(indices, fit.x[:-1])
    return FrustumPoint.of(x, max(float(fit.x[-1]), x.norm()))


def refit_defect(g: HypIsometry, F: FrustumPoint, grid: Sequence[BallPoint]) -> float:
    """Distance between the closed-form image of F and the re-fit of its pushforward values"""
    g_inv = inverse(g)
    offset = horofunction_eval(F, _pull_back(g_inv, BallPoint(coords=SparseVec.zero())))
    values = [horofunction_eval(F, _pull_back(g_inv, y)) - offset for y in grid]
    fitted = refit_frustum_point(values, grid)
    pushed = frustum_action(g, F)
    return float((fitted.x.coords - pushed.x.coords).norm() + abs(fitted.r - pushed.r))


def e_displacement_oracle(g: EucIsometry, rng: np.random.Generator, starts: int = 3) -> float:
    """inf_x |g x - x| by direct minimization over the coordinates g touches"""
    indices = merge_indices(g.active, g.b.support)
    if not indices:
        return 0.0

    def gap(w: np.ndarray) -> float:
        x = SparseVec.from_dense(indices, w)
        moved = e_apply(g, x) - x
        return moved.dot(moved)

    best = _polished(gap, [rng.normal(size=len(indices)) for _ in range(starts)])
    return float(np.sqrt(max(best, 0.0)))


def hilbert_pushforward_defect(g: EucIsometry, F: FrustumPoint, probes: Sequence[SparseVec]) -> float:
    """max over probes of |xi_{gF}(z) - (xi_F(g^-1 z) - xi_F(g^-1 0))|"""
    g_inv = e_inverse(g)
    pushed = hilbert_frustum_action(g, F)
    offset = hilbert_horofunction(F.x, F.r, e_apply(g_inv, SparseVec.zero()))
    return max(
        abs(
            hilbert_horofunction(pushed.x, pushed.r, z)
            - (hilbert_horofunction(F.x, F.r, e_apply(g_inv, z)) - offset)
        )
        for z in probes
    )


def hilbert_embedding(p: SparseVec) -> FrustumPoint:
    """Frustum coordinates of z -> |p - z| - |p|"""
    norm = p.norm()
    x = p / np.sqrt(1.0 + norm * norm)
    return FrustumPoint.of(x, x.norm())


def hilbert_embedding_defect(y: BallPoint, probes: Sequence[SparseVec]) -> float:
    """Sheet r = |y| against the distance-difference formula through the inverse ball map"""
    p = sigma_hilbert_inverse(y)
    return max(
        abs(hilbert_horofunction(y, y.norm, z) - ((p - z).norm() - p.norm())) for z in probes
    )
