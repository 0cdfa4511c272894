"""
Conjugacy experiments: no dense conjugacy class in the hyperbolic group,
a dense conjugacy class in the Euclidean group
"""

from typing import Any, List, NamedTuple, Tuple

import numpy as np
from scipy.linalg import block_diag
from scipy.optimize import minimize

from lorentz_lab.core.errors import NonPositiveLength
from lorentz_lab.core.logging import get_logger
from lorentz_lab.geometry.euclid import EucIsometry, approximate_by_conjugate, build_dense_U
from lorentz_lab.geometry.lorentz_core import SparseVec
from lorentz_lab.geometry.sampling import random_orthogonal
from lorentz_lab.models.experiment import ExperimentConfig, ExperimentName, TrialRecord
from lorentz_lab.services.experiment_service import Experiment, trial_record

logger = get_logger(__name__)

GRID_CHUNK = 65536
MAX_PLANE_RADIUS = 15.0


def collinear_orbit(t: float) -> np.ndarray:
    """Klein coordinates of g^-1 e0, e0, g e0 for the transvection of length t along e1"""
    if t <= 0:
        raise NonPositiveLength(f"translation length must be positive, got {t!r}")
    s = np.tanh(t)
    return np.array([[-s, 0.0], [0.0, 0.0], [s, 0.0]])


def sphere_spread(centers: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Half the spread of the distances from each center to the points.

    This is the best max-deviation of the points from a sphere about the center.
    """
    gap_points = 1.0 - np.sum(points * points, axis=1)
    gap_centers = 1.0 - np.sum(centers * centers, axis=1)
    cosh = (1.0 - centers @ points.T) / np.sqrt(np.outer(gap_centers, gap_points))
    distances = np.arccosh(np.maximum(cosh, 1.0))
    return (distances.max(axis=1) - distances.min(axis=1)) / 2.0


def horosphere_spread(angles: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Half the spread of the Busemann values of the points, per ideal center angle"""
    ideal = np.column_stack([np.cos(angles), np.sin(angles)])
    gap_points = 1.0 - np.sum(points * points, axis=1)
    values = np.log((1.0 - ideal @ points.T) / np.sqrt(gap_points))
    return (values.max(axis=1) - values.min(axis=1)) / 2.0


def _klein_from_plane(w: np.ndarray) -> np.ndarray:
    radius = np.linalg.norm(w)
    if radius == 0.0:
        return np.zeros(2)
    return w * (np.tanh(min(radius, MAX_PLANE_RADIUS)) / radius)


def _plane_from_klein(c: np.ndarray) -> np.ndarray:
    radius = np.linalg.norm(c)
    if radius == 0.0:
        return np.zeros(2)
    return c * (np.arctanh(radius) / radius)


class NeutralSearch(NamedTuple):
    resolution: float
    coarse: float
    refined: float
    certificate: float


def neutral_search(points: np.ndarray, resolution: float, offset: float = 0.0) -> NeutralSearch:
    """Grid search over spheres and horospheres, refined by Nelder-Mead.

    Sphere centers run over the Klein grid of the given spacing (shifted by
    ``offset``) inside |c| <= 1 - resolution; ideal centers run over the angle
    grid of the same spacing.  The certificate is the refined minimum less the
    resolution.
    """
    axis = np.arange(-1.0 + offset, 1.0, resolution)
    best_sphere = np.inf
    best_center = np.zeros(2)
    rows = max(1, GRID_CHUNK // axis.size)
    for start in range(0, axis.size, rows):
        xs, ys = np.meshgrid(axis[start:start + rows], axis, indexing="ij")
        centers = np.column_stack([xs.ravel(), ys.ravel()])
        centers = centers[np.linalg.norm(centers, axis=1) <= 1.0 - resolution]
        if not centers.size:
            continue
        spread = sphere_spread(centers, points)
        pos = int(np.argmin(spread))
        if spread[pos] < best_sphere:
            best_sphere, best_center = float(spread[pos]), centers[pos]

    angles = np.arange(offset, 2.0 * np.pi, resolution)
    horo = horosphere_spread(angles, points)
    best_angle = float(angles[int(np.argmin(horo))])
    coarse = min(best_sphere, float(horo.min()))

    sphere_fit = minimize(
        lambda w: float(sphere_spread(_klein_from_plane(w)[None, :], points)[0]),
        _plane_from_klein(best_center),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000},
    )
    horo_fit = minimize(
        lambda a: float(horosphere_spread(np.atleast_1d(a), points)[0]),
        np.array([best_angle]),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-12, "maxiter": 2000},
    )
    refined = min(coarse, float(sphere_fit.fun), float(horo_fit.fun))
    return NeutralSearch(resolution, coarse, refined, refined - resolution)


class NoDenseConjugacyExperiment(Experiment):
    """Certified lower bound on how well neutral isometries match a transvection on its orbit"""

    name = ExperimentName.NO_DENSE_CONJUGACY
    min_dims = 2

    def validate(self, config: ExperimentConfig):
        super().validate(config)
        if config.t <= 0:
            raise NonPositiveLength(f"translation length must be positive, got {config.t!r}")

    def prepare(self, config: ExperimentConfig) -> np.ndarray:
        return collinear_orbit(config.t)

    def run_trial(
        self, config: ExperimentConfig, points: np.ndarray, index: int, rng: np.random.Generator
    ) -> TrialRecord:
        resolutions = sorted(config.resolutions, reverse=True)
        searches = [neutral_search(points, h, rng.uniform(0.0, h)) for h in resolutions]

        steps = [a - b for a, b in zip(resolutions, resolutions[1:])]
        bound = min(steps) if steps else resolutions[0]
        drops = [a.certificate - b.certificate for a, b in zip(searches, searches[1:])]
        if all(s.certificate > 0 for s in searches):
            defect = max([0.0] + drops)
        else:
            defect = bound

        details = {}
        for search in searches:
            details[f"certificate@{search.resolution:g}"] = search.certificate
            details[f"coarse@{search.resolution:g}"] = search.coarse
        details["expected"] = float(np.log(np.cosh(config.t)) / 2.0)
        return trial_record(
            index,
            {"t": config.t, "resolutions": resolutions, "trial": index, "seed": config.seed},
            defect,
            bound,
            details,
        )


TARGET_KINDS = ("elliptic", "translation", "mixed")


def _ball_vector(rng: np.random.Generator, dims: int, radius: float) -> np.ndarray:
    v = rng.normal(size=dims)
    return v * (radius * rng.uniform() / np.linalg.norm(v))


def sample_target(kind: str, rng: np.random.Generator, dims: int) -> Tuple[np.ndarray, np.ndarray]:
    """Rotation block and translation vector of a random target of the given kind"""
    z0 = _ball_vector(rng, dims, 0.25)
    if kind == "translation":
        b = rng.normal(size=dims)
        return np.eye(dims), b / np.linalg.norm(b)
    if kind == "elliptic":
        A = random_orthogonal(rng, dims)
        return A, (np.eye(dims) - A) @ z0

    free = 2 if dims >= 3 else 1
    Q = random_orthogonal(rng, dims)
    A = Q @ block_diag(random_orthogonal(rng, dims - free), np.eye(free)) @ Q.T
    direction = Q[:, dims - free:] @ rng.normal(size=free)
    b1 = direction * (rng.uniform(0.5, 1.5) / np.linalg.norm(direction))
    return A, (np.eye(dims) - A) @ z0 + b1


class DenseConjugacyExperiment(Experiment):
    """Approximation of random Euclidean targets by conjugates of one dense rotation"""

    name = ExperimentName.DENSE_CONJUGACY
    min_dims = 2

    def prepare(self, config: ExperimentConfig):
        spacing = config.epsilon / config.k
        angles = np.arange(0.0, 2.0 * np.pi, spacing)
        U = build_dense_U(angles, [config.block_dims] * angles.size, start_index=config.dims + 3)
        logger.info("Dense rotation built", planes=len(U.planes), spacing=spacing)
        return U

    def run_trial(
        self, config: ExperimentConfig, U: Any, index: int, rng: np.random.Generator
    ) -> TrialRecord:
        kind = TARGET_KINDS[index % len(TARGET_KINDS)]
        indices = range(1, config.dims + 1)
        A, b = sample_target(kind, rng, config.dims)
        g = EucIsometry(active=tuple(indices), A=A, b=SparseVec.from_dense(indices, b))
        probes: List[np.ndarray] = [_ball_vector(rng, config.dims, 0.5) for _ in range(config.k)]
        points = [SparseVec.from_dense(indices, p) for p in probes]

        h, report = approximate_by_conjugate(U, g, points, config.epsilon)
        details = {
            "planes": float(len(report.snapped)),
            "translation_length": report.translation_length,
            "finite_rank": float(report.used_finite_rank),
        }
        if report.radius is not None:
            details["radius"] = report.radius
        return trial_record(
            index,
            {"kind": kind, "A": A.tolist(), "b": b.tolist(), "points": [p.tolist() for p in probes]},
            report.error,
            report.bound,
            details,
        )
