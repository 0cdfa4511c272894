"""
Cartan and symmetry decompositions of random isometries
"""

from functools import reduce

import numpy as np

from lorentz_lab.geometry.isometry import (
    HypIsometry,
    apply,
    cartan_decompose,
    compose,
    symmetry_decompose,
)
from lorentz_lab.geometry.lorentz_core import SparseVec, merge_indices
from lorentz_lab.geometry.sampling import random_isometry
from lorentz_lab.models.experiment import ExperimentConfig, ExperimentName, TrialRecord
from lorentz_lab.services.experiment_service import Experiment, trial_record

DECOMPOSITION_BOUND = 1e-8
MAX_FACTORS = 5


def block_gap(g: HypIsometry, h: HypIsometry) -> float:
    active = merge_indices(g.active, h.active)
    return float(np.max(np.abs(g.expanded(active) - h.expanded(active))))


def cartan_defects(g: HypIsometry) -> dict:
    p, k = cartan_decompose(g)
    origin = SparseVec.basis(0)
    eigs = np.linalg.eigvalsh(p.block)
    return {
        "cartan_product": block_gap(compose(p, k), g),
        "cartan_k_fixes_origin": (apply(k, origin) - origin).norm(),
        "cartan_p_symmetric": float(np.max(np.abs(p.block - p.block.T))),
        "cartan_p_positive": 0.0 if eigs.min() > 0 else 1.0,
    }


def symmetry_defects(g: HypIsometry) -> dict:
    factors = symmetry_decompose(g)
    product = reduce(compose, factors)
    involution = max(float(np.max(np.abs(f.block @ f.block - np.eye(f.size)))) for f in factors)
    return {
        "symmetry_product": block_gap(product, g),
        "symmetry_involution": involution,
        "symmetry_factor_excess": float(max(0, len(factors) - MAX_FACTORS)),
        "symmetry_factors": float(len(factors)),
    }


class DecompositionExperiment(Experiment):
    """g = p k and g = product of symmetries, checked on random isometries"""

    name = ExperimentName.DECOMPOSITIONS
    min_dims = 2

    def run_trial(
        self, config: ExperimentConfig, context, index: int, rng: np.random.Generator
    ) -> TrialRecord:
        g = random_isometry(rng, config.dims)
        details = {**cartan_defects(g), **symmetry_defects(g)}
        defect = max(value for key, value in details.items() if key != "symmetry_factors")
        return trial_record(index, {"g": g.block.tolist()}, defect, DECOMPOSITION_BOUND, details)
