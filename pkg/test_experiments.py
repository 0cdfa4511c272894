"""
Tests for the experiment runner and the six experiments
"""

import asyncio

import numpy as np
import pytest

from lorentz_lab.core.errors import (
    ExperimentConfigError,
    NonPositiveLength,
    Unattainable,
)
from lorentz_lab.geometry.lorentz_core import SparseVec
from lorentz_lab.models.experiment import ExperimentConfig, ExperimentName
from lorentz_lab.services.compactification_experiments import escaping_sequence, hilbert_level_gap
from lorentz_lab.services.conjugacy_experiments import (
    collinear_orbit,
    horosphere_spread,
    neutral_search,
    sphere_spread,
)
from lorentz_lab.services.experiment_service import (
    Experiment,
    ExperimentService,
    build_experiment_service,
    report_digest,
    trial_record,
)


def run(name: str, **config):
    service = build_experiment_service()
    return asyncio.run(service.run(name, ExperimentConfig(**config)))


class FailingExperiment(Experiment):
    """Experiment whose second trial raises a library error"""

    name = ExperimentName.STEINHAUS

    def run_trial(self, config, context, index, rng):
        if index == 1:
            raise Unattainable("distance out of reach")
        return trial_record(index, {"trial": index}, 0.0, 1.0)


def test_registry_lists_every_experiment():
    """Test that all six experiments are registered"""
    service = build_experiment_service()
    assert sorted(service.names()) == sorted(name.value for name in ExperimentName)
    with pytest.raises(ExperimentConfigError):
        service.get("no-such-experiment")


def test_config_rejects_unknown_keys():
    """Test strict configuration parsing"""
    with pytest.raises(ValueError):
        ExperimentConfig.model_validate({"seed": 1, "colour": "blue"})
    with pytest.raises(ValueError):
        ExperimentConfig.model_validate({"block_dims": 3})
    config = ExperimentConfig.model_validate({"tolerances": {"abs": 1e-8}})
    assert config.tolerances.abs_tol == 1e-8


def test_failed_trials_are_recorded():
    """Test that a library error inside a trial fails only that trial"""
    service = ExperimentService()
    service.register(FailingExperiment())
    report = asyncio.run(service.run("steinhaus", ExperimentConfig(trials=3)))

    failed = report.trials[1]
    assert failed.reason == "Unattainable"
    assert failed.defect is None and not failed.passed
    assert report.trials[0].passed and report.trials[2].passed
    assert not report.aggregate.passed


def test_collinear_orbit_and_spreads():
    """Test the transvection orbit and the neutral level-set spreads"""
    points = collinear_orbit(1.0)
    assert np.allclose(points[:, 0], [-np.tanh(1.0), 0.0, np.tanh(1.0)])
    with pytest.raises(NonPositiveLength):
        collinear_orbit(0.0)

    # the origin is equidistant from the two outer points only
    assert sphere_spread(np.zeros((1, 2)), points[[0, 2]])[0] == pytest.approx(0.0, abs=1e-12)
    assert sphere_spread(np.zeros((1, 2)), points)[0] > 0.1
    assert horosphere_spread(np.array([np.pi / 2]), points[[0, 2]])[0] == pytest.approx(0.0, abs=1e-12)


def test_neutral_search_certificate():
    """Test a positive certificate near log(cosh t) / 2 for t = 1"""
    search = neutral_search(collinear_orbit(1.0), 0.02)
    expected = np.log(np.cosh(1.0)) / 2.0
    assert search.certificate > 0.01
    assert search.refined <= search.coarse
    assert search.refined == pytest.approx(expected, abs=0.02)


def test_no_dense_conjugacy_experiment():
    """Test certified positive lower bounds stable under refinement"""
    report = run("no-dense-conjugacy", seed=7, dims=2, trials=2, t=1.0, resolutions=[0.02, 0.01])
    assert report.aggregate.passed
    for record in report.trials:
        assert record.details["certificate@0.01"] > 0.01
        assert record.bound == pytest.approx(0.01)


def test_no_dense_conjugacy_small_translation_fails():
    """Test that a tiny translation length cannot be certified"""
    report = run("no-dense-conjugacy", dims=2, trials=1, t=0.01, resolutions=[0.02, 0.01])
    assert not report.aggregate.passed


def test_no_dense_conjugacy_rejects_non_positive_length():
    """Test the t > 0 precondition"""
    with pytest.raises(NonPositiveLength):
        run("no-dense-conjugacy", t=0.0)


def test_dense_conjugacy_experiment():
    """Test elliptic, translation and mixed targets at eps = 0.05 with three probes"""
    report = run("dense-conjugacy", seed=3, dims=4, trials=3, epsilon=0.05, k=3)
    assert report.aggregate.passed
    bound = np.sqrt(5.0) * 0.05
    assert all(record.defect < bound for record in report.trials)
    assert report.trials[0].defect < 0.05
    assert report.trials[1].details["translation_length"] == pytest.approx(1.0, abs=1e-12)


def test_steinhaus_experiment():
    """Test the fix-defect and the excluded collinear control"""
    report = run("steinhaus", seed=11, dims=3, trials=4)
    assert report.aggregate.passed
    assert report.aggregate.excluded == 1
    assert report.trials[0].defect < 1e-10
    control = report.trials[-1]
    assert control.excluded and control.reason == "CollinearCenter"
    assert all(r.defect < 1e-8 for r in report.trials if not r.excluded)


@pytest.mark.slow
def test_full_size_runs():
    """Test the conjugacy and Steinhaus experiments at full trial counts and fine resolutions"""
    report = run("dense-conjugacy", dims=12, trials=100, epsilon=0.05, k=3)
    assert report.aggregate.passed
    assert max(record.defect for record in report.trials) < np.sqrt(5.0) * 0.05

    report = run("steinhaus", trials=500)
    assert report.aggregate.passed
    assert report.aggregate.excluded == 1
    assert all(r.defect < 1e-8 for r in report.trials if not r.excluded)

    report = run("no-dense-conjugacy", resolutions=[0.002, 0.001])
    assert report.aggregate.passed
    assert all(record.details["certificate@0.001"] > 0.001 for record in report.trials)


def test_steinhaus_needs_three_dimensions():
    """Test the dims precondition for non-collinear triples"""
    with pytest.raises(ExperimentConfigError):
        run("steinhaus", dims=2)


def test_compactification_experiment():
    """Test frustum actions and the r-dependence contrast between the two groups"""
    report = run("compactification", seed=5, dims=3, trials=3)
    identity_trial = report.trials[0].details
    for key in ("pushforward", "group_law", "r_independence", "hilbert_group_law"):
        assert identity_trial[key] < 1e-12
    for record in report.trials:
        assert record.details["r_independence"] < 1e-9
        assert record.details["group_law"] < 1e-8
        assert record.details["hilbert_group_law"] < 1e-8
        assert record.details["sheet_level"] == 0.0
        assert record.details["hilbert_level_gap"] > 1e-6


def test_hilbert_level_gap_witness():
    """Test that tau_e1 separates the levels 0 and 0.5 at x = 0"""
    expected = 1.0 / np.sqrt(2.0) - np.sqrt(3.0 / 7.0)
    assert hilbert_level_gap(SparseVec.basis(1), SparseVec.zero()) == pytest.approx(expected, abs=1e-12)
    report = run("compactification", seed=5, dims=3, trials=1)
    assert report.trials[0].details["hilbert_level_gap"] == pytest.approx(expected, abs=1e-12)


def test_decomposition_experiment():
    """Test Cartan and symmetry decompositions on random isometries"""
    report = run("decompositions", seed=2, dims=5, trials=3)
    assert report.aggregate.passed
    for record in report.trials:
        assert record.details["symmetry_factors"] <= 5


def test_weak_continuity_experiment():
    """Test the frustum action along g_n -> g and weakly convergent x_n"""
    report = run("weak-continuity", seed=9, dims=3, trials=2)
    assert report.aggregate.passed
    assert all(record.details["first_defect"] > 0 for record in report.trials)


def test_escaping_sequence_is_weakly_null_offset():
    """Test that the escaping sequence stays at fixed distance from its weak limit"""
    x = SparseVec({1: 0.1})
    sequence = escaping_sequence(x, 3, 5)
    assert [v.max_index for v in sequence] == [4, 5, 6, 7, 8]
    assert all((v - x).norm() == pytest.approx(0.5) for v in sequence)


def test_reports_are_deterministic():
    """Test that identical configurations give identical digests"""
    first = run("steinhaus", seed=21, dims=3, trials=3)
    second = run("steinhaus", seed=21, dims=3, trials=3)
    assert first.digest == second.digest
    assert first.config_digest == second.config_digest
    assert report_digest(first) == first.digest

    other = run("steinhaus", seed=22, dims=3, trials=3)
    assert other.digest != first.digest
