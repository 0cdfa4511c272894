"""
Tests for sparse vectors, the Lorentz form and Lorentz Gram-Schmidt
"""

import numpy as np
import pytest
from hypothesis import given, seed
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lorentz_lab.core.config import tolerance_scope
from lorentz_lab.core.errors import DegenerateSpan, InvariantViolation
from lorentz_lab.geometry.lorentz_core import (
    SparseVec,
    apply_J,
    fresh_index,
    lorentz_form,
    q_orthonormalize,
    quadratic_form,
    union_support,
)

DIMENSION = 6
coordinates = arrays(
    np.float64, (DIMENSION,), elements=st.floats(min_value=-1e3, max_value=1e3)
)


def test_sparse_vector_arithmetic():
    """Test addition, scaling and supports of sparse vectors"""
    x = SparseVec({1: 2.0, 4: -1.0})
    y = SparseVec({0: 1.0, 4: 1.0})

    assert (x + y).to_dict() == {0: 1.0, 1: 2.0}
    assert (x - x).nnz() == 0
    assert (2.0 * x).to_dict() == {1: 4.0, 4: -2.0}
    assert x.axpy(-1.0, x) == SparseVec.zero()
    assert x.dot(y) == -1.0
    assert x[3] == 0.0 and x[4] == -1.0
    assert union_support(x, y) == (0, 1, 4)
    assert fresh_index(x, y) == 5
    assert fresh_index(at_least=3) == 3


def test_tiny_entries_are_dropped():
    """Test that entries below the drop tolerance never enter the support"""
    v = SparseVec({1: 1e-17, 2: 1.0})
    assert v.support == (2,)
    assert (SparseVec.basis(3, 1.0) - SparseVec.basis(3, 1.0 - 1e-17)).nnz() == 0


def test_negative_index_rejected():
    """Test that indices must be non-negative"""
    with pytest.raises(InvariantViolation):
        SparseVec({-1: 1.0})
    with pytest.raises(InvariantViolation):
        SparseVec.from_dense([1, 1], [1.0, 2.0])


def test_apply_J_example():
    """Test J on (1, 2, 0, 5) at indices 0..3"""
    x = SparseVec.from_dense([0, 1, 2, 3], [1.0, 2.0, 0.0, 5.0])
    assert apply_J(x).to_dict() == {0: 1.0, 1: -2.0, 3: -5.0}
    assert apply_J(apply_J(x)) == x


def test_lorentz_form_examples():
    """Test the signature and a boosted pairing"""
    e0, e1 = SparseVec.basis(0), SparseVec.basis(1)
    x = SparseVec.from_dense([0, 1], [np.cosh(1.0), np.sinh(1.0)])

    assert lorentz_form(e0, e0) == 1.0
    assert lorentz_form(e1, e1) == -1.0
    assert lorentz_form(e0, e1) == 0.0
    assert lorentz_form(x, e0) == pytest.approx(1.5430806348, abs=1e-10)
    assert quadratic_form(x) == pytest.approx(1.0, abs=1e-12)


@seed(1)
@given(a=coordinates, b=coordinates)
def test_lorentz_form_symmetric_and_matches_dense(a, b):
    """Test symmetry of the form and agreement with x^T J y"""
    x = SparseVec.from_dense(range(DIMENSION), a)
    y = SparseVec.from_dense(range(DIMENSION), b)
    J = np.diag([1.0] + [-1.0] * (DIMENSION - 1))
    dense = float(a @ J @ b)

    assert lorentz_form(x, y) == lorentz_form(y, x)
    assert abs(lorentz_form(x, y) - dense) <= 1e-9 * (1.0 + np.abs(a) @ np.abs(b))


def test_q_orthonormalize_examples():
    """Test Gram-Schmidt from e0 with spacelike and isotropic inputs"""
    e0, e1 = SparseVec.basis(0), SparseVec.basis(1)

    frame = q_orthonormalize([e1], e0)
    assert frame.positive == e0
    assert frame.negatives == (e1,)

    frame = q_orthonormalize([e0 + 3.0 * e1], e0)
    assert frame.positive.allclose(e0)
    assert frame.negatives[0].allclose(e1, atol=1e-12)

    with pytest.raises(DegenerateSpan):
        q_orthonormalize([e0 + e1], e0)
    with pytest.raises(DegenerateSpan):
        q_orthonormalize([], e1)


def test_q_orthonormalize_dependent_vectors():
    """Test that dependent inputs raise unless skipped"""
    e0, e1, e2 = SparseVec.basis(0), SparseVec.basis(1), SparseVec.basis(2)
    vectors = [e1 + e2, 2.0 * e1 + 2.0 * e2]

    with pytest.raises(DegenerateSpan):
        q_orthonormalize(vectors, e0)
    frame = q_orthonormalize(vectors, e0, skip_dependent=True)
    assert len(frame) == 2


def test_q_orthonormalize_random_frames(rng):
    """Test the Gram matrix of frames built from random spacelike vectors"""
    pivot = SparseVec.from_dense(range(7), np.append(10.0, rng.normal(size=6)))
    vectors = [SparseVec.from_dense(range(1, 7), rng.normal(size=6)) for _ in range(4)]
    frame = q_orthonormalize(vectors, pivot)

    gram = np.array([[lorentz_form(u, v) for v in frame.vectors] for u in frame.vectors])
    assert np.allclose(gram, np.diag(frame.signs), atol=1e-10)


def test_tolerance_scope_restores_settings():
    """Test that a tolerance override is undone on exit"""
    from lorentz_lab.core.config import settings

    before = (settings.abs_tol, settings.rel_tol)
    with tolerance_scope(1e-3, None):
        assert settings.abs_tol == 1e-3
    assert (settings.abs_tol, settings.rel_tol) == before
