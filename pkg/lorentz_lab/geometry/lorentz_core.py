"""
Sparse coordinates over the countable basis e0, e1, ... and the Lorentz form

Every vector in the library is a ``SparseVec``: a finitely supported map from
non-negative indices to reals.  Index 0 is the time axis, indices >= 1 span the
negative-definite part of the form

    (x, y) = x0 y0 - sum_{i >= 1} xi yi = <x, J y>.
"""

from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from lorentz_lab.core.config import settings, tolerance
from lorentz_lab.core.errors import DegenerateSpan, InvariantViolation


class SparseVec:
    """Immutable finitely supported real vector.

    Stored as a sorted index array and a matching value array.  Entries with
    magnitude below ``settings.drop_tol`` are dropped on construction so that
    supports stay finite under repeated arithmetic.
    """

    __slots__ = ("_idx", "_val")

    def __init__(self, entries: Optional[Mapping[int, float]] = None):
        entries = entries or {}
        idx = np.fromiter((int(i) for i in entries.keys()), dtype=np.int64, count=len(entries))
        val = np.fromiter((float(v) for v in entries.values()), dtype=np.float64, count=len(entries))
        if idx.size and idx.min() < 0:
            raise InvariantViolation(f"negative index in {sorted(entries)}")
        order = np.argsort(idx, kind="stable")
        self._set(idx[order], val[order])

    def _set(self, idx: np.ndarray, val: np.ndarray):
        keep = np.abs(val) >= settings.drop_tol
        idx = np.ascontiguousarray(idx[keep], dtype=np.int64)
        val = np.ascontiguousarray(val[keep], dtype=np.float64)
        idx.flags.writeable = False
        val.flags.writeable = False
        self._idx = idx
        self._val = val

    @classmethod
    def _from_sorted(cls, idx: np.ndarray, val: np.ndarray) -> "SparseVec":
        vec = cls.__new__(cls)
        vec._set(np.asarray(idx), np.asarray(val, dtype=np.float64))
        return vec

    @classmethod
    def zero(cls) -> "SparseVec":
        return cls._from_sorted(np.empty(0, dtype=np.int64), np.empty(0))

    @classmethod
    def basis(cls, index: int, scale: float = 1.0) -> "SparseVec":
        """The vector scale * e_index"""
        return cls({index: scale})

    @classmethod
    def from_dense(cls, indices: Sequence[int], values: Sequence[float]) -> "SparseVec":
        """Scatter dense values onto the given distinct indices"""
        idx = np.asarray(indices, dtype=np.int64)
        val = np.asarray(values, dtype=np.float64)
        if idx.shape != val.shape:
            raise InvariantViolation(f"{idx.size} indices for {val.size} values")
        if idx.size and (idx.min() < 0 or np.unique(idx).size != idx.size):
            raise InvariantViolation("indices must be distinct and non-negative")
        order = np.argsort(idx, kind="stable")
        return cls._from_sorted(idx[order], val[order])

    # Accessors

    @property
    def indices(self) -> np.ndarray:
        return self._idx

    @property
    def values(self) -> np.ndarray:
        return self._val

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in self._idx)

    @property
    def max_index(self) -> int:
        return int(self._idx[-1]) if self._idx.size else -1

    def nnz(self) -> int:
        return int(self._idx.size)

    def __getitem__(self, index: int) -> float:
        pos = int(np.searchsorted(self._idx, index))
        if pos < self._idx.size and self._idx[pos] == index:
            return float(self._val[pos])
        return 0.0

    def dense(self, indices: Sequence[int]) -> np.ndarray:
        """Gather the coordinates at the given indices (zero where absent)"""
        indices = np.asarray(indices, dtype=np.int64)
        out = np.zeros(indices.shape, dtype=np.float64)
        if not self._idx.size or not indices.size:
            return out
        pos = np.searchsorted(self._idx, indices)
        pos_clipped = np.minimum(pos, self._idx.size - 1)
        hit = self._idx[pos_clipped] == indices
        out[hit] = self._val[pos_clipped[hit]]
        return out

    def items(self) -> List[Tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self._idx, self._val)]

    def to_dict(self) -> Dict[int, float]:
        return dict(self.items())

    def head(self) -> float:
        """Coordinate on the time axis e0"""
        return self[0]

    def tail(self) -> "SparseVec":
        """The vector with its e0 coordinate removed"""
        keep = self._idx > 0
        return SparseVec._from_sorted(self._idx[keep], self._val[keep])

    # Arithmetic

    def _combine(self, other: "SparseVec", a: float, b: float) -> "SparseVec":
        idx = np.union1d(self._idx, other._idx)
        return SparseVec._from_sorted(idx, a * self.dense(idx) + b * other.dense(idx))

    def __add__(self, other: "SparseVec") -> "SparseVec":
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other: "SparseVec") -> "SparseVec":
        return self._combine(other, 1.0, -1.0)

    def __neg__(self) -> "SparseVec":
        return SparseVec._from_sorted(self._idx, -self._val)

    def __mul__(self, scalar: float) -> "SparseVec":
        return SparseVec._from_sorted(self._idx, float(scalar) * self._val)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "SparseVec":
        return SparseVec._from_sorted(self._idx, self._val / float(scalar))

    def axpy(self, alpha: float, other: "SparseVec") -> "SparseVec":
        """self + alpha * other"""
        return self._combine(other, 1.0, alpha)

    def dot(self, other: "SparseVec") -> float:
        """Euclidean inner product"""
        _, ia, ib = np.intersect1d(self._idx, other._idx, assume_unique=True, return_indices=True)
        return float(np.dot(self._val[ia], other._val[ib]))

    def norm(self) -> float:
        return float(np.linalg.norm(self._val))

    def allclose(self, other: "SparseVec", atol: Optional[float] = None) -> bool:
        atol = tolerance(max(self.norm(), other.norm())) if atol is None else atol
        idx = np.union1d(self._idx, other._idx)
        return bool(np.all(np.abs(self.dense(idx) - other.dense(idx)) <= atol))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVec):
            return NotImplemented
        return np.array_equal(self._idx, other._idx) and np.array_equal(self._val, other._val)

    def __hash__(self) -> int:
        return hash((self._idx.tobytes(), self._val.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {v:.12g}" for i, v in self.items())
        return f"SparseVec({{{body}}})"


def union_support(*vectors: SparseVec) -> Tuple[int, ...]:
    """Sorted union of the supports of the given vectors"""
    if not vectors:
        return ()
    idx = np.unique(np.concatenate([v.indices for v in vectors]))
    return tuple(int(i) for i in idx)


def merge_indices(*index_sets: Iterable[int]) -> Tuple[int, ...]:
    """Sorted union of index collections"""
    merged = set()
    for indices in index_sets:
        merged.update(int(i) for i in indices)
    return tuple(sorted(merged))


def fresh_index(*vectors: SparseVec, at_least: int = 1) -> int:
    """First index beyond every support, never below ``at_least``"""
    top = max((v.max_index for v in vectors), default=-1)
    return max(top + 1, at_least)


def apply_J(x: SparseVec) -> SparseVec:
    """Negate every coordinate except the time axis"""
    sign = np.where(x.indices == 0, 1.0, -1.0)
    return SparseVec._from_sorted(x.indices, sign * x.values)


def lorentz_form(x: SparseVec, y: SparseVec) -> float:
    """(x, y) = x0 y0 - sum_{i>=1} xi yi"""
    common, ia, ib = np.intersect1d(x.indices, y.indices, assume_unique=True, return_indices=True)
    prod = x.values[ia] * y.values[ib]
    if common.size and common[0] == 0:
        return float(prod[0] - prod[1:].sum())
    return float(-prod.sum())


def quadratic_form(x: SparseVec) -> float:
    """Q(x) = (x, x)"""
    return lorentz_form(x, x)


def j_matrix(indices: Sequence[int]) -> np.ndarray:
    """Restriction of J to an index set, as a diagonal matrix"""
    return np.diag(np.where(np.asarray(indices) == 0, 1.0, -1.0))


class LorentzFrame(BaseModel):
    """One Q-positive unit vector followed by Q-negative unit vectors, pairwise orthogonal"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    positive: SparseVec
    negatives: Tuple[SparseVec, ...] = ()

    @model_validator(mode="after")
    def check_orthonormal(self) -> "LorentzFrame":
        vectors = self.vectors
        signs = self.signs
        for i, u in enumerate(vectors):
            for j in range(i, len(vectors)):
                v = vectors[j]
                expected = signs[i] if i == j else 0.0
                value = lorentz_form(u, v)
                if abs(value - expected) > tolerance(u.norm() * v.norm()):
                    raise InvariantViolation(
                        f"frame Gram entry ({i}, {j}) is {value!r}, expected {expected}"
                    )
        return self

    @property
    def vectors(self) -> List[SparseVec]:
        return [self.positive, *self.negatives]

    @property
    def signs(self) -> List[float]:
        return [1.0] + [-1.0] * len(self.negatives)

    @property
    def support(self) -> Tuple[int, ...]:
        return union_support(*self.vectors)

    def __len__(self) -> int:
        return 1 + len(self.negatives)


def q_residual(v: SparseVec, basis: List[SparseVec], signs: List[float]) -> SparseVec:
    """Remove the components of v along a Q-orthonormal basis, reorthogonalizing once if needed"""
    start = v.norm()
    w = v
    for f, s in zip(basis, signs):
        w = w.axpy(-s * lorentz_form(w, f), f)
    if w.norm() < 0.7 * start:
        for f, s in zip(basis, signs):
            w = w.axpy(-s * lorentz_form(w, f), f)
    return w


def q_orthonormalize(
    vectors: Iterable[SparseVec],
    pivot: SparseVec,
    skip_dependent: bool = False,
) -> LorentzFrame:
    """Modified Gram-Schmidt for the Lorentz form, starting from a Q-positive pivot.

    The pivot becomes the positive vector of the frame; the remaining vectors
    are orthogonalized in order and normalized to Q = -1.  With
    ``skip_dependent`` vectors already in the span are silently dropped,
    otherwise any residual with |Q| below tolerance raises ``DegenerateSpan``.
    An isotropic input vector always raises.
    """
    q_pivot = quadratic_form(pivot)
    if q_pivot <= tolerance(pivot.norm() ** 2):
        raise DegenerateSpan(f"pivot is not Q-positive (Q = {q_pivot:.3e})")

    basis: List[SparseVec] = [pivot / np.sqrt(q_pivot)]
    signs: List[float] = [1.0]
    for v in vectors:
        scale = v.norm() ** 2
        if scale == 0.0:
            if skip_dependent:
                continue
            raise DegenerateSpan("zero vector in span")
        if abs(quadratic_form(v)) <= tolerance(scale):
            raise DegenerateSpan(f"isotropic input vector {v!r}")
        w = q_residual(v, basis, signs)
        q = quadratic_form(w)
        if abs(q) <= tolerance(scale):
            if skip_dependent:
                continue
            raise DegenerateSpan(f"dependent or isotropic residual (Q = {q:.3e})")
        if q > 0:
            raise DegenerateSpan("second Q-positive direction; span is not of signature (1, k)")
        basis.append(w / np.sqrt(-q))
        signs.append(-1.0)

    return LorentzFrame(positive=basis[0], negatives=tuple(basis[1:]))
