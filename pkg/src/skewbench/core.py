"""Shared data model: datasets, class summaries, distances, exact k-NN, seeding."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

_MASK64 = (1 << 64) - 1


class SkewbenchError(ValueError):
    """Invalid data, violated precondition, or infeasible operation."""


class ExampleKind(IntEnum):
    """Role of a point with respect to the class structure."""

    SAFE = 0
    BORDERLINE = 1
    RARE = 2
    MAJORITY = 3

    @property
    def tag(self) -> str:
        return self.name.lower()

    @classmethod
    def from_tag(cls, tag: str) -> "ExampleKind":
        try:
            return cls[tag.strip().upper()]
        except KeyError:
            raise SkewbenchError(f"unknown kind tag {tag!r}") from None


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n x d feature matrix with integer class labels and optional kind tags.

    Immutable after construction; the backing arrays are marked read-only so
    instances can be shared freely across workers.
    """

    points: np.ndarray
    labels: np.ndarray
    kinds: np.ndarray | None = None

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] < 1:
            raise SkewbenchError("points must be a 2-D matrix with at least one feature")
        if not np.all(np.isfinite(points)):
            raise SkewbenchError("points must be finite (no NaN/Inf)")
        labels = np.array(self.labels, dtype=np.int64)
        if labels.ndim != 1 or len(labels) != len(points):
            raise SkewbenchError("labels must be a 1-D array matching the point count")
        if len(labels) and labels.min() < 0:
            raise SkewbenchError("labels must be nonnegative integers")
        object.__setattr__(self, "points", _frozen_array(points, np.float64))
        object.__setattr__(self, "labels", _frozen_array(labels, np.int64))
        if self.kinds is not None:
            kinds = np.array(self.kinds, dtype=np.uint8)
            if kinds.shape != labels.shape:
                raise SkewbenchError("kinds must match the point count")
            if len(kinds) and kinds.max() > max(ExampleKind):
                raise SkewbenchError("kinds contain values outside the ExampleKind range")
            object.__setattr__(self, "kinds", _frozen_array(kinds, np.uint8))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def subset(self, indices) -> "Dataset":
        """Dataset restricted to the given row indices, order preserved."""
        idx = np.asarray(indices)
        kinds = self.kinds[idx] if self.kinds is not None else None
        return Dataset(self.points[idx], self.labels[idx], kinds)

    def with_kinds(self, kinds) -> "Dataset":
        return Dataset(self.points, self.labels, kinds)


@dataclass(frozen=True)
class ClassSummary:
    """Per-class counts plus the derived minority/majority roles."""

    counts: dict[int, int]
    minority_label: int
    majority_label: int
    imbalance_ratio: float


def summarize(ds: Dataset) -> ClassSummary:
    """Count classes and derive minority/majority roles from the counts.

    The minority is the class with the smallest count; ties break toward the
    lowest label value. Roles are always recomputed, never trusted from any
    earlier stage, since resampling can change which class is smaller.
    """
    values, counts = np.unique(ds.labels, return_counts=True)
    if len(values) < 2:
        raise SkewbenchError("degenerate class structure: at least two classes required")
    table = {int(v): int(c) for v, c in zip(values, counts)}
    minority = min(table, key=lambda lab: (table[lab], lab))
    rest = [lab for lab in table if lab != minority]
    majority = max(rest, key=lambda lab: (table[lab], -lab))
    return ClassSummary(
        counts=table,
        minority_label=minority,
        majority_label=majority,
        imbalance_ratio=table[majority] / table[minority],
    )


def euclidean(a, b) -> float:
    """L2 distance between two equal-dimension points."""
    pa = np.asarray(a, dtype=np.float64)
    pb = np.asarray(b, dtype=np.float64)
    if pa.shape != pb.shape or pa.ndim != 1:
        raise SkewbenchError(f"dimension mismatch: {pa.shape} vs {pb.shape}")
    if not (np.all(np.isfinite(pa)) and np.all(np.isfinite(pb))):
        raise SkewbenchError("points must be finite")
    return float(np.sqrt(np.sum((pa - pb) ** 2)))


def squared_distances(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Exact squared L2 distance from every row of `points` to `query`.

    Computed per pair as sum((a-b)^2); the expanded a^2+b^2-2ab form is
    avoided because its rounding can reorder genuinely tied distances.
    """
    return np.sum((points - query) ** 2, axis=1)


def knn_indices(train: Dataset, query, k: int, exclude: int | None = None) -> np.ndarray:
    """Indices of the k nearest training points, ascending by distance.

    Tied distances break toward the lower point index. `exclude` removes one
    training index from consideration (self-exclusion for leave-one-out uses).
    """
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (train.d,):
        raise SkewbenchError(f"query dimension {q.shape} does not match data ({train.d},)")
    usable = train.n - (1 if exclude is not None else 0)
    if k < 1 or k > usable:
        raise SkewbenchError(f"k={k} outside valid range 1..{usable}")
    sq = squared_distances(train.points, q)
    if exclude is not None:
        sq = sq.copy()
        sq[exclude] = np.inf
    order = np.argsort(sq, kind="stable")
    return order[:k]


def _mix64(z: int) -> int:
    # SplitMix64 finalizer; constants documented in the README seeding section.
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(parent: int, purpose: str, index: int = 0) -> int:
    """Derive a child seed from (parent, purpose, index).

    Pure integer arithmetic over SplitMix64 mixing, so identical inputs give
    identical child seeds on every platform.
    """
    h = _mix64(parent & _MASK64)
    for byte in purpose.encode("utf-8"):
        h = _mix64(h ^ byte)
    return _mix64(h ^ (index & _MASK64))


@dataclass(frozen=True)
class RngSeed:
    """A 64-bit seed with a deterministic child-stream derivation rule."""

    value: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", int(self.value) & _MASK64)

    def child(self, purpose: str, index: int = 0) -> "RngSeed":
        return RngSeed(derive_seed(self.value, purpose, index))

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.value)


def as_seed(seed: "RngSeed | int") -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(seed)
