"""
Permutation - Neuron Index Bijections 🔀

A ``Permutation`` maps neuron ``i`` of a layer to position ``map[i]``. Its
matrix view ``P`` holds a 1 at ``(i, map[i])``, so ``w @ P`` moves column
``i`` of ``w`` to column ``map[i]``.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from .errors import PermutationError


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``{0, ..., size - 1}``."""

    mapping: Tuple[int, ...]

    def __post_init__(self) -> None:
        bad = [v for v in self.mapping if isinstance(v, bool) or not isinstance(v, (int, np.integer))]
        if bad:
            raise PermutationError(f"permutation entries must be integers, got {bad[0]!r}")
        values = tuple(int(v) for v in self.mapping)
        if not values:
            raise PermutationError("permutation must have at least one element")
        if sorted(values) != list(range(len(values))):
            raise PermutationError(f"not a bijection on 0..{len(values) - 1}: {list(values)}")
        object.__setattr__(self, "mapping", values)

    # ── constructors ────────────────────────────────────────────────────
    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> "Permutation":
        return cls(tuple(values))

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(tuple(range(size)))

    @classmethod
    def random(cls, size: int, rng: np.random.Generator) -> "Permutation":
        return cls(tuple(int(v) for v in rng.permutation(size)))

    @classmethod
    def swap(cls, size: int, i: int, j: int) -> "Permutation":
        values = list(range(size))
        values[i], values[j] = values[j], values[i]
        return cls(tuple(values))

    # ── views ───────────────────────────────────────────────────────────
    @property
    def size(self) -> int:
        return len(self.mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __getitem__(self, index: int) -> int:
        return self.mapping[index]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.mapping, dtype=np.int64)

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.mapping))

    def matrix_view(self) -> np.ndarray:
        return matrix_view(self)

    def inverse(self) -> "Permutation":
        return inverse(self)


def matrix_view(p: Permutation) -> np.ndarray:
    """Binary N×N matrix with a single 1 at ``(i, p(i))`` in every row."""
    matrix = np.zeros((p.size, p.size), dtype=np.float32)
    matrix[np.arange(p.size), p.as_array()] = 1.0
    return matrix


def inverse(p: Permutation) -> Permutation:
    """Return ``q`` such that ``q(p(i)) == i``."""
    return Permutation(tuple(int(v) for v in np.argsort(p.as_array(), kind="stable")))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``p ∘ q``, i.e. ``i -> p(q(i))``.

    Raises:
        PermutationError: If the sizes differ
    """
    if p.size != q.size:
        raise PermutationError(f"cannot compose sizes {p.size} and {q.size}")
    return Permutation(tuple(p.mapping[j] for j in q.mapping))


def check_size(p: Permutation, expected: int, what: Optional[str] = None) -> None:
    """Raise ``PermutationError`` unless ``p`` has ``expected`` elements."""
    if p.size != expected:
        label = f" for {what}" if what else ""
        raise PermutationError(f"permutation size {p.size} != {expected}{label}")
