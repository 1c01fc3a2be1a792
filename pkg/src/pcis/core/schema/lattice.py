"""
Module containing the lattice abstraction types: the grid over the safe box,
membership masks over its points and stage-indexed value tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from src.pcis.core.exceptions import GridMismatchError
from src.pcis.core.schema.features import StateBox


@dataclass(frozen=True, eq=False)
class LatticeGrid:
    """
    Cartesian grid over a state box, endpoints included.

    Attributes:
        box: The box being discretized.
        points_per_axis: Number of lattice points per axis.
        spacing: Grid pitch per axis in state units.
        delta_x: Covering radius in the infinity norm, max(spacing) / 2.
    """

    box: StateBox
    points_per_axis: tuple[int, ...]
    spacing: np.ndarray
    delta_x: float

    @property
    def dimension(self) -> int:
        return len(self.points_per_axis)

    @property
    def size(self) -> int:
        return int(np.prod(self.points_per_axis))

    @cached_property
    def points(self) -> np.ndarray:
        """(size, n) lattice coordinates in row-major axis order."""
        axes = [
            self.box.lower[i] + self.spacing[i] * np.arange(count)
            for i, count in enumerate(self.points_per_axis)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def same_as(self, other: LatticeGrid) -> bool:
        """
        Structural equality of two grids.
        :param other: The grid to compare against.
        :return: True if box and resolution match.
        """
        return self.box == other.box and self.points_per_axis == other.points_per_axis


@dataclass(frozen=True, eq=False)
class LatticeMask:
    """
    Boolean membership over the lattice points of a grid, the finite
    representation of Omega and of the accepted shield set.
    """

    grid: LatticeGrid
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool).reshape(-1)
        if bits.shape[0] != self.grid.size:
            raise GridMismatchError(
                f"Mask has {bits.shape[0]} bits but the grid has {self.grid.size} points."
            )
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def full(cls, grid: LatticeGrid) -> LatticeMask:
        return cls(grid=grid, bits=np.ones(grid.size, dtype=bool))

    @classmethod
    def empty(cls, grid: LatticeGrid) -> LatticeMask:
        return cls(grid=grid, bits=np.zeros(grid.size, dtype=bool))

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def is_empty(self) -> bool:
        return not self.bits.any()

    def equals(self, other: LatticeMask) -> bool:
        """Exact bit equality on the same grid."""
        self._check_grid(other)
        return bool(np.array_equal(self.bits, other.bits))

    def is_subset_of(self, other: LatticeMask) -> bool:
        """True if every member of self is a member of other."""
        self._check_grid(other)
        return not np.any(self.bits & ~other.bits)

    def intersection(self, other: LatticeMask) -> LatticeMask:
        self._check_grid(other)
        return LatticeMask(grid=self.grid, bits=self.bits & other.bits)

    def _check_grid(self, other: LatticeMask) -> None:
        if not self.grid.same_as(other.grid):
            raise GridMismatchError("Masks were built on different lattices.")


@dataclass(frozen=True, eq=False)
class SafetyValueTable:
    """
    Lattice values of the conservative recursion.

    Attributes:
        grid: The lattice the values are indexed by.
        values: (horizon + 1, size) array, row j holds stage j, all entries in [0, 1].
    """

    grid: LatticeGrid
    values: np.ndarray

    @property
    def horizon(self) -> int:
        return self.values.shape[0] - 1
