"""
Lattice Service Module containing grid construction, nearest-neighbour quantization,
continuous membership in a lattice set and the lift of lattice values to states.
"""

import numpy as np

from src.pcis.core.exceptions import InvalidArgumentError
from src.pcis.core.schema.features import StateBox
from src.pcis.core.schema.lattice import LatticeGrid, LatticeMask, SafetyValueTable


class LatticeService:
    """
    Lattice Service used for the finite abstraction of the safe box.

    A continuous state x belongs to a mask iff x lies in the box and its quantized
    lattice point is set in the mask. Every consumer (lift, the shield, violation
    accounting) goes through membership() so the reading stays consistent.
    """

    @staticmethod
    def build_grid(box: StateBox, points_per_axis: tuple[int, ...]) -> LatticeGrid:
        """
        Build a Cartesian grid with both endpoints of every axis included.
        :param box: The safe box.
        :param points_per_axis: Lattice points per axis, at least 2 each.
        :return: The grid, with delta_x = max spacing / 2.
        :raises InvalidArgumentError: If an axis has fewer than 2 points.
        """
        points_per_axis = tuple(int(p) for p in points_per_axis)
        if len(points_per_axis) != box.dimension:
            raise InvalidArgumentError(
                f"{len(points_per_axis)} axis sizes given for a {box.dimension}-dimensional box."
            )
        if any(points < 2 for points in points_per_axis):
            raise InvalidArgumentError(
                f"Every axis needs at least 2 points, got {points_per_axis}."
            )

        spacing = box.widths / (np.asarray(points_per_axis, dtype=float) - 1.0)
        spacing.setflags(write=False)
        return LatticeGrid(
            box=box,
            points_per_axis=points_per_axis,
            spacing=spacing,
            delta_x=float(spacing.max() / 2.0),
        )

    @classmethod
    def tabular_grid(cls, state_count: int) -> LatticeGrid:
        """
        One-dimensional lattice {0, 1, .., S - 1} representing a finite state space. The
        unsafe sink uses coordinate S, which lies outside the box.
        :param state_count: S >= 2.
        :return: The grid with unit spacing.
        """
        if state_count < 2:
            raise InvalidArgumentError(
                f"A tabular lattice needs at least 2 states, got {state_count}."
            )
        box = StateBox(lower=(0.0,), upper=(float(state_count - 1),))
        return cls.build_grid(box, (state_count,))

    @staticmethod
    def quantize(grid: LatticeGrid, states: np.ndarray) -> np.ndarray | int:
        """
        Nearest lattice point in the infinity norm. Exact midpoints go to the lower index
        on that axis. States are clamped to the box first.
        :param grid: The lattice.
        :param states: (n,) state or (T, n) states.
        :return: Flat row-major lattice index, or (T,) indices.
        """
        states = np.asarray(states, dtype=float)
        single = states.ndim == 1
        states = states.reshape(-1, grid.dimension)

        offsets = (grid.box.clamp(states) - grid.box.lower_array) / grid.spacing
        axis_indices = np.ceil(offsets - 0.5).astype(np.int64)
        axis_indices = np.clip(axis_indices, 0, np.asarray(grid.points_per_axis) - 1)
        flat = np.ravel_multi_index(tuple(axis_indices.T), grid.points_per_axis)
        return int(flat[0]) if single else flat

    @classmethod
    def membership(cls, mask: LatticeMask, states: np.ndarray) -> np.ndarray | bool:
        """
        Continuous membership: inside the box AND the quantized point is in the mask.
        :param mask: Lattice set.
        :param states: (n,) state or (T, n) states.
        :return: bool or (T,) bool array.
        """
        states = np.asarray(states, dtype=float)
        single = states.ndim == 1
        states = states.reshape(-1, mask.grid.dimension)
        inside = mask.grid.box.contains(states)
        members = inside & mask.bits[np.atleast_1d(cls.quantize(mask.grid, states))]
        return bool(members[0]) if single else members

    @classmethod
    def lift(
        cls, table: SafetyValueTable, stage: int, omega: LatticeMask, states: np.ndarray
    ) -> np.ndarray | float:
        """
        Evaluate a lattice value table at continuous states: the value at q(x) when x is
        in omega, 0 otherwise.
        :param table: Stage-indexed lattice values.
        :param stage: j in {0..N}.
        :param omega: Reference set.
        :param states: (n,) state or (T, n) states.
        :return: Scalar or (T,) values in [0, 1].
        """
        if not 0 <= stage <= table.horizon:
            raise InvalidArgumentError(f"Stage {stage} outside [0, {table.horizon}].")
        return cls.lift_values(table.values[stage], omega, states)

    @classmethod
    def lift_values(
        cls, values: np.ndarray, omega: LatticeMask, states: np.ndarray
    ) -> np.ndarray | float:
        """
        Same as lift() for a single stage row of lattice values.
        """
        states = np.asarray(states, dtype=float)
        single = states.ndim == 1
        states = states.reshape(-1, omega.grid.dimension)
        if states.shape[0] == 0:
            return np.zeros(0)

        lattice_values = values[np.atleast_1d(cls.quantize(omega.grid, states))]
        lifted = np.where(cls.membership(omega, states), lattice_values, 0.0)
        return float(lifted[0]) if single else lifted

    @staticmethod
    def box_mask(
        grid: LatticeGrid, lower: tuple[float, ...], upper: tuple[float, ...]
    ) -> LatticeMask:
        """
        Lattice points inside the closed box [lower, upper].
        """
        tolerance = 1e-12 * np.maximum(1.0, np.abs(grid.box.widths))
        points = grid.points
        inside = np.all(
            (points >= np.asarray(lower) - tolerance) & (points <= np.asarray(upper) + tolerance),
            axis=1,
        )
        return LatticeMask(grid=grid, bits=inside)

    @staticmethod
    def coordinates(grid: LatticeGrid, index: int) -> np.ndarray:
        """
        State coordinates of a flat lattice index.
        """
        if not 0 <= index < grid.size:
            raise InvalidArgumentError(f"Lattice index {index} outside [0, {grid.size}).")
        return grid.points[index]
