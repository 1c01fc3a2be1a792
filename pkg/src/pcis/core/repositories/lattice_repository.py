"""
Lattice Repository containing masks, value tables, operator results and
certification verdicts.
"""

from pathlib import Path

import numpy as np

from src.pcis.constants import CsvSchema
from src.pcis.core.exceptions import DatasetParseError, GridMismatchError
from src.pcis.core.repositories.base_repository import CsvTable, Repository
from src.pcis.core.schema.lattice import LatticeGrid, LatticeMask, SafetyValueTable
from src.pcis.core.schema.operator import CertificationOutcome, OperatorResult

COORDINATE_TOLERANCE = 1e-9


def encode_action_set(allowed: np.ndarray) -> int:
    """
    Bitmask of a safe-action set, bit u set iff action u is allowed.
    """
    return int(sum(1 << int(u) for u in np.flatnonzero(allowed)))


def decode_action_set(bitmask: int, action_count: int) -> np.ndarray:
    return np.array([(bitmask >> u) & 1 for u in range(action_count)], dtype=bool)


class LatticeRepository(Repository[LatticeMask]):
    """
    Lattice artifacts. Every row starts with the flat lattice index and the point
    coordinates so a file can be checked against the configured grid.
    """

    kind = CsvSchema.MASK

    @staticmethod
    def coordinate_columns(grid: LatticeGrid) -> list[str]:
        return [f"x_{i}" for i in range(grid.dimension)]

    @staticmethod
    def point_cells(grid: LatticeGrid, index: int) -> list[float]:
        return [float(c) for c in grid.points[index]]

    def save(
        self, obj: LatticeMask, path: Path | str, config_hash: str, seed: int | str | None
    ) -> Path:
        grid = obj.grid
        rows = (
            [index, *self.point_cells(grid, index), bool(obj.bits[index])]
            for index in range(grid.size)
        )
        columns = ["index", *self.coordinate_columns(grid), "member"]
        return self.write_table(path, self.kind, columns, rows, config_hash, seed)

    def load(self, path: Path | str, grid: LatticeGrid) -> LatticeMask:
        """
        Read a mask written on the given grid. An empty file is an empty mask.
        :raises GridMismatchError: If the file describes another lattice.
        """
        table = self.read_table(path, self.kind)
        if table is None:
            return LatticeMask.empty(grid)
        self._check_points(table, grid)
        member = table.column("member")
        bits = [self.parse_bool(cells[member], line) for line, cells in table.rows]
        return LatticeMask(grid=grid, bits=np.asarray(bits, dtype=bool))

    def save_value_table(
        self,
        table: SafetyValueTable,
        path: Path | str,
        config_hash: str,
        seed: int | str | None,
    ) -> Path:
        grid = table.grid
        columns = [
            "index",
            *self.coordinate_columns(grid),
            *(f"value_{j}" for j in range(table.horizon + 1)),
        ]
        rows = (
            [index, *self.point_cells(grid, index), *map(float, table.values[:, index])]
            for index in range(grid.size)
        )
        return self.write_table(path, CsvSchema.VALUE_TABLE, columns, rows, config_hash, seed)

    def save_operator_result(
        self,
        result: OperatorResult,
        path: Path | str,
        config_hash: str,
        seed: int | str | None,
    ) -> Path:
        """
        One row per (stage, lattice point) of omega: clipped value, safe-action bitmask
        and continuation action.
        """
        grid = result.omega.grid
        columns = [
            "stage",
            "index",
            *self.coordinate_columns(grid),
            "value",
            "action_mask",
            "continuation",
        ]
        members = result.omega.indices
        rows = (
            [
                stage,
                int(index),
                *self.point_cells(grid, index),
                float(result.value_table.values[stage, index]),
                encode_action_set(result.action_sets[stage, index]),
                int(result.continuation[stage, index]),
            ]
            for stage in range(result.horizon)
            for index in members
        )
        return self.write_table(
            path, CsvSchema.OPERATOR_RESULT, columns, rows, config_hash, seed
        )

    def load_action_maps(
        self, path: Path | str, grid: LatticeGrid, horizon: int, action_count: int
    ) -> np.ndarray:
        """
        Rebuild the (N, size, |U|) action sets of an operator result file.
        Points absent from the file have no safe action.
        """
        action_sets = np.zeros((horizon, grid.size, action_count), dtype=bool)
        table = self.read_table(path, CsvSchema.OPERATOR_RESULT)
        if table is None:
            return action_sets
        stage_col, index_col = table.column("stage"), table.column("index")
        mask_col = table.column("action_mask")
        for line, cells in table.rows:
            stage = self.parse_int(cells[stage_col], line)
            index = self.parse_int(cells[index_col], line)
            if not (0 <= stage < horizon and 0 <= index < grid.size):
                raise DatasetParseError(f"Stage {stage} index {index} out of range.", line)
            action_sets[stage, index] = decode_action_set(
                self.parse_int(cells[mask_col], line), action_count
            )
        return action_sets

    def save_verdict(
        self,
        outcome: CertificationOutcome,
        path: Path | str,
        config_hash: str,
        seed: int | str | None,
    ) -> Path:
        columns = ["accepted", "omega_tent_size", "cert_set_size", "short_blocks"]
        rows = [
            [
                outcome.accepted,
                outcome.omega_tent.count,
                outcome.cert_set.count,
                " ".join(str(j) for j in outcome.result.short_blocks),
            ]
        ]
        return self.write_table(path, CsvSchema.VERDICT, columns, rows, config_hash, seed)

    def load_verdict(self, path: Path | str) -> bool:
        table = self.read_table(path, CsvSchema.VERDICT)
        if table is None or len(table.rows) != 1:
            raise DatasetParseError("A verdict file holds exactly one row.")
        line, cells = table.rows[0]
        return self.parse_bool(cells[table.column("accepted")], line)

    def _check_points(self, table: CsvTable, grid: LatticeGrid) -> None:
        if len(table.rows) != grid.size:
            raise GridMismatchError(
                f"Mask has {len(table.rows)} points, the configured lattice has {grid.size}."
            )
        expected = self.coordinate_columns(grid)
        if table.columns[1 : 1 + grid.dimension] != expected:
            raise GridMismatchError(
                f"Mask coordinates {table.columns[1:-1]} do not match a "
                f"{grid.dimension}-dimensional lattice."
            )
        index_col = table.column("index")
        for position, (line, cells) in enumerate(table.rows):
            index = self.parse_int(cells[index_col], line)
            coords = [self.parse_float(c, line) for c in cells[1 : 1 + grid.dimension]]
            if index != position or not np.allclose(
                coords, grid.points[position], rtol=0.0, atol=COORDINATE_TOLERANCE
            ):
                raise GridMismatchError(
                    f"line {line}: point {index} at {coords} is not lattice point {position}."
                )
