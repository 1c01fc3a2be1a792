"""
Dataset Repository containing transition dataset reads and writes.
"""

from pathlib import Path

import numpy as np

from src.pcis.constants import CsvSchema, DatasetTag
from src.pcis.core.exceptions import (
    ConfigurationError,
    DataSeparationError,
    DatasetParseError,
)
from src.pcis.core.logger import logger
from src.pcis.core.repositories.base_repository import Repository
from src.pcis.core.schema.transitions import TransitionDataset


class DatasetRepository(Repository[TransitionDataset]):
    """
    Transition datasets as 'state_i..., action, next_state_i..., tag' rows in arrival order.
    """

    kind = CsvSchema.DATASET

    @staticmethod
    def columns(state_dimension: int) -> list[str]:
        return [
            *(f"state_{i}" for i in range(state_dimension)),
            "action",
            *(f"next_state_{i}" for i in range(state_dimension)),
            "tag",
        ]

    def save(
        self,
        obj: TransitionDataset,
        path: Path | str,
        config_hash: str,
        seed: int | str | None,
    ) -> Path:
        rows = (
            [*map(float, state), int(action), *map(float, next_state), str(obj.tag)]
            for state, action, next_state in zip(
                obj.states, obj.actions, obj.next_states, strict=True
            )
        )
        return self.write_table(
            path, self.kind, self.columns(obj.state_dimension), rows, config_hash, seed
        )

    def load(
        self,
        path: Path | str,
        state_dimension: int,
        tag: DatasetTag | None = None,
    ) -> TransitionDataset:
        """
        Read a dataset file.
        :param path: The CSV file.
        :param state_dimension: Expected state dimension n.
        :param tag: Intended use of the data. Certification rows can never be loaded as
            grow data and the other way round. An empty file yields an empty dataset with this tag.
        :return: The dataset.
        :raises DatasetParseError: On malformed rows, with the offending line number.
        :raises ConfigurationError: If the file holds states of another dimension.
        :raises DataSeparationError: If grow and certification data are swapped.
        """
        table = self.read_table(path, self.kind)
        if table is None or not table.rows:
            logger.warning("[Repository]: Dataset %s holds no transitions.", path)
            return TransitionDataset.empty(state_dimension, tag or DatasetTag.BEHAVIOUR)

        stored_dimension = sum(column.startswith("state_") for column in table.columns)
        if stored_dimension != state_dimension:
            raise ConfigurationError(
                f"{path} holds {stored_dimension}-dimensional states, the experiment "
                f"uses {state_dimension}."
            )
        if table.columns != self.columns(state_dimension):
            raise DatasetParseError(f"Unexpected dataset columns {table.columns}.", line_number=2)

        states = np.empty((len(table.rows), state_dimension))
        next_states = np.empty_like(states)
        actions = np.empty(len(table.rows), dtype=np.int64)
        tags = set()
        for row, (line_number, cells) in enumerate(table.rows):
            states[row] = [self.parse_float(c, line_number) for c in cells[:state_dimension]]
            actions[row] = self.parse_int(cells[state_dimension], line_number)
            next_states[row] = [
                self.parse_float(c, line_number) for c in cells[state_dimension + 1 : -1]
            ]
            try:
                tags.add(DatasetTag(cells[-1]))
            except ValueError:
                raise DatasetParseError(f"Unknown tag '{cells[-1]}'.", line_number=line_number)
            if actions[row] < 0:
                raise DatasetParseError("Negative action index.", line_number=line_number)

        if len(tags) != 1:
            raise DatasetParseError(f"Mixed tags {sorted(tags)} in one dataset.")
        stored = tags.pop()
        crossed = {tag, stored} == {DatasetTag.GROW, DatasetTag.CERTIFICATION}
        if crossed:
            raise DataSeparationError(f"{path} holds {stored} data, refusing it as {tag} data.")
        logger.info("[Repository]: Loaded %d transitions from %s.", len(actions), path)
        return TransitionDataset(
            states=states,
            actions=actions,
            next_states=next_states,
            tag=tag or stored,
        )
