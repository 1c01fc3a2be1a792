"""
Python module containing pcis repositories.

pcis follows the repository pattern for its CSV artifacts: each artifact family
inherits from the base Repository, which owns the versioned header line and the
row encoding, and any artifact specific logic is written as a method within its
own <artifact>Repository.
"""

import csv
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Generic, TypeVar

import numpy as np

from src.pcis.constants import CsvSchema
from src.pcis.core.config import settings
from src.pcis.core.exceptions import DatasetParseError, SchemaVersionError
from src.pcis.core.logger import logger
from src.pcis.utils import format_float

HEADER_PATTERN = re.compile(
    r"^# schema=(?P<kind>[\w-]+)/v(?P<version>\d+) config_hash=(?P<hash>\S+) seed=(?P<seed>\S+)$"
)


@dataclass(frozen=True)
class CsvHeader:
    """
    The first line of every artifact: '# schema=<kind>/v<version> config_hash=<h> seed=<s>'.
    """

    kind: CsvSchema
    version: int
    config_hash: str
    seed: str

    def render(self) -> str:
        return (
            f"# schema={self.kind}/v{self.version} "
            f"config_hash={self.config_hash} seed={self.seed}"
        )


@dataclass
class CsvTable:
    """
    A parsed artifact. Rows keep their 1-based file line number for error reporting.
    """

    header: CsvHeader
    columns: list[str]
    rows: list[tuple[int, list[str]]] = field(default_factory=list)

    def column(self, name: str) -> int:
        """
        Position of a named column.
        :raises DatasetParseError: If the column is missing.
        """
        try:
            return self.columns.index(name)
        except ValueError:
            raise DatasetParseError(f"Missing column '{name}'.", line_number=2)


T = TypeVar("T")


class Repository(Generic[T]):
    """
    Base Repository class for versioned CSV artifacts.
    """

    kind: CsvSchema

    def __init__(self, directory: Path | str | None = None, schema_version: int | None = None):
        self.directory = Path(directory if directory is not None else settings.OUTPUT_DIR)
        self.schema_version = schema_version or settings.CSV_SCHEMA_VERSION

    def path(self, name: str) -> Path:
        """
        Artifact path inside the repository directory.
        :param name: File name, e.g. 'mask.csv'.
        """
        return self.directory / name

    def save(self, obj: T, path: Path | str, config_hash: str, seed: int | str | None) -> Path:
        raise NotImplementedError

    def write_table(
        self,
        path: Path | str,
        kind: CsvSchema,
        columns: Sequence[str],
        rows: Iterable[Sequence[object]],
        config_hash: str,
        seed: int | str | None,
    ) -> Path:
        """
        Write an artifact: header line, column row, then one row per record.
        Floats are written with repr so a replay produces identical bytes.
        :return: The written path.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = CsvHeader(
            kind=kind,
            version=self.schema_version,
            config_hash=config_hash,
            seed="none" if seed is None else str(seed),
        )
        count = 0
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(header.render() + "\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([self.encode(cell) for cell in row])
                count += 1
        logger.debug("[Repository]: Wrote %d %s rows to %s.", count, kind, path)
        return path

    def read_table(self, path: Path | str, kind: CsvSchema) -> CsvTable | None:
        """
        Parse an artifact of the given kind.
        :param path: File to read.
        :param kind: Expected schema kind.
        :return: The table, or None if the file is empty.
        :raises SchemaVersionError: On a missing header, another kind or an unknown version.
        :raises DatasetParseError: On rows whose width differs from the column row.
        """
        with open(path, newline="", encoding="utf-8") as f:
            lines = f.read().splitlines()
        if not lines or not any(line.strip() for line in lines):
            return None

        match = HEADER_PATTERN.match(lines[0])
        if match is None:
            raise SchemaVersionError("Missing or malformed schema header.", line_number=1)
        if match["kind"] != kind:
            raise SchemaVersionError(
                f"Expected schema '{kind}', found '{match['kind']}'.", line_number=1
            )
        if int(match["version"]) != self.schema_version:
            raise SchemaVersionError(
                f"Unsupported {kind} schema version v{match['version']}, "
                f"this reader handles v{self.schema_version}.",
                line_number=1,
            )
        header = CsvHeader(
            kind=kind,
            version=int(match["version"]),
            config_hash=match["hash"],
            seed=match["seed"],
        )
        if len(lines) < 2:
            raise DatasetParseError("Missing column row.", line_number=2)

        parsed = list(csv.reader(lines[1:]))
        columns = parsed[0]
        table = CsvTable(header=header, columns=columns)
        for offset, cells in enumerate(parsed[1:], start=3):
            if not cells:
                continue
            if len(cells) != len(columns):
                raise DatasetParseError(
                    f"Expected {len(columns)} fields, found {len(cells)}.", line_number=offset
                )
            table.rows.append((offset, cells))
        return table

    @staticmethod
    def encode(cell: object) -> str:
        if isinstance(cell, bool | np.bool_):
            return "1" if cell else "0"
        if isinstance(cell, float):
            return format_float(cell)
        return str(cell)

    @staticmethod
    def parse_float(cell: str, line_number: int) -> float:
        try:
            return float(cell)
        except ValueError:
            raise DatasetParseError(f"'{cell}' is not a number.", line_number=line_number)

    @staticmethod
    def parse_int(cell: str, line_number: int) -> int:
        try:
            return int(cell)
        except ValueError:
            raise DatasetParseError(f"'{cell}' is not an integer.", line_number=line_number)

    @staticmethod
    def parse_bool(cell: str, line_number: int) -> bool:
        if cell not in ("0", "1"):
            raise DatasetParseError(f"'{cell}' is not a 0/1 flag.", line_number=line_number)
        return cell == "1"
