"""
init module to import each repository into.
"""

from .base_repository import CsvHeader, CsvTable, Repository
from .dataset_repository import DatasetRepository
from .lattice_repository import LatticeRepository
from .record_repository import RecordRepository

__all__ = [
    "CsvHeader",
    "CsvTable",
    "Repository",
    "DatasetRepository",
    "LatticeRepository",
    "RecordRepository",
]
