from .config import ConfigModel, ExperimentModel

__all__ = ["ConfigModel", "ExperimentModel"]
