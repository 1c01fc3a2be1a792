"""
Python module containing the named random streams used by every stochastic component.
"""

import zlib

import numpy as np

from src.pcis.constants import RngStream


class RngService:
    """
    Splits one master seed into independent, reproducible named streams.

    Stream 'grow' and stream 'certification' are statistically independent by
    construction, which is what the hold-out certification argument needs.
    """

    def __init__(self, master_seed: int):
        """
        Constructor for the RngService.
        :param master_seed: The run's master seed.
        """
        self.master_seed = int(master_seed)

    def stream(self, name: RngStream | str, *sub_keys: int) -> np.random.Generator:
        """
        Get a fresh generator for a named stream.
        :param name: Stream name, e.g. RngStream.CERTIFICATION.
        :param sub_keys: Optional extra integers, e.g. an interval index.
        :return: A numpy Generator, identical for identical arguments.
        """
        spawn_key = (zlib.crc32(str(name).encode("utf-8")), *(int(k) for k in sub_keys))
        sequence = np.random.SeedSequence(entropy=self.master_seed, spawn_key=spawn_key)
        return np.random.default_rng(sequence)
