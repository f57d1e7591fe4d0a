"""Labelled random streams derived from one master seed."""

import zlib

import numpy as np


def stream(seed: int, stage: int, name: str) -> np.random.Generator:
    """Independent generator for ``(seed, stage, name)``.

    The stream depends only on these three values, so results do not depend on
    evaluation order.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stage),
                                                         zlib.crc32(name.encode())]))
