"""Containers for time-stepping results."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Trajectory:
    """End-of-step values of one run.

    ``e`` has one row per time level ``t^n`` (row 0 is the initial state);
    ``second`` holds the companion field, ``h`` for the e-h scheme and ``a``
    for the e-a scheme, as named by ``second_name``.
    """

    scheme: str
    times: np.ndarray
    e: np.ndarray
    second: np.ndarray
    energies: np.ndarray
    space_e: object
    space_second: object
    second_name: str
    tau: float
    iterations: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    config: object = None

    @property
    def steps(self):
        return len(self.times) - 1

    @property
    def e_end(self):
        return self.e[-1]
