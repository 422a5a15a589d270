from abc import ABCMeta, abstractmethod
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Sample:
    """The single-excitation state at the ``index``-th requested time."""
    index: int
    t: float
    state: np.ndarray


class Publisher(metaclass=ABCMeta):
    """A time integrator streaming samples to its subscribers."""

    @abstractmethod
    def subscribe(self, subscriber, passive=False):
        pass
