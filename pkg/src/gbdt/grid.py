"""Uniform sampling grids shared by the residual checks and the CLI."""
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """``start:stop:step`` with ``stop`` included if it lies within half a step."""
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f'grid step must be positive, got {self.step}')
        if self.stop < self.start:
            raise ValueError(f'empty grid {self.start}:{self.stop}:{self.step}')

    @classmethod
    def parse(cls, text):
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(f'grid must look like start:stop:step, got {text!r}')
        return cls(*(float(p) for p in parts))

    @classmethod
    def centered(cls, center, step, count):
        """``count`` points spaced by ``step`` and centred on ``center``."""
        half = (count - 1) / 2
        return cls(center - half * step, center + half * step, step)

    def __len__(self):
        return math.floor((self.stop - self.start) / self.step + 0.5) + 1

    def point(self, i):
        return self.start + i * self.step

    def points(self):
        return self.start + np.arange(len(self)) * self.step

    def __str__(self):
        return f'{self.start!r}:{self.stop!r}:{self.step!r}'


@dataclass(frozen=True)
class Grid2D:
    x: GridSpec
    t: GridSpec

    def __str__(self):
        return f'x={self.x} t={self.t}'
