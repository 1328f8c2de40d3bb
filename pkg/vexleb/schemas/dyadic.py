from typing import Iterator, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class DyadicTree(BaseModel):
    """
    Dyadic intervals of [lo, lo + length) down to `depth`, stored level by level.

    Node (level, k) is [lo + k L 2^-level, lo + (k+1) L 2^-level) and sits at
    index 2^level - 1 + k of `coefficients`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lo: float = 0.0
    length: float
    depth: int
    coefficients: np.ndarray

    @field_validator('coefficients', mode='before')
    @classmethod
    def validate_coefficients(cls, v):
        arr = np.array(v, dtype=float, copy=True).ravel()
        arr.flags.writeable = False
        return arr

    @model_validator(mode='after')
    def validate_layout(self):
        if self.length <= 0:
            raise ValueError('Root interval must have positive length')
        if self.depth < 0:
            raise ValueError('Depth must be non-negative')
        if self.coefficients.size != self.node_count:
            raise ValueError(f'Expected {self.node_count} coefficients, got {self.coefficients.size}')
        if np.any(self.coefficients < 0) or not np.all(np.isfinite(self.coefficients)):
            raise ValueError('Coefficients must be finite and non-negative')
        return self

    @property
    def node_count(self) -> int:
        return 2 ** (self.depth + 1) - 1

    @classmethod
    def zeros(cls, length: float, depth: int, lo: float = 0.0) -> "DyadicTree":
        return cls(lo=lo, length=length, depth=depth, coefficients=np.zeros(2 ** (depth + 1) - 1))

    def with_coefficients(self, coefficients) -> "DyadicTree":
        return DyadicTree(lo=self.lo, length=self.length, depth=self.depth, coefficients=coefficients)

    def lengths(self) -> np.ndarray:
        levels = np.repeat(np.arange(self.depth + 1), 2 ** np.arange(self.depth + 1))
        return self.length * 2.0 ** -levels

    def level_slice(self, level: int) -> slice:
        return slice(2 ** level - 1, 2 ** (level + 1) - 1)

    def nodes(self) -> Iterator[Tuple[int, int]]:
        for level in range(self.depth + 1):
            for k in range(2 ** level):
                yield level, k

    @staticmethod
    def node_of(index: int) -> Tuple[int, int]:
        level = (index + 1).bit_length() - 1
        return level, index - (2 ** level - 1)

    def interval(self, level: int, k: int) -> Tuple[float, float]:
        size = self.length * 2.0 ** -level
        return self.lo + k * size, self.lo + (k + 1) * size

    def to_dict(self) -> dict:
        return {"root": [self.lo, self.lo + self.length], "depth": self.depth,
                "coefficients": [float(c) for c in self.coefficients]}
