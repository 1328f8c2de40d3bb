import math
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from vexleb.schemas.grid import GridFunction

Verdict = Literal['finite', 'non-finite', 'inconclusive']


class NormResult(BaseModel):
    value: float
    modular_at_value: float
    iterations: int
    tol: float

    @field_validator('value')
    @classmethod
    def validate_value(cls, v):
        if v < 0:
            raise ValueError('Norm value must be non-negative')
        return v


class ConditionReport(BaseModel):
    name: str
    value: float
    arg: Dict[str, Any] = {}
    resolution: List[int]
    truncation: List[float]
    verdict: Optional[Verdict] = None
    finite: Optional[bool] = None
    details: Dict[str, Any] = {}

    @field_validator('value')
    @classmethod
    def validate_value(cls, v):
        if math.isnan(v) or v < 0:
            raise ValueError('Condition value must be a non-negative number')
        return v


class RatioReport(BaseModel):
    operator: str
    ratios: List[float]
    labels: List[str] = []
    max_ratio: float
    argmax: Optional[str] = None
    bound_low: float = 0.0
    bound_high: float = math.inf
    trials: int
    seed: int
    generator_version: str
    skipped: int = 0
    resolution: List[int]
    truncation: List[float]
    details: Dict[str, Any] = {}

    @model_validator(mode='after')
    def validate_ratios(self):
        if any(r < 0 for r in self.ratios):
            raise ValueError('Ratios must be non-negative')
        if self.ratios and self.max_ratio != max(self.ratios):
            raise ValueError('max_ratio must equal the largest ratio')
        return self


class SandwichReport(BaseModel):
    a_m: float
    a_ps: float
    c_emp: float
    upper_m: float
    upper_ps: float
    lower_m_ok: bool
    lower_ps_ok: bool
    p: float
    q: float
    ratios: RatioReport
    conditions: List[ConditionReport]


class EmbeddingReport(BaseModel):
    c_emp: float
    c1: float
    ratio: float
    argmax: Optional[str] = None
    b_star: float
    depth: int
    window: List[float]
    p: float
    q: float
    trials: int
    seed: int
    generator_version: str


class BlowupSeries(BaseModel):
    taus: List[float]
    values: List[float]
    lower_bounds: List[float]
    slope: float
    lower_slope: float
    predicted_slope: float
    p1: float
    p2: float
    alpha: float
    resolution: List[int]
    geometry: Dict[str, Any] = {}

    @field_validator('taus')
    @classmethod
    def validate_taus(cls, v):
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError('taus must be strictly decreasing')
        return v


class ComparisonReport(BaseModel):
    constants: List[float]
    shift_samples: List[int]
    drift: float
    finite: bool
    k: int
    lattice_radius: float
    resolution: List[int]
    details: Dict[str, Any] = {}


class PartitionSequence(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    levels: List[int]
    points: List[float]
    exponent: float
    max_deviation: float
    annulus_masses: List[float]
    weight: Optional[GridFunction] = Field(default=None, exclude=True)

    @model_validator(mode='after')
    def validate_points(self):
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ValueError('Partition points must increase')
        return self
