from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

SweepFamily = Literal['bilocal', 'star_ij', 'chain_ij', 'linear_b3', 'chain_bn', 'star_svetlichny']


class SweptParameter(BaseModel):
    """Linearly spaced parameter axis"""
    name: str
    start: float
    stop: float
    steps: int

    @field_validator('steps')
    @classmethod
    def validate_steps(cls, v):
        if v < 2:
            raise ValueError('A swept parameter needs at least 2 steps')
        return v

    @model_validator(mode='after')
    def validate_range(self):
        if not self.start < self.stop:
            raise ValueError(f'Sweep of {self.name} needs start < stop')
        return self


class SweepSpec(BaseModel):
    """Family, fixed parameters and swept axes of a sweep"""
    family: SweepFamily
    n: Optional[int] = None
    fixed: Dict[str, float] = Field(default_factory=dict)
    swept: List[SweptParameter]
    output: Optional[str] = None

    @field_validator('swept')
    @classmethod
    def validate_swept(cls, v):
        if not v:
            raise ValueError('At least one swept parameter is required')
        names = [p.name for p in v]
        if len(set(names)) != len(names):
            raise ValueError('Swept parameter names must be distinct')
        return v


class SweepResult(BaseModel):
    """Header and rows of a finished sweep, in grid order"""
    header: List[str]
    rows: List[List[object]]
