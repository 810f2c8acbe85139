import math
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from models.behavior_models import BehaviorDocument

StrategyFamily = Literal['bilocal', 'chain_ij', 'chain_bn', 'linear_b3', 'star_ij', 'star_svetlichny']


class StrategyDocument(BaseModel):
    """Parameters of a canonical strategy, written next to generated behaviors"""
    family: StrategyFamily
    n: int
    thetas: List[float]
    visibilities: List[float]
    varthetas: List[float] = Field(default_factory=list)
    classical_sources: List[int] = Field(default_factory=list)
    phases: Dict[str, float] = Field(default_factory=dict)
    predicted_value: Optional[float] = None
    topology: Dict[str, object] = Field(default_factory=dict)


class SourceSetting(BaseModel):
    """Per-source parameters of a network strategy"""
    theta: float = math.pi / 4
    visibility: float = Field(default=1.0, ge=0.0, le=1.0)
    classical: bool = False


class SvetlichnyBlock(BaseModel):
    """Measured behavior on an explicit party subset around a multipartite source"""
    behavior: BehaviorDocument
    branches: List[str]
    center: List[str]
    conditioning: Dict[str, List[List[int]]]

    @field_validator('conditioning')
    @classmethod
    def validate_conditioning(cls, v):
        for key, pairs in v.items():
            if any(len(pair) != 2 for pair in pairs):
                raise ValueError(f'Conditioning entry {key} must list two settings per branch')
        return v


class NetworkStrategyDocument(BaseModel):
    """Per-source strategy for certifying a whole network"""
    sources: List[SourceSetting]
    chain_witness: Literal['linear_bn', 'chain_ij'] = 'linear_bn'
    star_witness: Literal['star_svetlichny', 'star_ij', 'linear_b3'] = 'star_svetlichny'
    blocks: List[SvetlichnyBlock] = Field(default_factory=list)


class NetworkBehaviorDocument(BaseModel):
    """Measured behavior of every party of a network, certified subnetwork by subnetwork"""
    behavior: BehaviorDocument
    chain_witness: Literal['linear_bn', 'chain_ij'] = 'chain_ij'
    star_witness: Literal['star_ij', 'linear_b3'] = 'star_ij'
    fixed_inputs: Dict[str, int] = Field(default_factory=dict)

    @field_validator('fixed_inputs')
    @classmethod
    def validate_fixed_inputs(cls, v):
        negative = [party for party, x in v.items() if x < 0]
        if negative:
            raise ValueError(f'Fixed inputs of {negative} must be non-negative')
        return v
