from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from models.behavior_models import BehaviorDocument
from models.network_models import NetworkTopology
from models.strategy_models import NetworkBehaviorDocument, NetworkStrategyDocument
from models.witness_models import WitnessFamily


class EvalRequest(BaseModel):
    """Input model for witness evaluation"""
    behavior: BehaviorDocument
    family: WitnessFamily
    n: Optional[int] = None
    conditioning: Optional[Dict[str, List[List[int]]]] = None
    center: Optional[List[str]] = None
    branches: Optional[List[str]] = None
    tol: Optional[float] = Field(default=None, gt=0.0)


class CertifyRequest(BaseModel):
    """Input model for network certification: a per-source strategy or a measured behavior"""
    topology: NetworkTopology
    strategy: Optional[NetworkStrategyDocument] = None
    measured: Optional[NetworkBehaviorDocument] = None
    tol: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode='after')
    def validate_input(self):
        if (self.strategy is None) == (self.measured is None):
            raise ValueError('Give exactly one of strategy and measured')
        return self


class DecomposedSubnetwork(BaseModel):
    """Chain or star of a decomposition, as returned by the API"""
    kind: str
    parties: List[str]
    sources: List[int]
    center: Optional[str] = None


class DecomposeResponse(BaseModel):
    """Subnetworks covering a topology and the sources left to explicit blocks"""
    subnetworks: List[DecomposedSubnetwork]
    multipartite_sources: List[int]
