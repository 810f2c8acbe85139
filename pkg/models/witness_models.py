from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

WitnessFamily = Literal['bilocal_ij', 'chain_ij', 'star_ij', 'linear_b3', 'linear_bn', 'star_svetlichny']
ModelClass = Literal['all_classical', 'hybrid_ns', 'hybrid_quantum', 'quantum_max']


class WitnessValue(BaseModel):
    """Evaluated witness with its named intermediates"""
    family: WitnessFamily
    n: int
    value: float
    components: Dict[str, float] = Field(default_factory=dict)


class BoundSpec(BaseModel):
    """Closed-form threshold for one (family, n, parameter, model) tuple"""
    family: WitnessFamily
    n: int
    parameter: Optional[int] = None
    model: ModelClass
    threshold: float
    detectable: bool


class CertificationClaim(BaseModel):
    """Claim certified by a strict violation of a threshold"""
    claim: str
    level: int
    witness: WitnessValue
    margin: float

    def summary(self) -> Dict[str, object]:
        return {"claim": self.claim, "level": self.level, "margin": self.margin}


class BoundEntry(BaseModel):
    """Row of the bound table as printed in reports"""
    model: ModelClass
    parameter: Optional[int] = None
    threshold: float
    detectable: bool
    claim: Optional[str] = None


class ClaimEntry(BaseModel):
    """Claim as printed in reports"""
    claim: str
    level: int
    margin: float


class WitnessReport(BaseModel):
    """Witness value, its bound table and the claims it supports"""
    family: WitnessFamily
    n: int
    value: float
    components: Dict[str, float]
    bounds: List[BoundEntry]
    claims: List[ClaimEntry]
    warnings: List[str] = Field(default_factory=list)


class SubnetworkReport(BaseModel):
    """Certification of one piece of a decomposed network"""
    kind: Literal['chain', 'star', 'block']
    parties: List[str]
    sources: List[int]
    report: WitnessReport


class Report(BaseModel):
    """Network certification report"""
    input: Dict[str, object]
    subnetworks: List[SubnetworkReport]
    overall_claims: List[ClaimEntry]
    version: str
    tolerance: float
