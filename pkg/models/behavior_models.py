from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class PartySpec(BaseModel):
    """Input and output cardinalities of one party"""
    model_config = ConfigDict(frozen=True)

    name: str
    inputs: int = Field(ge=1)
    outputs: int = Field(ge=2)


class Scenario(BaseModel):
    """Ordered party records of a behavior"""
    model_config = ConfigDict(frozen=True)

    parties: List[PartySpec]

    @field_validator('parties')
    @classmethod
    def validate_parties(cls, v):
        if not v:
            raise ValueError('A scenario needs at least one party')
        names = [p.name for p in v]
        if len(set(names)) != len(names):
            raise ValueError('Party names must be distinct')
        return v

    @classmethod
    def from_shape(cls, names: List[str], shape: List[Tuple[int, int]]) -> 'Scenario':
        return cls(parties=[PartySpec(name=n, inputs=x, outputs=a) for n, (x, a) in zip(names, shape)])

    @property
    def names(self) -> List[str]:
        return [p.name for p in self.parties]

    @property
    def input_shape(self) -> Tuple[int, ...]:
        return tuple(p.inputs for p in self.parties)

    @property
    def output_shape(self) -> Tuple[int, ...]:
        return tuple(p.outputs for p in self.parties)

    @property
    def shape(self) -> List[Tuple[int, int]]:
        return [(p.inputs, p.outputs) for p in self.parties]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"Unknown party '{name}'")


class BehaviorDocument(BaseModel):
    """Behavior file: flat row-major table, inputs outermost, then outputs"""
    scenario: Scenario
    probabilities: List[float]


class SignalingViolation(BaseModel):
    """A joint marginal that changes with an outside party's input"""
    parties: List[str]
    depends_on: str
    deviation: float
