from typing import List, Literal, Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class NetworkTopology(BaseModel):
    """Parties, sources and the source -> party incidence map"""
    model_config = ConfigDict(frozen=True)

    parties: List[str]
    sources: List[List[str]]

    @field_validator('parties')
    @classmethod
    def validate_parties(cls, v):
        if not v:
            raise ValueError('A topology needs at least one party')
        if len(set(v)) != len(v):
            raise ValueError('Party identifiers must be distinct')
        return v

    @model_validator(mode='after')
    def validate_incidence(self):
        known = set(self.parties)
        for index, source in enumerate(self.sources):
            if len(source) < 2 or len(set(source)) != len(source):
                raise ValueError(f'Source {index} must feed at least 2 distinct parties')
            unknown = [p for p in source if p not in known]
            if unknown:
                raise ValueError(f'Source {index} feeds unknown parties {unknown}')
        if not nx.is_connected(self.incidence_graph()):
            raise ValueError('Topology is not connected')
        return self

    @property
    def num_sources(self) -> int:
        return len(self.sources)

    def party_index(self, party: str) -> int:
        return self.parties.index(party)

    def party_sources(self, party: str) -> List[int]:
        """Indices of the sources feeding a party, in source order."""
        return [i for i, source in enumerate(self.sources) if party in source]

    def degree(self, party: str) -> int:
        return len(self.party_sources(party))

    def is_bipartite(self) -> bool:
        return all(len(source) == 2 for source in self.sources)

    def incidence_graph(self) -> nx.Graph:
        """Bipartite party/source graph; source nodes are ('source', index)."""
        graph = nx.Graph()
        graph.add_nodes_from(self.parties, kind='party')
        for index, source in enumerate(self.sources):
            node = ('source', index)
            graph.add_node(node, kind='source')
            graph.add_edges_from((node, party) for party in source)
        return graph


class Subnetwork(BaseModel):
    """Chain or star piece of a parent topology"""
    kind: Literal['chain', 'star']
    topology: NetworkTopology
    source_map: List[int]
    center: Optional[str] = None

    @property
    def parties(self) -> List[str]:
        return self.topology.parties


class SubnetworkCover(BaseModel):
    """Chains and stars whose sources jointly cover a parent topology"""
    subnetworks: List[Subnetwork]

    def covered_sources(self) -> List[int]:
        return sorted({i for sub in self.subnetworks for i in sub.source_map})

    def count(self, kind: str) -> int:
        return sum(1 for sub in self.subnetworks if sub.kind == kind)
