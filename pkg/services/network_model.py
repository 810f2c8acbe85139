"""
Chain and star topologies and the cover of arbitrary bipartite-source
networks by chain and star subnetworks.
"""
import logging
from typing import Dict, List, Tuple

import networkx as nx
from pydantic import ValidationError

from models.network_models import NetworkTopology, Subnetwork, SubnetworkCover
from utils.errors import ArgumentError, CoverageError, UnsupportedTopologyError

logger = logging.getLogger(__name__)


def make_topology(kind: str, n: int) -> NetworkTopology:
    """
    Build a chain A1..An or a star with branches A1..An and center B.

    Args:
        kind: "chain" or "star"
        n: party count for chains (>= 2), branch count for stars (>= 1)

    Returns:
        NetworkTopology; star parties are ordered [A1, ..., An, B]
    """
    if kind == "chain":
        if n < 2:
            raise ArgumentError(f"A chain needs at least 2 parties, got {n}")
        parties = [f"A{i}" for i in range(1, n + 1)]
        sources = [[parties[i], parties[i + 1]] for i in range(n - 1)]
    elif kind == "star":
        if n < 1:
            raise ArgumentError(f"A star needs at least 1 branch, got {n}")
        branches = [f"A{i}" for i in range(1, n + 1)]
        parties = branches + ["B"]
        sources = [[branch, "B"] for branch in branches]
    else:
        raise ArgumentError(f"Unknown topology kind '{kind}'")
    return NetworkTopology(parties=parties, sources=sources)


def _sub_topology(parties: List[str], sources: List[List[str]]) -> NetworkTopology:
    try:
        return NetworkTopology(parties=parties, sources=sources)
    except ValidationError as e:
        raise CoverageError(f"Invalid subnetwork {parties}: {e}") from e


def _star_subnetworks(topology: NetworkTopology, centers: List[str]) -> List[Subnetwork]:
    """
    One star per center over its first source to each neighbour.

    Further sources parallel to a star edge become two-party chains, as do
    all sources of a center with a single neighbour.
    """
    pieces = []
    for center in centers:
        first_source: Dict[str, int] = {}
        parallel = []
        for i in topology.party_sources(center):
            branch = next(p for p in topology.sources[i] if p != center)
            if branch in first_source:
                parallel.append((branch, i))
            else:
                first_source[branch] = i
        if len(first_source) < 2:
            parallel += list(first_source.items())
            first_source = {}
        if first_source:
            branches = list(first_source)
            sub = _sub_topology(branches + [center], [[b, center] for b in branches])
            pieces.append(Subnetwork(kind="star", topology=sub, source_map=list(first_source.values()),
                                     center=center))
        for branch, i in sorted(parallel, key=lambda item: item[1]):
            logger.debug(f"Source {i} parallel to star edge {branch}-{center} becomes a two-party chain")
            pieces.append(_chain([branch, center], [i]))
    return pieces


def _walk(graph: nx.MultiGraph, start: str, length: int) -> Tuple[List[str], List[int]]:
    """Follow unused edges from start; returns visited nodes and source indices."""
    nodes, edges = [start], []
    current = start
    for _ in range(length):
        options = sorted(
            (nbr, key) for _, nbr, key in graph.edges(current, keys=True) if key not in edges
        )
        if not options:
            break
        nbr, key = options[0]
        edges.append(key)
        nodes.append(nbr)
        current = nbr
    return nodes, edges


def _chain(topology_nodes: List[str], edges: List[int]) -> Subnetwork:
    sources = [[topology_nodes[i], topology_nodes[i + 1]] for i in range(len(edges))]
    return Subnetwork(kind="chain", topology=_sub_topology(topology_nodes, sources), source_map=edges)


def _chain_subnetworks(topology: NetworkTopology, centers: List[str]) -> List[Subnetwork]:
    residual = nx.MultiGraph()
    for index, (u, v) in enumerate(topology.sources):
        if u not in centers and v not in centers:
            residual.add_edge(u, v, key=index)

    chains = []
    for component in nx.connected_components(residual):
        piece = residual.subgraph(component)
        size = piece.number_of_edges()
        endpoints = sorted(node for node in component if piece.degree(node) == 1)
        if endpoints:
            nodes, edges = _walk(piece, endpoints[0], size)
            chains.append(_chain(nodes, edges))
            continue
        # Cycle: cut once at each end of the walk so every source is interior to a chain
        start = min(component)
        nodes, edges = _walk(piece, start, size)
        logger.debug(f"Splitting cycle through {start} with {size} sources")
        chains.append(_chain(nodes[:-1], edges[:-1]))
        chains.append(_chain(nodes[1:], edges[1:]))
    return chains


def star_pair_chains(sub: Subnetwork) -> List[Subnetwork]:
    """
    Tripartite chains A_i - B - A_j through the center of a star.

    Consecutive branch pairs are used, so every star source lies in some
    chain. The chains keep the star center to mark their middle party.
    """
    if sub.kind != "star" or sub.center is None:
        raise ArgumentError(f"Expected a star subnetwork, got {sub.kind}")
    branches = [p for p in sub.parties if p != sub.center]
    if len(branches) < 2:
        raise UnsupportedTopologyError(f"Star at {sub.center} needs two branches for tripartite chains")
    chains = []
    for i in range(len(branches) - 1):
        parties = [branches[i], sub.center, branches[i + 1]]
        piece = _chain(parties, [sub.source_map[i], sub.source_map[i + 1]])
        chains.append(piece.model_copy(update={"center": sub.center}))
    logger.debug(f"Star at {sub.center} split into {len(chains)} tripartite chains")
    return chains


def decompose_into_chains_and_stars(topology: NetworkTopology) -> SubnetworkCover:
    """
    Cover a bipartite-source network by chain and star subnetworks.

    Parties of degree >= 3 become star centers over all their sources. The
    remaining sources form paths, which become chains, and cycles, which are
    split into two overlapping chains.

    Args:
        topology: connected topology whose sources all feed exactly two parties

    Returns:
        SubnetworkCover ordered by (first party, kind, parties)
    """
    if not topology.is_bipartite():
        raise UnsupportedTopologyError("Only bipartite sources can be decomposed; use explicit blocks for the rest")

    centers = sorted(p for p in topology.parties if topology.degree(p) >= 3)
    subnetworks = _star_subnetworks(topology, centers) + _chain_subnetworks(topology, centers)
    subnetworks.sort(key=lambda s: (s.parties[0], s.kind, s.parties))
    cover = SubnetworkCover(subnetworks=subnetworks)
    check_cover(topology, cover)
    logger.info(
        f"Decomposed {len(topology.parties)} parties into {cover.count('star')} stars "
        f"and {cover.count('chain')} chains"
    )
    return cover


def check_cover(parent: NetworkTopology, cover: SubnetworkCover) -> None:
    """Raise CoverageError unless every parent source lies in some subnetwork."""
    covered = set(cover.covered_sources())
    missing = [i for i in range(parent.num_sources) if i not in covered]
    if missing:
        raise CoverageError(f"Sources {missing} are not covered by any subnetwork")
    for sub in cover.subnetworks:
        for local, parent_index in enumerate(sub.source_map):
            if sorted(sub.topology.sources[local]) != sorted(parent.sources[parent_index]):
                raise CoverageError(f"Subnetwork source {local} does not match parent source {parent_index}")


def bipartite_components(topology: NetworkTopology) -> List[Tuple[NetworkTopology, List[int]]]:
    """
    Split the bipartite sources of a topology into connected pieces.

    Returns:
        (component topology, parent source indices) pairs, ordered by first party
    """
    graph = nx.MultiGraph()
    for index, source in enumerate(topology.sources):
        if len(source) == 2:
            graph.add_edge(source[0], source[1], key=index)

    components = []
    for nodes in nx.connected_components(graph):
        parties = [p for p in topology.parties if p in nodes]
        edges = sorted(key for _, _, key in graph.subgraph(nodes).edges(keys=True))
        sources = [list(topology.sources[i]) for i in edges]
        components.append((NetworkTopology(parties=parties, sources=sources), edges))
    components.sort(key=lambda item: item[0].parties[0])
    return components


def decompose_network(topology: NetworkTopology) -> Tuple[SubnetworkCover, List[int]]:
    """
    Decompose the bipartite part of any topology.

    Returns:
        cover with source indices mapped to the parent, and the indices of
        multipartite sources left for explicit blocks
    """
    if topology.is_bipartite():
        return decompose_into_chains_and_stars(topology), []

    subnetworks = []
    for component, edges in bipartite_components(topology):
        local: Dict[int, int] = dict(enumerate(edges))
        for sub in decompose_into_chains_and_stars(component).subnetworks:
            mapped = [local[i] for i in sub.source_map]
            subnetworks.append(sub.model_copy(update={"source_map": mapped}))
    subnetworks.sort(key=lambda s: (s.parties[0], s.kind, s.parties))
    multipartite = [i for i, source in enumerate(topology.sources) if len(source) > 2]
    return SubnetworkCover(subnetworks=subnetworks), multipartite
