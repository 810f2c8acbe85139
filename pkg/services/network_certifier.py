"""
Certification of whole networks through their chain and star subnetworks.

Each subnetwork either runs the canonical experiment of its shape with the
source parameters of the parent network, or is read off a measured behavior
of the whole network. Full network nonlocality of the parent follows when
every subnetwork certifies it.
"""
import asyncio
import logging
from typing import Dict, List, Mapping, Optional, Tuple

from config.config import NetcertConfig, resolve_tolerance
from models.network_models import NetworkTopology, Subnetwork, SubnetworkCover
from models.strategy_models import NetworkBehaviorDocument, NetworkStrategyDocument, SourceSetting, SvetlichnyBlock
from models.witness_models import ClaimEntry, Report, SubnetworkReport
from services.behaviors import Behavior, restrict_behavior
from services.network_model import decompose_network, star_pair_chains
from services.strategies import (
    CanonicalStrategy, canonical_chain, canonical_linear_b3, canonical_star, simulate_witness,
)
from services.witnesses import (
    certify, eval_star_svetlichny, evaluate, family_shape, parse_conditioning, witness_report,
)
from utils.errors import ArgumentError, ScenarioMismatchError, UnsupportedTopologyError

logger = logging.getLogger(__name__)

FULL_CLAIMS = ("FQNN", "FNN")


def _source_parameters(settings: List[SourceSetting]) -> Tuple[List[float], List[float], List[int]]:
    thetas = [s.theta for s in settings]
    visibilities = [s.visibility for s in settings]
    classical = [i for i, s in enumerate(settings, start=1) if s.classical]
    return thetas, visibilities, classical


def expand_cover(cover: SubnetworkCover, star_witness: str) -> List[Subnetwork]:
    """Subnetworks to certify; with linear_b3 every star becomes its tripartite chains."""
    if star_witness != "linear_b3":
        return list(cover.subnetworks)
    pieces = []
    for sub in cover.subnetworks:
        pieces += star_pair_chains(sub) if sub.kind == "star" else [sub]
    return pieces


def subnetwork_family(sub: Subnetwork, chain_witness: str = "linear_bn",
                      star_witness: str = "star_ij") -> Tuple[str, int]:
    """
    Witness family and size for one subnetwork.

    Tripartite chains cut from a star use the linear tripartite inequality.
    The nonlinear chain witness needs an odd number of parties; even chains
    fall back to the linear one, whose two-party case is CHSH.
    """
    size = len(sub.parties)
    if sub.kind == "star":
        return star_witness, size - 1
    if sub.center is not None:
        return "linear_b3", 3
    if chain_witness == "chain_ij" and size >= 3 and size % 2 == 1:
        return "chain_ij", size
    if chain_witness == "chain_ij":
        logger.info(f"Chain {sub.parties} has {size} parties; using the linear chain inequality")
    return "linear_bn", size


def subnetwork_strategy(sub: Subnetwork, settings: List[SourceSetting], chain_witness: str = "linear_bn",
                        star_witness: str = "star_svetlichny") -> CanonicalStrategy:
    """Canonical experiment for one subnetwork."""
    thetas, visibilities, classical = _source_parameters(settings)
    family, _ = subnetwork_family(sub, chain_witness, star_witness)
    if family == "linear_b3":
        return canonical_linear_b3(thetas[0], thetas[1], visibilities=visibilities, classical_sources=classical)
    if sub.kind == "chain":
        variant = "ij" if family == "chain_ij" else "bn"
        return canonical_chain(thetas, variant, visibilities=visibilities, classical_sources=classical)
    return canonical_star(thetas, linear=star_witness == "star_svetlichny", visibilities=visibilities,
                          classical_sources=classical)


def aggregate_claims(reports: List[SubnetworkReport], num_sources: int) -> List[ClaimEntry]:
    """
    Network-level claims from subnetwork claims.

    NN holds when some subnetwork shows it; FQNN and FNN need every
    subnetwork, with the smallest margin.
    """
    overall = []
    nn_margins = [c.margin for r in reports for c in r.report.claims if c.claim == "NN"]
    if nn_margins:
        overall.append(ClaimEntry(claim="NN", level=num_sources, margin=max(nn_margins)))
    for name in FULL_CLAIMS:
        margins = []
        for r in reports:
            found = [c.margin for c in r.report.claims if c.claim == name]
            if not found:
                break
            margins.append(found[0])
        else:
            if reports:
                overall.append(ClaimEntry(claim=name, level=1, margin=min(margins)))
    return overall


class NetworkCertifier:
    """
    Decomposes a network and certifies every subnetwork concurrently.
    """

    def __init__(self, max_concurrent: Optional[int] = None, tol: Optional[float] = None):
        self.max_concurrent = max_concurrent or NetcertConfig.get_instance().MAX_WORKERS
        self.tol = resolve_tolerance(tol)

    def _subnetwork_report(self, sub: Subnetwork, witness) -> SubnetworkReport:
        report = witness_report(witness, self.tol, certify(witness, self.tol))
        return SubnetworkReport(kind=sub.kind, parties=sub.parties, sources=sub.source_map, report=report)

    def certify_subnetwork(self, sub: Subnetwork, document: NetworkStrategyDocument) -> SubnetworkReport:
        settings = [document.sources[i] for i in sub.source_map]
        canonical = subnetwork_strategy(sub, settings, document.chain_witness, document.star_witness)
        return self._subnetwork_report(sub, simulate_witness(canonical))

    def certify_measured_subnetwork(self, sub: Subnetwork, behavior: Behavior, chain_witness: str,
                                    star_witness: str, fixed_inputs: Mapping[str, int]) -> SubnetworkReport:
        """Evaluate a subnetwork witness on the marginal of a whole-network behavior."""
        family, n = subnetwork_family(sub, chain_witness, star_witness)
        local = restrict_behavior(behavior, sub.parties, family_shape(family, n), fixed_inputs)
        return self._subnetwork_report(sub, evaluate(local, family, n))

    def certify_block(self, block: SvetlichnyBlock, sources: List[int]) -> SubnetworkReport:
        behavior = Behavior.from_document(block.behavior, self.tol)
        witness = eval_star_svetlichny(
            behavior, len(block.branches), parse_conditioning(block.conditioning), block.center, block.branches
        )
        report = witness_report(witness, self.tol, certify(witness, self.tol))
        return SubnetworkReport(kind="block", parties=block.branches + block.center, sources=sources, report=report)

    def _block_sources(self, topology: NetworkTopology, blocks: List[SvetlichnyBlock],
                       multipartite: List[int]) -> List[List[int]]:
        assigned = []
        for block in blocks:
            members = set(block.branches) | set(block.center)
            assigned.append([i for i in multipartite if set(topology.sources[i]) <= members])
        uncovered = [i for i in multipartite if not any(i in a for a in assigned)]
        if uncovered:
            raise UnsupportedTopologyError(f"Multipartite sources {uncovered} need an explicit Svetlichny block")
        return assigned

    async def _gather(self, calls) -> List[SubnetworkReport]:
        semaphore = asyncio.Semaphore(self.max_concurrent)

        async def run_with_semaphore(func, *args) -> SubnetworkReport:
            """Certify one piece with semaphore for concurrency control"""
            async with semaphore:
                try:
                    return await asyncio.to_thread(func, *args)
                except Exception as e:
                    logger.error(f"Error certifying {args[0]!r:.80}: {e}")
                    raise

        return list(await asyncio.gather(*(run_with_semaphore(func, *args) for func, *args in calls)))

    def _report(self, topology: NetworkTopology, reports: List[SubnetworkReport],
                description: Optional[Dict[str, object]]) -> Report:
        return Report(
            input=description or {"parties": len(topology.parties), "sources": topology.num_sources},
            subnetworks=reports,
            overall_claims=aggregate_claims(reports, topology.num_sources),
            version=NetcertConfig.get_instance().VERSION,
            tolerance=self.tol,
        )

    async def certify(self, topology: NetworkTopology, document: NetworkStrategyDocument,
                      description: Optional[Dict[str, object]] = None) -> Report:
        """
        Certify a network from its per-source strategy.

        Args:
            topology: parent network
            document: one SourceSetting per source, preferred witnesses and blocks
            description: input summary copied into the report

        Returns:
            Report with one entry per subnetwork and the aggregated claims
        """
        if len(document.sources) != topology.num_sources:
            raise ArgumentError(f"Expected {topology.num_sources} source settings, got {len(document.sources)}")
        cover, multipartite = decompose_network(topology)
        block_sources = self._block_sources(topology, document.blocks, multipartite)
        pieces = expand_cover(cover, document.star_witness)
        logger.info(
            f"Certifying {len(pieces)} subnetworks and {len(document.blocks)} blocks "
            f"on {len(topology.parties)} parties"
        )
        calls = [(self.certify_subnetwork, sub, document) for sub in pieces]
        calls += [(self.certify_block, block, sources) for block, sources in zip(document.blocks, block_sources)]
        return self._report(topology, await self._gather(calls), description)

    async def certify_behavior(self, topology: NetworkTopology, document: NetworkBehaviorDocument,
                               description: Optional[Dict[str, object]] = None) -> Report:
        """
        Certify a network from a measured behavior of all its parties.

        Each subnetwork sees the behavior with every outside party held at
        its fixed input (0 by default) and summed out.

        Args:
            topology: parent network; every source must be bipartite
            document: behavior over the topology parties and the witness choice
            description: input summary copied into the report
        """
        behavior = Behavior.from_document(document.behavior, self.tol)
        names = behavior.scenario.names
        if sorted(names) != sorted(topology.parties):
            raise ScenarioMismatchError(f"Behavior parties {names} differ from topology parties {topology.parties}")
        cover, multipartite = decompose_network(topology)
        if multipartite:
            raise UnsupportedTopologyError(
                f"Multipartite sources {multipartite} need a per-source strategy with explicit blocks"
            )
        pieces = expand_cover(cover, document.star_witness)
        logger.info(f"Certifying {len(pieces)} subnetworks of a measured behavior on {len(names)} parties")
        calls = [
            (self.certify_measured_subnetwork, sub, behavior, document.chain_witness, document.star_witness,
             document.fixed_inputs)
            for sub in pieces
        ]
        return self._report(topology, await self._gather(calls), description)
