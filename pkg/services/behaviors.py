"""
Behavior tables P(a|x) from quantum, classical, PR-box and hybrid strategies.

A behavior table has one axis per party input followed by one axis per party
output, in scenario party order. Multi-bit outputs are big-endian integers.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from config.config import NetcertConfig, resolve_tolerance
from models.behavior_models import BehaviorDocument, Scenario, SignalingViolation
from models.network_models import NetworkTopology
from services.quantum_core import ProjectiveMeasurement, PureState, State, basis_state
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Behavior:
    """Normalized conditional probability table over a scenario"""
    scenario: Scenario
    table: np.ndarray
    tol: Optional[float] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=float)
        expected = self.scenario.input_shape + self.scenario.output_shape
        if table.shape != expected:
            raise ArgumentError(f"Table of shape {table.shape} does not match scenario shape {expected}")
        tol = resolve_tolerance(self.tol)
        if table.size and (table.min() < -tol or table.max() > 1 + tol):
            raise ArgumentError("Probabilities must lie in [0, 1]")
        k = len(self.scenario.parties)
        sums = table.sum(axis=tuple(range(k, 2 * k)))
        if not np.allclose(sums, 1.0, atol=tol, rtol=0.0):
            raise ArgumentError(f"Outputs do not sum to 1 for every input (worst {np.abs(sums - 1).max():.3g})")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def num_parties(self) -> int:
        return len(self.scenario.parties)

    def to_document(self) -> BehaviorDocument:
        return BehaviorDocument(scenario=self.scenario, probabilities=[float(p) for p in self.table.ravel()])

    @classmethod
    def from_document(cls, document: BehaviorDocument, tol: Optional[float] = None) -> 'Behavior':
        """Rebuild a behavior from its document; tol overrides the configured tolerance for validation."""
        scenario = document.scenario
        shape = scenario.input_shape + scenario.output_shape
        expected = int(np.prod(shape))
        if len(document.probabilities) != expected:
            raise ArgumentError(f"Expected {expected} probabilities, got {len(document.probabilities)}")
        return cls(scenario, np.asarray(document.probabilities, dtype=float).reshape(shape), tol)


# Source descriptors

@dataclass(frozen=True)
class QuantumSource:
    """Quantum state; qubit i goes to the i-th party listed for the source"""
    state: State


@dataclass(frozen=True)
class ClassicalSource:
    """
    Shared classical symbol drawn from prior.

    With embed_as_qubits the receiving quantum parties hold |symbol> as one
    qubit instead of reading the symbol.
    """
    prior: Tuple[float, ...]
    embed_as_qubits: bool = False

    def __post_init__(self):
        prior = tuple(float(p) for p in self.prior)
        object.__setattr__(self, "prior", prior)
        if not prior or min(prior) < 0 or abs(sum(prior) - 1.0) > resolve_tolerance():
            raise ArgumentError(f"Classical prior {prior} is not normalized")
        if self.embed_as_qubits and len(prior) > 2:
            raise ArgumentError("Only binary symbols can be embedded as qubits")


@dataclass(frozen=True)
class PRBoxSource:
    """Bipartite no-signaling box with a xor b = x*y"""


Source = Union[QuantumSource, ClassicalSource, PRBoxSource]


# Party descriptors

@dataclass(frozen=True)
class QuantumParty:
    """
    Measurements keyed by (input, classical symbols received).

    Symbols follow the order of the party's non-embedded classical sources.
    """
    num_inputs: int
    num_outputs: int
    measurements: Dict[Tuple[int, Tuple[int, ...]], ProjectiveMeasurement]

    @classmethod
    def unconditional(cls, measurements: Sequence[ProjectiveMeasurement]) -> 'QuantumParty':
        if not measurements:
            raise ArgumentError("A quantum party needs at least one measurement")
        outcomes = {m.num_outcomes for m in measurements}
        if len(outcomes) != 1:
            raise ArgumentError("All measurements of a party must have the same number of outcomes")
        return cls(len(measurements), outcomes.pop(), {(x, ()): m for x, m in enumerate(measurements)})


@dataclass(frozen=True)
class ResponseParty:
    """
    Deterministic party fed by classical symbols and PR boxes.

    box_inputs maps (input, symbols) to the bits fed into each PR box the
    party holds; responses maps (input, symbols, box outputs) to the output.
    """
    num_inputs: int
    num_outputs: int
    responses: Dict[Tuple[int, Tuple[int, ...], Tuple[int, ...]], int]
    box_inputs: Dict[Tuple[int, Tuple[int, ...]], Tuple[int, ...]] = field(default_factory=dict)


Party = Union[QuantumParty, ResponseParty]


@dataclass(frozen=True)
class HybridStrategy:
    """Per-source descriptors and per-party measurement descriptors on a topology"""
    topology: NetworkTopology
    sources: Tuple[Source, ...]
    parties: Tuple[Party, ...]

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "parties", tuple(self.parties))
        if len(self.sources) != self.topology.num_sources:
            raise ArgumentError("One descriptor is required per source")
        if len(self.parties) != len(self.topology.parties):
            raise ArgumentError("One descriptor is required per party")
        for index, source in enumerate(self.sources):
            receivers = [self.parties[self.topology.party_index(p)] for p in self.topology.sources[index]]
            if isinstance(source, PRBoxSource):
                if len(receivers) != 2 or not all(isinstance(r, ResponseParty) for r in receivers):
                    raise ArgumentError(f"PR box {index} must feed two response parties")
            elif isinstance(source, QuantumSource):
                if source.state.num_qubits != len(receivers):
                    raise ArgumentError(f"Source {index} state has {source.state.num_qubits} qubits for {len(receivers)} parties")
                if not all(isinstance(r, QuantumParty) for r in receivers):
                    raise ArgumentError(f"Quantum source {index} feeds a response party")

    def scenario(self) -> Scenario:
        return Scenario.from_shape(
            self.topology.parties, [(p.num_inputs, p.num_outputs) for p in self.parties]
        )


# Sign rules and correlators

@dataclass(frozen=True)
class SignRule:
    """Maps a party's outcome to a weight in a correlator"""
    kind: str
    index: int = 0

    @classmethod
    def parity(cls) -> 'SignRule':
        return cls("parity")

    @classmethod
    def bit(cls, k: int) -> 'SignRule':
        return cls("bit", k)

    @classmethod
    def outcome(cls, b: int) -> 'SignRule':
        return cls("outcome", b)

    @classmethod
    def ignore(cls) -> 'SignRule':
        return cls("ignore")

    def weights(self, num_outputs: int) -> np.ndarray:
        outcomes = np.arange(num_outputs)
        if self.kind == "parity":
            popcount = np.array([bin(a).count("1") for a in outcomes])
            return (-1.0) ** popcount
        if self.kind == "bit":
            width = max(1, int(np.ceil(np.log2(num_outputs))))
            if not 0 <= self.index < width:
                raise ArgumentError(f"Bit {self.index} out of range for {num_outputs} outcomes")
            return (-1.0) ** ((outcomes >> (width - 1 - self.index)) & 1)
        if self.kind == "outcome":
            if not 0 <= self.index < num_outputs:
                raise ArgumentError(f"Outcome {self.index} out of range for {num_outputs} outcomes")
            return (outcomes == self.index).astype(float)
        if self.kind == "ignore":
            return np.ones(num_outputs)
        raise ArgumentError(f"Unknown sign rule '{self.kind}'")


def correlator(behavior: Behavior, settings: Sequence[int], rules: Sequence[SignRule]) -> float:
    """
    Sum over outputs of the product of per-party weights times P(a|x).

    Args:
        behavior: behavior to read
        settings: one input index per party
        rules: one SignRule per party

    Returns:
        The correlator; within [-1, 1] for sign rules
    """
    shape = behavior.scenario.shape
    if len(settings) != len(shape) or len(rules) != len(shape):
        raise ArgumentError("One setting and one rule are required per party")
    for x, (inputs, _) in zip(settings, shape):
        if not 0 <= x < inputs:
            raise ArgumentError(f"Setting {x} out of range")
    value = behavior.table[tuple(settings)]
    for rule, (_, outputs) in zip(rules, shape):
        value = np.tensordot(rule.weights(outputs), value, axes=1)
    return float(value)


# Born-rule engine

def _party_operator(party: QuantumParty, symbols: Tuple[int, ...], dim: int) -> np.ndarray:
    """Projectors of one party stacked as (inputs, outputs, dim, dim)."""
    stack = []
    for x in range(party.num_inputs):
        measurement = party.measurements.get((x, symbols))
        if measurement is None:
            raise ArgumentError(f"No measurement for input {x} and symbols {symbols}")
        if measurement.dimension != dim:
            raise ArgumentError(f"Measurement acts on dimension {measurement.dimension}, party holds {dim}")
        if measurement.num_outcomes != party.num_outputs:
            raise ArgumentError("Measurement outcome count differs from the party's output count")
        stack.append(measurement.as_array())
    return np.stack(stack)


def _born_table(densities: List[Tuple[np.ndarray, List[int]]], operators: List[np.ndarray]) -> np.ndarray:
    """
    Joint table of quantum parties for a product of source densities.

    Args:
        densities: (density, owning party per qubit) for each source in order
        operators: per party projectors shaped (inputs, outputs, d, d)

    Returns:
        Table shaped (x1..xk, a1..ak)
    """
    owners = [owner for _, qubits in densities for owner in qubits]
    num_qubits = len(owners)
    rho = densities[0][0]
    for density, _ in densities[1:]:
        rho = np.kron(rho, density)
    order = sorted(range(num_qubits), key=lambda q: (owners[q], q))
    tensor = rho.reshape((2,) * (2 * num_qubits))
    tensor = tensor.transpose(order + [num_qubits + q for q in order])
    dims = [op.shape[2] for op in operators]
    tensor = tensor.reshape(dims + dims)

    remaining = len(operators)
    for op in operators:
        # rows of the current party sit at axis 0, its columns at axis `remaining`
        tensor = np.tensordot(tensor, op, axes=([0, remaining], [3, 2]))
        remaining -= 1
    k = len(operators)
    tensor = tensor.transpose([2 * i for i in range(k)] + [2 * i + 1 for i in range(k)])
    return tensor.real


def _density(state: State) -> np.ndarray:
    return state.density() if isinstance(state, PureState) else np.asarray(state.density)


def _pr_probability(outputs: Tuple[int, int], inputs: Tuple[int, int]) -> float:
    return 0.5 if (outputs[0] ^ outputs[1]) == (inputs[0] & inputs[1]) else 0.0


def _response_table(strategy: HybridStrategy, responders: List[int], symbols: Dict[int, Tuple[int, ...]],
                     boxes: List[int]) -> np.ndarray:
    """Joint table of the response parties given their symbols; PR boxes are summed out."""
    topology = strategy.topology
    parties = [strategy.parties[p] for p in responders]
    held = {p: [b for b in boxes if topology.parties[p] in topology.sources[b]] for p in responders}
    table = np.zeros(tuple(q.num_inputs for q in parties) + tuple(q.num_outputs for q in parties))

    for xs in itertools.product(*(range(q.num_inputs) for q in parties)):
        box_in: Dict[int, Dict[int, int]] = {b: {} for b in boxes}
        for p, party, x in zip(responders, parties, xs):
            bits = party.box_inputs.get((x, symbols[p]), ())
            if len(bits) != len(held[p]):
                raise ArgumentError(f"Party {topology.parties[p]} lacks PR-box inputs for input {x}, symbols {symbols[p]}")
            for b, bit in zip(held[p], bits):
                box_in[b][p] = bit
        for box_outputs in itertools.product((0, 1), repeat=2 * len(boxes)):
            weight = 1.0
            out_of: Dict[Tuple[int, int], int] = {}
            for j, b in enumerate(boxes):
                u, v = (topology.party_index(name) for name in topology.sources[b])
                outs = (box_outputs[2 * j], box_outputs[2 * j + 1])
                weight *= _pr_probability(outs, (box_in[b][u], box_in[b][v]))
                out_of[(b, u)], out_of[(b, v)] = outs
            if weight == 0.0:
                continue
            outputs = []
            for p, party, x in zip(responders, parties, xs):
                key = (x, symbols[p], tuple(out_of[(b, p)] for b in held[p]))
                if key not in party.responses:
                    raise ArgumentError(f"Party {topology.parties[p]} has no response for {key}")
                outputs.append(party.responses[key])
            table[xs + tuple(outputs)] += weight
    return table


def behavior_from_hybrid(strategy: HybridStrategy) -> Behavior:
    """
    Average quantum, PR-box and deterministic responses over classical priors.

    Args:
        strategy: hybrid strategy on a topology

    Returns:
        Behavior in topology party order
    """
    topology = strategy.topology
    classical = [i for i, s in enumerate(strategy.sources) if isinstance(s, ClassicalSource)]
    boxes = [i for i, s in enumerate(strategy.sources) if isinstance(s, PRBoxSource)]
    quantum_parties = [p for p, party in enumerate(strategy.parties) if isinstance(party, QuantumParty)]
    responders = [p for p, party in enumerate(strategy.parties) if isinstance(party, ResponseParty)]

    qubit_count = sum(s.state.num_qubits for s in strategy.sources if isinstance(s, QuantumSource))
    qubit_count += sum(
        sum(1 for name in topology.sources[i] if topology.party_index(name) in quantum_parties)
        for i in classical if strategy.sources[i].embed_as_qubits
    )
    limit = NetcertConfig.get_instance().MAX_QUBITS
    if qubit_count > limit:
        raise ArgumentError(f"Strategy needs {qubit_count} qubits, limit is {limit}")

    scenario = strategy.scenario()
    total = np.zeros(scenario.input_shape + scenario.output_shape)
    logger.debug(f"Hybrid behavior: {len(classical)} classical sources, {len(boxes)} PR boxes, {qubit_count} qubits")

    priors = [strategy.sources[i].prior for i in classical]
    for symbols in itertools.product(*(range(len(p)) for p in priors)):
        weight = float(np.prod([priors[j][s] for j, s in enumerate(symbols)])) if priors else 1.0
        if weight == 0.0:
            continue
        assignment = dict(zip(classical, symbols))
        received = {}
        for p in range(len(topology.parties)):
            name = topology.parties[p]
            embedded_ok = isinstance(strategy.parties[p], ResponseParty)
            received[p] = tuple(
                assignment[i] for i in topology.party_sources(name)
                if i in assignment and (embedded_ok or not strategy.sources[i].embed_as_qubits)
            )

        parts, axes_parties = [], []
        if quantum_parties:
            densities = []
            for i, source in enumerate(strategy.sources):
                owners = [topology.party_index(name) for name in topology.sources[i]]
                if isinstance(source, QuantumSource):
                    densities.append((_density(source.state), [quantum_parties.index(o) for o in owners]))
                elif isinstance(source, ClassicalSource) and source.embed_as_qubits:
                    holders = [quantum_parties.index(o) for o in owners if o in quantum_parties]
                    if holders:
                        state = basis_state([assignment[i]] * len(holders))
                        densities.append((state.density(), holders))
            if not densities:
                raise ArgumentError("Quantum parties receive no quantum systems")
            operators = []
            for qp, p in enumerate(quantum_parties):
                dim = 2 ** sum(1 for _, owners in densities for o in owners if o == qp)
                operators.append(_party_operator(strategy.parties[p], received[p], dim))
            parts.append(_born_table(densities, operators))
            axes_parties.append(quantum_parties)
        if responders:
            parts.append(_response_table(strategy, responders, received, boxes))
            axes_parties.append(responders)

        joint = parts[0] if len(parts) == 1 else np.multiply.outer(parts[0], parts[1])
        k = len(topology.parties)
        # joint axes: (x, a) of the quantum group, then (x, a) of the response group
        input_axes, output_axes, offset = {}, {}, 0
        for group in axes_parties:
            for j, p in enumerate(group):
                input_axes[p] = offset + j
                output_axes[p] = offset + len(group) + j
            offset += 2 * len(group)
        permutation = [input_axes[p] for p in range(k)] + [output_axes[p] for p in range(k)]
        total += weight * joint.transpose(permutation)

    return Behavior(scenario, total)


def behavior_from_quantum(topology: NetworkTopology, states: Sequence[State],
                          measurements: Sequence[Sequence[ProjectiveMeasurement]]) -> Behavior:
    """
    Born-rule behavior of a fully quantum network.

    Args:
        topology: network; qubit i of source j goes to topology.sources[j][i]
        states: one PureState or MixedState per source
        measurements: per party, one ProjectiveMeasurement per input

    Returns:
        Behavior with P(a|x) = Tr[(Pi_a1|x1 (x) ... ) rho] in party order
    """
    strategy = HybridStrategy(
        topology=topology,
        sources=tuple(QuantumSource(s) for s in states),
        parties=tuple(QuantumParty.unconditional(m) for m in measurements),
    )
    return behavior_from_hybrid(strategy)


def behavior_from_pr_chain(n: int, classical_positions: Sequence[int]) -> Behavior:
    """Behavior of the PR-box chain strategy (source labels 1..n-1)."""
    from services.strategies import pr_chain_strategy

    return behavior_from_hybrid(pr_chain_strategy(n, classical_positions))


# Table manipulation

def check_no_signaling(behavior: Behavior, tol: Optional[float] = None) -> List[SignalingViolation]:
    """
    List every joint marginal that varies with the input of an outside party.

    Args:
        behavior: behavior to check
        tol: allowed deviation; defaults to the configured tolerance

    Returns:
        Violations ordered by marginal size, then party order
    """
    tol = resolve_tolerance(tol)
    k = behavior.num_parties
    names = behavior.scenario.names
    violations = []
    for size in range(1, k):
        for subset in itertools.combinations(range(k), size):
            dropped = tuple(k + q for q in range(k) if q not in subset)
            marginal = behavior.table.sum(axis=dropped)
            for q in range(k):
                if q in subset:
                    continue
                reference = np.take(marginal, [0], axis=q)
                deviation = float(np.abs(marginal - reference).max())
                if deviation > tol:
                    violations.append(SignalingViolation(
                        parties=[names[p] for p in subset], depends_on=names[q], deviation=deviation
                    ))
    if violations:
        logger.warning(f"Behavior violates no-signaling in {len(violations)} marginal constraints")
    return violations


def marginalize_behavior(behavior: Behavior, drop_party: str, fixed_input: int) -> Behavior:
    """
    Remove a party by fixing its input and summing over its outputs.

    Args:
        behavior: parent behavior
        drop_party: name of the party to remove
        fixed_input: input the dropped party is held at
    """
    names = behavior.scenario.names
    if drop_party not in names:
        raise ArgumentError(f"Unknown party '{drop_party}'")
    if behavior.num_parties < 2:
        raise ArgumentError("Cannot drop the only party of a behavior")
    p = names.index(drop_party)
    if not 0 <= fixed_input < behavior.scenario.parties[p].inputs:
        raise ArgumentError(f"Input {fixed_input} out of range for party {drop_party}")
    k = behavior.num_parties
    table = np.take(behavior.table, fixed_input, axis=p)
    table = table.sum(axis=k - 1 + p)
    scenario = Scenario(parties=[spec for i, spec in enumerate(behavior.scenario.parties) if i != p])
    return Behavior(scenario, table, behavior.tol)


def bits_as_settings(behavior: Behavior, party: str) -> Behavior:
    """
    Replace a single-setting party with 2^m outcomes by an m-setting
    dichotomic party whose setting y reads bit y of the outcome.
    """
    names = behavior.scenario.names
    if party not in names:
        raise ArgumentError(f"Unknown party '{party}'")
    p = names.index(party)
    spec = behavior.scenario.parties[p]
    width = int(round(np.log2(spec.outputs)))
    if spec.inputs != 1 or 2 ** width != spec.outputs or width < 1:
        raise ArgumentError(f"Party {party} must have one input and 2^m outputs")
    k = behavior.num_parties
    table = np.take(behavior.table, 0, axis=p)
    table = np.moveaxis(table, k - 1 + p, -1)
    table = table.reshape(table.shape[:-1] + (2,) * width)
    bit_axes = list(range(table.ndim - width, table.ndim))
    per_bit = [table.sum(axis=tuple(a for a in bit_axes if a != bit_axes[y])) for y in range(width)]
    stacked = np.stack(per_bit, axis=0)          # (m, x-others, a-others, 2)
    stacked = np.moveaxis(stacked, 0, p)          # input axis back at position p
    stacked = np.moveaxis(stacked, -1, k + p)     # output axis back at position k + p
    parties = list(behavior.scenario.parties)
    parties[p] = spec.model_copy(update={"inputs": width, "outputs": 2})
    return Behavior(Scenario(parties=parties), stacked, behavior.tol)


def relabel_inputs(behavior: Behavior, party: str, mapping: Sequence[int]) -> Behavior:
    """New behavior whose party input y behaves like the old input mapping[y]."""
    names = behavior.scenario.names
    if party not in names:
        raise ArgumentError(f"Unknown party '{party}'")
    p = names.index(party)
    spec = behavior.scenario.parties[p]
    if not mapping or any(not 0 <= m < spec.inputs for m in mapping):
        raise ArgumentError(f"Input mapping {list(mapping)} out of range for party {party}")
    table = np.take(behavior.table, list(mapping), axis=p)
    parties = list(behavior.scenario.parties)
    parties[p] = spec.model_copy(update={"inputs": len(mapping)})
    return Behavior(Scenario(parties=parties), table, behavior.tol)


def restrict_behavior(behavior: Behavior, parties: Sequence[str],
                      shape: Optional[Sequence[Tuple[int, int]]] = None,
                      fixed_inputs: Optional[Mapping[str, int]] = None) -> Behavior:
    """
    Behavior of a party subset, in the given order.

    Args:
        behavior: parent behavior
        parties: kept parties, in their new order
        shape: (inputs, outputs) per kept party; a party with more inputs
            keeps its first ones, other mismatches are left to the caller
        fixed_inputs: input each dropped party is held at (default 0)
    """
    names = behavior.scenario.names
    unknown = [p for p in parties if p not in names]
    if unknown or len(set(parties)) != len(parties) or not parties:
        raise ArgumentError(f"Cannot restrict parties {names} to {list(parties)}")
    fixed_inputs = fixed_inputs or {}
    for name in names:
        if name not in parties:
            behavior = marginalize_behavior(behavior, name, fixed_inputs.get(name, 0))

    k = behavior.num_parties
    order = [behavior.scenario.names.index(p) for p in parties]
    table = np.transpose(behavior.table, order + [k + i for i in order])
    scenario = Scenario(parties=[behavior.scenario.parties[i] for i in order])
    behavior = Behavior(scenario, table, behavior.tol)

    if shape is not None:
        if len(shape) != len(parties):
            raise ArgumentError(f"Expected {len(parties)} (inputs, outputs) pairs, got {len(shape)}")
        for spec, (inputs, _) in zip(scenario.parties, shape):
            if spec.inputs > inputs:
                behavior = relabel_inputs(behavior, spec.name, range(inputs))
    return behavior


def uniform_behavior(scenario: Scenario) -> Behavior:
    """Every output equally likely for every input."""
    shape = scenario.input_shape + scenario.output_shape
    return Behavior(scenario, np.full(shape, 1.0 / np.prod(scenario.output_shape)))


def deterministic_behavior(scenario: Scenario, outputs: Optional[Sequence[int]] = None) -> Behavior:
    """Constant outputs regardless of inputs (all zeros by default)."""
    outputs = tuple(outputs) if outputs is not None else (0,) * len(scenario.parties)
    table = np.zeros(scenario.input_shape + scenario.output_shape)
    table[(Ellipsis,) + outputs] = 1.0
    return Behavior(scenario, table)
