"""
Canonical quantum strategies for the witness families, their closed-form
predicted values, and the PR-box chain strategy that saturates the
no-signaling hybrid chain bound.

Sources are generalized EPR states cos(theta)|00> + sin(theta)|11>, mixed
with white noise when their visibility is below one. A source listed in
classical_sources (1-based) is replaced by a uniform bit copied into one
qubit per receiver.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy.optimize import minimize_scalar

from config.config import NetcertConfig
from models.network_models import NetworkTopology
from models.strategy_models import StrategyDocument
from models.witness_models import WitnessValue
from services.behaviors import (
    Behavior, ClassicalSource, HybridStrategy, PRBoxSource, QuantumParty, QuantumSource, ResponseParty,
    behavior_from_hybrid,
)
from services.network_model import make_topology
from services.quantum_core import (
    SIGMA_X, SIGMA_Z, ProjectiveMeasurement, PureState, apply_werner_noise, expectation, generalized_epr,
    pauli, pauli_string, projective_basis, tensor_product, xy_observable, xz_observable,
)
from services.witnesses import evaluate, svetlichny_coefficients, svetlichny_conditioning
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)

WITNESS_OF_STRATEGY = {
    "bilocal": "bilocal_ij",
    "chain_ij": "chain_ij",
    "chain_bn": "linear_bn",
    "linear_b3": "linear_b3",
    "star_ij": "star_ij",
    "star_svetlichny": "star_svetlichny",
}


@dataclass(frozen=True)
class CanonicalStrategy:
    """A canonical strategy with the parameters it was built from"""
    family: str
    topology: NetworkTopology
    thetas: Tuple[float, ...]
    visibilities: Tuple[float, ...]
    varthetas: Tuple[float, ...]
    strategy: HybridStrategy
    predicted_value: Optional[float]
    classical_sources: Tuple[int, ...] = ()
    phases: Dict[str, float] = field(default_factory=dict)
    conditioning: Optional[Dict[int, List[Tuple[int, int]]]] = None

    @property
    def witness_family(self) -> str:
        return WITNESS_OF_STRATEGY[self.family]

    @property
    def n(self) -> int:
        """Size parameter of the witness this strategy targets."""
        if self.family in ("star_ij", "star_svetlichny"):
            return len(self.topology.parties) - 1
        return len(self.topology.parties)

    def behavior(self) -> Behavior:
        return behavior_from_hybrid(self.strategy)

    def to_document(self) -> StrategyDocument:
        return StrategyDocument(
            family=self.family,
            n=self.n,
            thetas=list(self.thetas),
            visibilities=list(self.visibilities),
            varthetas=list(self.varthetas),
            classical_sources=list(self.classical_sources),
            phases=dict(self.phases),
            predicted_value=self.predicted_value,
            topology=self.topology.model_dump(),
        )

    @classmethod
    def from_document(cls, document: StrategyDocument) -> 'CanonicalStrategy':
        """
        Rebuild a strategy from its written parameters.

        Measurement angles come from the document; the Svetlichny phase is
        re-derived from the source angles by the same search.
        """
        canonical = build_strategy(
            document.family, document.thetas, document.visibilities, document.varthetas or None,
            document.classical_sources,
        )
        if canonical.n != document.n:
            raise ArgumentError(f"Strategy document declares n={document.n} but its angles give n={canonical.n}")
        if document.topology and document.topology.get("parties") != canonical.topology.parties:
            raise ArgumentError(f"Strategy document topology does not match a {document.family} strategy")
        return canonical


# Shared helpers

def _check_angles(thetas: Sequence[float]) -> Tuple[float, ...]:
    thetas = tuple(float(t) for t in thetas)
    for theta in thetas:
        if not 0.0 <= theta <= math.pi / 2:
            raise ArgumentError(f"Source angle {theta} outside [0, pi/2]")
    return thetas


def _check_visibilities(visibilities: Optional[Sequence[float]], count: int) -> Tuple[float, ...]:
    if visibilities is None:
        return (1.0,) * count
    visibilities = tuple(float(v) for v in visibilities)
    if len(visibilities) == 1 and count > 1:
        visibilities = visibilities * count
    if len(visibilities) != count:
        raise ArgumentError(f"Expected {count} visibilities, got {len(visibilities)}")
    for v in visibilities:
        if not 0.0 <= v <= 1.0:
            raise ArgumentError(f"Visibility {v} outside [0, 1]")
    return visibilities


def _check_classical(classical_sources: Sequence[int], count: int) -> Tuple[int, ...]:
    classical = tuple(sorted({int(s) for s in classical_sources}))
    if any(not 1 <= s <= count for s in classical):
        raise ArgumentError(f"Classical source labels must lie in 1..{count}, got {list(classical)}")
    return classical


def _sources(thetas, visibilities, classical) -> Tuple:
    sources = []
    for index, (theta, v) in enumerate(zip(thetas, visibilities), start=1):
        if index in classical:
            sources.append(ClassicalSource((0.5, 0.5), embed_as_qubits=True))
            continue
        state = generalized_epr(theta)
        sources.append(QuantumSource(state if v >= 1.0 else apply_werner_noise(state, v)))
    return tuple(sources)


def _measure(matrix: np.ndarray) -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_observable(matrix)


def _xz_pair(vartheta: float) -> List[ProjectiveMeasurement]:
    return [_measure(xz_observable(vartheta, 1).matrix), _measure(xz_observable(vartheta, -1).matrix)]


def _resolve_vartheta(vartheta: Optional[float], family: str, thetas, visibilities) -> float:
    if vartheta is None:
        return optimal_vartheta(family, thetas, visibilities)
    return float(vartheta)


def optimal_vartheta(family: str, thetas: Sequence[float], visibilities: Optional[Sequence[float]] = None) -> float:
    """
    Measurement angle maximizing the predicted value of a canonical strategy.

    Every supported closed form reads a*cos(vartheta) + b*sin(vartheta), so
    the optimum is atan2(b, a).

    Args:
        family: bilocal, star_ij, chain_ij or linear_b3
        thetas: source angles
        visibilities: source visibilities (default all 1)
    """
    thetas = _check_angles(thetas)
    visibilities = _check_visibilities(visibilities, len(thetas))
    sines = [math.sin(2 * t) for t in thetas]
    if family == "bilocal":
        return math.atan2(math.sqrt(math.prod(sines)), 1.0)
    if family == "linear_b3":
        return math.atan2(math.prod(sines), 1.0)
    if family == "star_ij":
        return math.atan2(math.prod(sines) ** (1 / len(thetas)), 1.0)
    if family == "chain_ij":
        n = len(thetas) + 1
        if n < 3 or n % 2 == 0:
            raise ArgumentError(f"chain_ij needs an odd number of parties >= 3, got {n}")
        k = (n + 1) // 2
        z_part = math.prod(_chain_z_visibilities(visibilities)) ** (1 / k)
        x_part = math.prod(v * s for v, s in zip(visibilities, sines)) ** (1 / k)
        return math.atan2(x_part, z_part)
    raise ArgumentError(f"No closed-form optimal angle for family '{family}'")


# Bilocal and tripartite linear

def canonical_bilocal(theta1: float, theta2: float, vartheta: Optional[float] = None,
                      visibilities: Optional[Sequence[float]] = None,
                      classical_sources: Sequence[int] = ()) -> CanonicalStrategy:
    """
    Bilocal strategy: A and C measure cos(vt) Z +/- sin(vt) X, B measures in the Bell basis.

    Returns:
        CanonicalStrategy predicting sqrt(v1 v2) (cos vt + sin vt sqrt(sin 2t1 sin 2t2))
    """
    thetas = _check_angles((theta1, theta2))
    visibilities = _check_visibilities(visibilities, 2)
    classical = _check_classical(classical_sources, 2)
    vartheta = _resolve_vartheta(vartheta, "bilocal", thetas, visibilities)

    topology = make_topology("chain", 3)
    parties = (
        QuantumParty.unconditional(_xz_pair(vartheta)),
        QuantumParty.unconditional([projective_basis("bell")]),
        QuantumParty.unconditional(_xz_pair(vartheta)),
    )
    strategy = HybridStrategy(topology, _sources(thetas, visibilities, classical), parties)
    predicted = None
    if not classical:
        s = math.sin(2 * thetas[0]) * math.sin(2 * thetas[1])
        predicted = math.sqrt(visibilities[0] * visibilities[1]) * (math.cos(vartheta) + math.sin(vartheta) * math.sqrt(s))
    return CanonicalStrategy("bilocal", topology, thetas, visibilities, (vartheta,), strategy, predicted, classical)


def canonical_linear_b3(theta1: float, theta2: float, vartheta: Optional[float] = None,
                        visibilities: Optional[Sequence[float]] = None,
                        classical_sources: Sequence[int] = ()) -> CanonicalStrategy:
    """Tripartite linear strategy: C measures Z, X and -Z so every Bell outcome gets a CHSH pair."""
    thetas = _check_angles((theta1, theta2))
    visibilities = _check_visibilities(visibilities, 2)
    classical = _check_classical(classical_sources, 2)
    vartheta = _resolve_vartheta(vartheta, "linear_b3", thetas, visibilities)

    topology = make_topology("chain", 3)
    parties = (
        QuantumParty.unconditional(_xz_pair(vartheta)),
        QuantumParty.unconditional([projective_basis("bell")]),
        QuantumParty.unconditional([_measure(SIGMA_Z), _measure(SIGMA_X), _measure(-SIGMA_Z)]),
    )
    strategy = HybridStrategy(topology, _sources(thetas, visibilities, classical), parties)
    predicted = None
    if not classical:
        s = math.sin(2 * thetas[0]) * math.sin(2 * thetas[1])
        predicted = 2 * visibilities[0] * visibilities[1] * (math.cos(vartheta) + math.sin(vartheta) * s)
    return CanonicalStrategy("linear_b3", topology, thetas, visibilities, (vartheta,), strategy, predicted, classical)


# Chains

def _chain_z_visibilities(visibilities: Sequence[float]) -> List[float]:
    """Visibilities of the sources read through Z on both ends; the right source of each odd middle is skipped."""
    n = len(visibilities) + 1
    skipped = set(range(3, n - 1, 2))
    return [v for j, v in enumerate(visibilities, start=1) if j not in skipped]


def _chain_ij_parties(n: int, vartheta: float) -> Tuple[QuantumParty, ...]:
    parties = []
    for i in range(1, n + 1):
        if i in (1, n):
            parties.append(QuantumParty.unconditional(_xz_pair(vartheta)))
        elif i % 2 == 0:
            left = SIGMA_Z if i == 2 else pauli("I")
            parties.append(QuantumParty.unconditional([
                _measure(tensor_product([left, SIGMA_Z])),
                _measure(pauli_string("XX")),
            ]))
        else:
            z_part = math.cos(vartheta) * pauli_string("ZI")
            x_part = math.sin(vartheta) * pauli_string("XX")
            parties.append(QuantumParty.unconditional([_measure(z_part + x_part), _measure(z_part - x_part)]))
    return tuple(parties)


def _bn_vartheta(thetas: Sequence[float], last_bit: int) -> float:
    """
    Endpoint angle for one group of central outcomes.

    Each branch leaves the end parties in a state a|X> + b|X'> with X' the
    complement of the source pattern X; the angle matches the least
    entangled branch, tan(vt) = min 2ab/(a^2+b^2).
    """
    def alpha(bit, theta):
        return math.cos(theta) if bit == 0 else math.sin(theta)

    if len(thetas) == 1:
        patterns = [(0,)]
    else:
        patterns = [(0,) + rest + (last_bit,) for rest in itertools.product((0, 1), repeat=len(thetas) - 2)]
    best = math.inf
    for pattern in patterns:
        a = math.prod(alpha(bit, t) ** 2 for bit, t in zip(pattern, thetas))
        b = math.prod(alpha(1 - bit, t) ** 2 for bit, t in zip(pattern, thetas))
        kappa = 2 * math.sqrt(a * b) / (a + b) if a + b > 0 else 0.0
        best = min(best, kappa)
    return math.atan(best)


def _chain_bn_parties(n: int, vt0: float, vt1: float) -> Tuple[QuantumParty, ...]:
    first = QuantumParty.unconditional([_measure(SIGMA_Z), _measure(SIGMA_X)])
    last_measurements = _xz_pair(vt0)
    if n > 2:
        last_measurements += _xz_pair(math.pi - vt1)
    middles = [QuantumParty.unconditional([projective_basis("bell")]) for _ in range(n - 2)]
    return (first, *middles, QuantumParty.unconditional(last_measurements))


def canonical_chain(thetas: Sequence[float], variant: str = "ij", varthetas: Optional[Sequence[float]] = None,
                    visibilities: Optional[Sequence[float]] = None,
                    classical_sources: Sequence[int] = ()) -> CanonicalStrategy:
    """
    Chain strategy on n = len(thetas) + 1 parties.

    Args:
        thetas: one angle per source
        variant: "ij" for the nonlinear chain witness (n odd), "bn" for the
            linear chain inequality with Bell-basis middles
        varthetas: measurement angle (ij) or endpoint angles (bn, one or two);
            closed-form optima when omitted
        visibilities: per-source visibilities
        classical_sources: 1-based sources replaced by classical bits

    Returns:
        CanonicalStrategy; family chain_ij or chain_bn
    """
    thetas = _check_angles(thetas)
    n = len(thetas) + 1
    visibilities = _check_visibilities(visibilities, n - 1)
    classical = _check_classical(classical_sources, n - 1)
    sources = _sources(thetas, visibilities, classical)
    topology = make_topology("chain", n)
    sines = [math.sin(2 * t) for t in thetas]

    if variant == "ij":
        if n < 3 or n % 2 == 0:
            raise ArgumentError(f"The ij chain needs an odd number of parties >= 3, got {n}")
        vartheta = _resolve_vartheta(varthetas[0] if varthetas else None, "chain_ij", thetas, visibilities)
        strategy = HybridStrategy(topology, sources, _chain_ij_parties(n, vartheta))
        predicted = None
        if not classical:
            k = (n + 1) // 2
            z_part = math.prod(_chain_z_visibilities(visibilities)) ** (1 / k)
            x_part = math.prod(v * s for v, s in zip(visibilities, sines)) ** (1 / k)
            predicted = math.cos(vartheta) * z_part + math.sin(vartheta) * x_part
        return CanonicalStrategy("chain_ij", topology, thetas, visibilities, (vartheta,), strategy, predicted, classical)

    if variant != "bn":
        raise ArgumentError(f"Unknown chain variant '{variant}'")
    if varthetas:
        vt0 = float(varthetas[0])
        vt1 = float(varthetas[1]) if len(varthetas) > 1 else vt0
    else:
        vt0 = _bn_vartheta(thetas, 0)
        vt1 = _bn_vartheta(thetas, 1) if n > 2 else vt0
    strategy = HybridStrategy(topology, sources, _chain_bn_parties(n, vt0, vt1))
    predicted = None
    if not classical:
        v_all = math.prod(visibilities)
        x_part = v_all * math.prod(sines)
        if n == 2:
            predicted = 2 * (v_all * math.cos(vt0) + math.sin(vt0) * x_part)
        else:
            ends = visibilities[0] * visibilities[-1] * math.cos(2 * thetas[0]) * math.cos(2 * thetas[-1])
            predicted = (math.cos(vt0) * (v_all + ends) + math.cos(vt1) * (v_all - ends)
                         + (math.sin(vt0) + math.sin(vt1)) * x_part)
    return CanonicalStrategy("chain_bn", topology, thetas, visibilities, (vt0, vt1), strategy, predicted, classical)


# Stars

def _svetlichny_score(alpha: float, gamma: float, delta: float, n: int) -> float:
    """Conditional score on gamma|0..0> + delta|1..1> with the branch-1 phase shifted by alpha."""
    amplitudes = np.zeros(2 ** n, dtype=complex)
    amplitudes[0], amplitudes[-1] = gamma, delta
    norm = np.linalg.norm(amplitudes)
    if norm == 0:
        return 0.0
    state = PureState(amplitudes / norm, n)
    score = 0.0
    for xs, coefficient in svetlichny_coefficients(n).items():
        factors = [xy_observable(x * math.pi / 2 + (alpha if j == 0 else 0.0)).matrix for j, x in enumerate(xs)]
        score += coefficient * expectation(state, tensor_product(factors))
    return score


def _optimal_phase(gamma: float, delta: float, n: int) -> float:
    """
    Phase of branch 1 maximizing the conditional Svetlichny score.

    Bounded Brent search (scipy's "bounded" method) over one period
    [-5pi/4, 3pi/4), stopping at NETCERT_PHASE_XTOL. Brent replaces a plain
    golden-section search; both converge to the same optimum here.
    """
    result = minimize_scalar(
        lambda alpha: -_svetlichny_score(alpha, gamma, delta, n),
        bounds=(-5 * math.pi / 4, 3 * math.pi / 4),
        method="bounded",
        options={"xatol": NetcertConfig.get_instance().PHASE_XTOL},
    )
    return float(result.x)


def _branch_measurement(j: int, setting: int, alpha: float) -> ProjectiveMeasurement:
    """Setting 2c + x of branch j: the x-th x-y plane observable rotated by the outcome correction U_j(c)."""
    c, x = divmod(setting, 2)
    phi = x * math.pi / 2 + (alpha if j == 0 else 0.0)
    correction = pauli("Z" if j == 0 else "X") if c else pauli("I")
    observable = correction.conj().T @ xy_observable(phi).matrix @ correction
    return _measure(observable)


def _svetlichny_phase_table(thetas: Sequence[float]) -> Dict[str, float]:
    """
    Branch-1 phase shared by every central outcome.

    Only outcome 0 is optimized; its conditional branch state is
    prod cos|0..0> + prod sin|1..1>. The other outcomes reuse the phase
    through the outcome corrections of the branch settings.
    """
    n = len(thetas)
    gamma = math.prod(math.cos(t) for t in thetas)
    delta = math.prod(math.sin(t) for t in thetas)
    return {"alpha": _optimal_phase(gamma, delta, n)}


def canonical_star(thetas: Sequence[float], vartheta: Optional[float] = None, linear: bool = False,
                   visibilities: Optional[Sequence[float]] = None,
                   classical_sources: Sequence[int] = ()) -> CanonicalStrategy:
    """
    Star strategy with branches A1..An and center B.

    The nonlinear variant gives the branches cos(vt) Z +/- sin(vt) X and the
    center Z^n and X^n. The linear variant measures the center in the GHZ
    basis and gives each branch four x-y plane settings, one pair per value
    of its bit of the central outcome.

    Args:
        thetas: one angle per branch source
        vartheta: branch angle of the nonlinear variant
        linear: build the Svetlichny-star strategy instead
        visibilities: per-source visibilities
        classical_sources: 1-based sources replaced by classical bits
    """
    thetas = _check_angles(thetas)
    n = len(thetas)
    visibilities = _check_visibilities(visibilities, n)
    classical = _check_classical(classical_sources, n)
    sources = _sources(thetas, visibilities, classical)
    topology = make_topology("star", n)
    sines = [math.sin(2 * t) for t in thetas]

    if not linear:
        vartheta = _resolve_vartheta(vartheta, "star_ij", thetas, visibilities)
        center = QuantumParty.unconditional([_measure(pauli_string("Z" * n)), _measure(pauli_string("X" * n))])
        parties = tuple(QuantumParty.unconditional(_xz_pair(vartheta)) for _ in range(n)) + (center,)
        strategy = HybridStrategy(topology, sources, parties)
        predicted = None
        if not classical:
            predicted = math.prod(visibilities) ** (1 / n) * (
                math.cos(vartheta) + math.sin(vartheta) * math.prod(sines) ** (1 / n)
            )
        return CanonicalStrategy("star_ij", topology, thetas, visibilities, (vartheta,), strategy, predicted, classical)

    if n < 2:
        raise ArgumentError(f"The Svetlichny star needs at least 2 branches, got {n}")
    phases = _svetlichny_phase_table(thetas)
    alpha = phases["alpha"]
    logger.debug(f"Svetlichny star phase {alpha:.12f} for n={n}")
    branches = tuple(
        QuantumParty.unconditional([_branch_measurement(j, s, alpha) for s in range(4)]) for j in range(n)
    )
    center = QuantumParty.unconditional([projective_basis("ghz", n)])
    strategy = HybridStrategy(topology, sources, branches + (center,))
    predicted = None
    if not classical:
        predicted = 2 ** (n - 1) * math.sqrt(2) * math.cos(alpha + math.pi / 4) * math.prod(
            v * s for v, s in zip(visibilities, sines)
        )
    return CanonicalStrategy(
        "star_svetlichny", topology, thetas, visibilities, (), strategy, predicted, classical,
        phases=phases, conditioning=svetlichny_conditioning(n),
    )


# PR-box chain

def pr_chain_strategy(n: int, classical_positions: Sequence[int]) -> HybridStrategy:
    """
    PR boxes on the quantum positions of a chain, uniform bits on the classical ones.

    Odd parties that receive only classical systems output 0 on input 0 and
    their left (else right) bit on input 1. The remaining odd parties are
    paired with even neighbours through a maximum matching on the PR-box
    sources; each pair feeds its inputs into the shared box and outputs its
    end of it. Boxes outside the matching receive input 0.

    Args:
        n: chain length (>= 2)
        classical_positions: 1-based classical source labels
    """
    if n < 2:
        raise ArgumentError(f"A chain needs at least 2 parties, got {n}")
    if not classical_positions:
        raise ArgumentError("The PR-box chain needs at least one classical source")
    if len(set(classical_positions)) != len(classical_positions):
        raise ArgumentError(f"Classical positions repeat: {list(classical_positions)}")
    classical = set(_check_classical(classical_positions, n - 1))
    topology = make_topology("chain", n)
    sources = tuple(
        ClassicalSource((0.5, 0.5)) if j in classical else PRBoxSource() for j in range(1, n)
    )

    def incident(party: int) -> List[int]:
        return [j for j in (party - 1, party) if 1 <= j <= n - 1]

    isolated = {p for p in range(1, n + 1, 2) if all(j in classical for j in incident(p))}
    graph = nx.Graph()
    odd_nodes = [p for p in range(1, n + 1, 2) if p not in isolated]
    graph.add_nodes_from(odd_nodes)
    graph.add_nodes_from(range(2, n + 1, 2))
    for j in range(1, n):
        if j not in classical:
            graph.add_edge(j, j + 1, source=j)
    matching = nx.bipartite.maximum_matching(graph, top_nodes=odd_nodes)
    partner_box = {}
    for p, q in matching.items():
        partner_box[p] = graph.edges[p, q]["source"]
    logger.debug(f"PR chain n={n}: isolated odd parties {sorted(isolated)}, matched boxes {sorted(set(partner_box.values()))}")

    parties = []
    for p in range(1, n + 1):
        own_classical = [j for j in incident(p) if j in classical]
        own_boxes = [j for j in incident(p) if j not in classical]
        shared = partner_box.get(p)
        reads_bit = p % 2 == 1 and n % 2 == 1 and shared is None and bool(own_classical)
        responses, box_inputs = {}, {}
        for x in (0, 1):
            for symbols in itertools.product((0, 1), repeat=len(own_classical)):
                box_inputs[(x, symbols)] = tuple(x if j == shared else 0 for j in own_boxes)
                for outs in itertools.product((0, 1), repeat=len(own_boxes)):
                    if shared is not None:
                        out = outs[own_boxes.index(shared)]
                    elif reads_bit:
                        out = symbols[0] if x == 1 else 0
                    else:
                        out = 0
                    responses[(x, symbols, outs)] = out
        parties.append(ResponseParty(2, 2, responses, box_inputs))
    return HybridStrategy(topology, sources, tuple(parties))


# Dispatch

def build_strategy(family: Union[str, StrategyDocument], thetas: Sequence[float] = (),
                   visibilities: Optional[Sequence[float]] = None, varthetas: Optional[Sequence[float]] = None,
                   classical_sources: Sequence[int] = ()) -> CanonicalStrategy:
    """Construct the canonical strategy of a family from its source angles, or from a strategy document."""
    if isinstance(family, StrategyDocument):
        return CanonicalStrategy.from_document(family)
    vartheta = varthetas[0] if varthetas else None
    if family in ("bilocal", "linear_b3"):
        if len(thetas) != 2:
            raise ArgumentError(f"{family} needs two source angles, got {len(thetas)}")
        builder = canonical_bilocal if family == "bilocal" else canonical_linear_b3
        return builder(thetas[0], thetas[1], vartheta, visibilities, classical_sources)
    if family in ("chain_ij", "chain_bn"):
        variant = family.split("_")[1]
        return canonical_chain(thetas, variant, varthetas, visibilities, classical_sources)
    if family in ("star_ij", "star_svetlichny"):
        return canonical_star(thetas, vartheta, family == "star_svetlichny", visibilities, classical_sources)
    raise ArgumentError(f"Unknown strategy family '{family}'")


def simulate_witness(canonical: CanonicalStrategy) -> WitnessValue:
    """Born-rule behavior of the strategy evaluated with its witness."""
    return evaluate(canonical.behavior(), canonical.witness_family, canonical.n, conditioning=canonical.conditioning)
