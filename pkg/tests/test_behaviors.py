import math

import numpy as np
import pytest

from models.behavior_models import Scenario
from services.behaviors import (
    Behavior, ClassicalSource, HybridStrategy, QuantumParty, QuantumSource, ResponseParty,
    SignRule, behavior_from_hybrid, behavior_from_pr_chain, behavior_from_quantum, bits_as_settings,
    check_no_signaling, correlator, deterministic_behavior, marginalize_behavior, relabel_inputs,
    restrict_behavior, uniform_behavior,
)
from services.network_model import make_topology
from services.quantum_core import (
    ProjectiveMeasurement, apply_werner_noise, generalized_epr, projective_basis, xy_observable, xz_observable,
)
from services.strategies import canonical_bilocal, canonical_chain
from utils.errors import ArgumentError

PARITY = SignRule.parity()


def _xz_measurements(vartheta):
    return [ProjectiveMeasurement.from_observable(xz_observable(vartheta, s)) for s in (1, -1)]


@pytest.fixture
def bilocal_behavior():
    """Canonical bilocal behavior at theta = vartheta = pi/4"""
    return canonical_bilocal(math.pi / 4, math.pi / 4, math.pi / 4).behavior()


@pytest.fixture
def chsh_scenario():
    return Scenario.from_shape(["A", "B"], [(2, 2), (2, 2)])


class TestBehavior:
    """Tests for behavior tables and documents"""

    def test_normalization_enforced(self, chsh_scenario):
        """Outputs must sum to one for every input"""
        with pytest.raises(ArgumentError):
            Behavior(chsh_scenario, np.full((2, 2, 2, 2), 0.5))

    def test_shape_enforced(self, chsh_scenario):
        """Table shape follows the scenario"""
        with pytest.raises(ArgumentError):
            Behavior(chsh_scenario, np.full((2, 2, 4), 0.25))

    def test_document_round_trip(self, bilocal_behavior):
        """Flat row-major probabilities rebuild the same table"""
        restored = Behavior.from_document(bilocal_behavior.to_document())
        assert np.array_equal(restored.table, bilocal_behavior.table)
        assert restored.scenario == bilocal_behavior.scenario

    def test_document_length_checked(self, bilocal_behavior):
        """Probability count must match the scenario"""
        document = bilocal_behavior.to_document()
        document.probabilities = document.probabilities[:-1]
        with pytest.raises(ArgumentError):
            Behavior.from_document(document)


class TestCorrelator:
    """Tests for correlators and sign rules"""

    def test_deterministic_zeros(self, chsh_scenario):
        """All-zero outputs give +1"""
        behavior = deterministic_behavior(chsh_scenario)
        assert correlator(behavior, (1, 1), (PARITY, PARITY)) == 1.0

    def test_uniform(self, chsh_scenario):
        """Uniform noise gives 0"""
        behavior = uniform_behavior(chsh_scenario)
        assert correlator(behavior, (0, 1), (PARITY, PARITY)) == pytest.approx(0.0, abs=1e-12)

    def test_bilocal_bit_correlator(self, bilocal_behavior):
        """A0 B^0 C0 of the canonical bilocal strategy is 1/2"""
        value = correlator(bilocal_behavior, (0, 0, 0), (PARITY, SignRule.bit(0), PARITY))
        assert value == pytest.approx(0.5, abs=1e-12)

    def test_outcome_rule_gives_probability(self, chsh_scenario):
        """An outcome rule with ignore rules reads a marginal probability"""
        behavior = uniform_behavior(chsh_scenario)
        value = correlator(behavior, (0, 0), (SignRule.outcome(1), SignRule.ignore()))
        assert value == pytest.approx(0.5)

    def test_bit_rule_is_big_endian(self):
        """Bit 0 is the most significant bit"""
        assert list(SignRule.bit(0).weights(4)) == [1.0, 1.0, -1.0, -1.0]
        assert list(SignRule.bit(1).weights(4)) == [1.0, -1.0, 1.0, -1.0]

    def test_setting_out_of_range(self, chsh_scenario):
        """Settings are checked against the scenario"""
        with pytest.raises(ArgumentError):
            correlator(uniform_behavior(chsh_scenario), (0, 2), (PARITY, PARITY))


class TestQuantumBehaviors:
    """Tests for Born-rule behaviors"""

    def test_chsh_from_quantum(self):
        """Maximally entangled pair with optimal angles reaches 2 sqrt 2"""
        topology = make_topology("chain", 2)
        alice = [ProjectiveMeasurement.from_observable(m) for m in (np.diag([1, -1]), np.array([[0, 1], [1, 0]]))]
        bob = _xz_measurements(math.pi / 4)
        behavior = behavior_from_quantum(topology, [generalized_epr(math.pi / 4)], [alice, bob])
        e = [[correlator(behavior, (x, y), (PARITY, PARITY)) for y in (0, 1)] for x in (0, 1)]
        assert e[0][0] + e[0][1] + e[1][0] - e[1][1] == pytest.approx(2 * math.sqrt(2), abs=1e-12)

    def test_entanglement_swapping_marginals(self, bilocal_behavior):
        """Bob's Bell outcomes are uniform"""
        bob = bilocal_behavior.table.sum(axis=(3, 5))[0, 0, 0]
        assert bob == pytest.approx([0.25] * 4, abs=1e-12)

    def test_quantum_behavior_is_no_signaling(self, bilocal_behavior):
        """Quantum behaviors respect no-signaling"""
        assert check_no_signaling(bilocal_behavior) == []

    def test_dimension_mismatch(self):
        """A party measuring on the wrong number of qubits is rejected"""
        topology = make_topology("chain", 2)
        with pytest.raises(ArgumentError):
            behavior_from_quantum(
                topology, [generalized_epr(0.3)], [[projective_basis("bell")], _xz_measurements(0.1)]
            )

    def test_random_quantum_behaviors_are_valid(self):
        """Random bilocal states and local measurements give normalized no-signaling tables"""
        rng = np.random.default_rng(11)
        topology = make_topology("chain", 3)
        for _ in range(100):
            states = [apply_werner_noise(generalized_epr(theta), v)
                      for theta, v in zip(rng.uniform(0, math.pi / 2, 2), rng.uniform(0, 1, 2))]
            ends = [[ProjectiveMeasurement.from_observable(xz_observable(a)),
                     ProjectiveMeasurement.from_observable(xy_observable(b))]
                    for a, b in rng.uniform(0, 2 * math.pi, (2, 2))]
            behavior = behavior_from_quantum(topology, states, [ends[0], [projective_basis("bell")], ends[1]])
            assert np.allclose(behavior.table.sum(axis=(3, 4, 5)), 1.0, atol=1e-12)
            assert check_no_signaling(behavior) == []


class TestHybridBehaviors:
    """Tests for classical, PR-box and mixed strategies"""

    def test_all_classical_constant_responses(self):
        """Responses that ignore everything give all correlators +1"""
        topology = make_topology("chain", 3)
        responses = {(x, s, ()): 0 for x in (0, 1) for s in ((0,), (1,))}
        middle = {(0, s, ()): 0 for s in ((0, 0), (0, 1), (1, 0), (1, 1))}
        strategy = HybridStrategy(
            topology,
            (ClassicalSource((0.5, 0.5)), ClassicalSource((0.5, 0.5))),
            (ResponseParty(2, 2, responses), ResponseParty(1, 4, middle), ResponseParty(2, 2, responses)),
        )
        behavior = behavior_from_hybrid(strategy)
        assert correlator(behavior, (1, 0, 1), (PARITY, SignRule.bit(0), PARITY)) == 1.0

    def test_missing_response_entry(self):
        """A response table must cover every input and symbol"""
        topology = make_topology("chain", 2)
        strategy = HybridStrategy(
            topology, (ClassicalSource((0.5, 0.5)),),
            (ResponseParty(2, 2, {(0, (0,), ()): 0}), ResponseParty(2, 2, {}))
        )
        with pytest.raises(ArgumentError):
            behavior_from_hybrid(strategy)

    def test_prior_must_be_normalized(self):
        """Classical priors sum to one"""
        with pytest.raises(ArgumentError):
            ClassicalSource((0.5, 0.6))

    def test_quantum_source_into_response_party(self):
        """Descriptors must match the systems a party receives"""
        topology = make_topology("chain", 2)
        with pytest.raises(ArgumentError):
            HybridStrategy(
                topology, (QuantumSource(generalized_epr(0.2)),),
                (QuantumParty.unconditional(_xz_measurements(0.1)), ResponseParty(2, 2, {}))
            )

    def test_pr_box_chsh(self):
        """A PR box between the last two parties reaches CHSH 4"""
        behavior = behavior_from_pr_chain(3, [1])
        b_and_c = marginalize_behavior(behavior, "A1", 0)
        e = [[correlator(b_and_c, (x, y), (PARITY, PARITY)) for y in (0, 1)] for x in (0, 1)]
        assert e[0][0] + e[0][1] + e[1][0] - e[1][1] == pytest.approx(4.0)

    def test_pr_chain_is_no_signaling(self):
        """PR boxes mixed with classical bits stay no-signaling"""
        assert check_no_signaling(behavior_from_pr_chain(5, [1])) == []

    def test_two_party_classical_chain_is_deterministic(self):
        """A single classical source gives correlators of modulus one"""
        behavior = behavior_from_pr_chain(2, [1])
        for x, y in ((0, 0), (0, 1), (1, 0), (1, 1)):
            assert abs(correlator(behavior, (x, y), (PARITY, PARITY))) == pytest.approx(1.0)

    def test_pr_chain_positions_validated(self):
        """Classical positions are source labels 1..n-1"""
        with pytest.raises(ArgumentError):
            behavior_from_pr_chain(3, [3])
        with pytest.raises(ArgumentError):
            behavior_from_pr_chain(3, [])


class TestTableOperations:
    """Tests for marginals, signaling checks and relabelings"""

    def test_signaling_detected(self):
        """Alice's marginal depending on Bob's input is reported"""
        scenario = Scenario.from_shape(["A", "B"], [(1, 2), (2, 2)])
        table = np.zeros((1, 2, 2, 2))
        table[0, 0, 0, 0] = 1.0
        table[0, 1, 1, 0] = 1.0
        violations = check_no_signaling(Behavior(scenario, table))
        assert [(v.parties, v.depends_on) for v in violations] == [(["A"], "B")]
        assert violations[0].deviation == pytest.approx(1.0)

    def test_drop_deterministic_party(self):
        """Dropping a constant party leaves the rest unchanged"""
        scenario = Scenario.from_shape(["A", "B", "C"], [(2, 2), (1, 2), (2, 2)])
        table = np.zeros((2, 1, 2, 2, 2, 2))
        table[:, :, :, :, 0, :] = 0.25
        constant = Behavior(scenario, table)
        reduced = marginalize_behavior(constant, "B", 0)
        assert reduced.scenario.names == ["A", "C"]
        assert np.allclose(reduced.table, 0.25)

    def test_drop_chain_end_party(self):
        """Dropping A4 of a four-party chain leaves a normalized three-party behavior"""
        behavior = canonical_chain([math.pi / 4] * 3, variant="bn").behavior()
        reduced = marginalize_behavior(behavior, "A4", 0)
        assert reduced.scenario.names == ["A1", "A2", "A3"]
        assert np.allclose(reduced.table.sum(axis=(3, 4, 5)), 1.0)

    def test_marginal_independent_of_fixed_input(self, bilocal_behavior):
        """No-signaling makes the dropped input irrelevant"""
        first = marginalize_behavior(bilocal_behavior, "A3", 0)
        second = marginalize_behavior(bilocal_behavior, "A3", 1)
        assert np.allclose(first.table, second.table, atol=1e-12)

    def test_drop_unknown_party(self, bilocal_behavior):
        """Unknown parties are rejected"""
        with pytest.raises(ArgumentError):
            marginalize_behavior(bilocal_behavior, "Z", 0)

    def test_bits_as_settings(self):
        """Setting y reads bit y of the multi-bit outcome"""
        scenario = Scenario.from_shape(["B"], [(1, 4)])
        behavior = deterministic_behavior(scenario, [2])
        split = bits_as_settings(behavior, "B")
        assert split.scenario.shape == [(2, 2)]
        assert np.allclose(split.table, [[0.0, 1.0], [1.0, 0.0]])

    def test_relabel_inputs(self, chsh_scenario):
        """Input y of the new behavior is input mapping[y] of the old one"""
        table = np.zeros((2, 2, 2, 2))
        table[0, :, 0, 0] = 1.0
        table[1, :, 1, 0] = 1.0
        swapped = relabel_inputs(Behavior(chsh_scenario, table), "A", [1, 0])
        assert swapped.table[0, 0, 1, 0] == 1.0
        assert swapped.table[1, 0, 0, 0] == 1.0

    def test_restrict_reorders_parties(self, chsh_scenario):
        """Kept parties follow the requested order"""
        table = np.zeros((2, 2, 2, 2))
        table[0, :, 0, 0] = 1.0
        table[1, :, 1, 0] = 1.0
        behavior = Behavior(chsh_scenario, table)
        swapped = restrict_behavior(behavior, ["B", "A"])
        assert swapped.scenario.names == ["B", "A"]
        assert np.array_equal(swapped.table, table.transpose(1, 0, 3, 2))

    def test_restrict_drops_outside_parties(self, bilocal_behavior):
        """Outside parties are summed out at their fixed input"""
        ends = restrict_behavior(bilocal_behavior, ["A3", "A1"], fixed_inputs={"A2": 0})
        expected = marginalize_behavior(bilocal_behavior, "A2", 0).table.transpose(1, 0, 3, 2)
        assert ends.scenario.names == ["A3", "A1"]
        assert np.allclose(ends.table, expected, atol=1e-12)

    def test_restrict_truncates_inputs(self, chsh_scenario):
        """A party with more inputs than the shape asks for keeps its first ones"""
        behavior = uniform_behavior(chsh_scenario)
        reduced = restrict_behavior(behavior, ["A", "B"], shape=[(1, 2), (2, 2)])
        assert reduced.scenario.shape == [(1, 2), (2, 2)]

    def test_restrict_unknown_party(self, chsh_scenario):
        """Only parties of the behavior can be kept"""
        with pytest.raises(ArgumentError):
            restrict_behavior(uniform_behavior(chsh_scenario), ["A", "C"])
