import math

import numpy as np
import pytest

from models.behavior_models import Scenario
from models.witness_models import WitnessValue
from services.behaviors import Behavior, behavior_from_pr_chain, deterministic_behavior, uniform_behavior
from services.strategies import canonical_linear_b3
from services.witnesses import (
    FAMILIES, bound_lookup, bound_table, certify, certify_even_chain, claim_thresholds, eval_bilocal_ij,
    eval_chain_ij, eval_linear_b3, eval_linear_bn, eval_star_ij, eval_star_svetlichny, evaluate,
    evaluate_report, isolated_party_count, min_isolated_count, parse_conditioning, recompute_value,
    svetlichny_coefficients, svetlichny_conditioning,
)
from utils.errors import ArgumentError, ScenarioMismatchError

BILOCAL_SHAPE = [(2, 2), (1, 4), (2, 2)]


def _scenario(shape):
    return Scenario.from_shape([f"P{i}" for i in range(len(shape))], shape)


def _odd_part(n):
    return n if n % 2 == 1 else n - 1


class TestEvaluation:
    """Tests for the witness evaluators on hand-built behaviors"""

    def test_bilocal_deterministic_point(self):
        """All-zero outputs give I=1, J=0"""
        witness = eval_bilocal_ij(deterministic_behavior(_scenario(BILOCAL_SHAPE)))
        assert witness.components == {"I": 1.0, "J": 0.0}
        assert witness.value == 1.0

    def test_bilocal_uniform_noise(self):
        """Uniform noise gives zero"""
        witness = eval_bilocal_ij(uniform_behavior(_scenario(BILOCAL_SHAPE)))
        assert witness.value == pytest.approx(0.0, abs=1e-12)

    def test_scenario_mismatch(self):
        """Evaluators check the scenario shape"""
        behavior = deterministic_behavior(_scenario([(2, 2)] * 3))
        with pytest.raises(ScenarioMismatchError):
            eval_bilocal_ij(behavior)
        with pytest.raises(ScenarioMismatchError):
            eval_linear_b3(behavior)

    def test_chain_needs_odd_n(self):
        """The chain witness is defined on odd chains"""
        with pytest.raises(ArgumentError):
            eval_chain_ij(deterministic_behavior(_scenario([(2, 2)] * 4)), 4)

    def test_chain_deterministic_point(self):
        """All-zero outputs give value 1"""
        witness = eval_chain_ij(deterministic_behavior(_scenario([(2, 2)] * 5)), 5)
        assert witness.value == pytest.approx(1.0)
        assert witness.components["J"] == pytest.approx(0.0)

    def test_star_deterministic_point(self):
        """All-zero outputs give value 1"""
        witness = eval_star_ij(deterministic_behavior(_scenario([(2, 2)] * 3)), 2)
        assert witness.value == pytest.approx(1.0)

    def test_linear_b3_deterministic_point(self):
        """A deterministic point reaches the classical bound 2"""
        witness = eval_linear_b3(deterministic_behavior(_scenario([(2, 2), (1, 4), (3, 2)])))
        assert witness.value == pytest.approx(2.0)
        assert witness.components["B0"] == pytest.approx(2.0)
        assert witness.components["B3"] == pytest.approx(0.0)

    def test_linear_bn_is_chsh_at_two_parties(self):
        """n=2 has the single 00 block"""
        witness = eval_linear_bn(deterministic_behavior(_scenario([(2, 2), (2, 2)])), 2)
        assert list(witness.components) == ["B00"]
        assert witness.value == pytest.approx(2.0)

    def test_linear_bn_blocks(self):
        """n >= 3 has four blocks keyed by the XOR class of the middle outcomes"""
        witness = eval_linear_bn(deterministic_behavior(_scenario([(2, 2), (1, 4), (1, 4), (4, 2)])), 4)
        assert set(witness.components) == {"B00", "B11", "B01", "B10"}
        assert witness.value == pytest.approx(2.0)

    def test_recompute_value(self):
        """Stored components reproduce the value"""
        behavior = uniform_behavior(_scenario(BILOCAL_SHAPE))
        for witness in (eval_bilocal_ij(deterministic_behavior(_scenario(BILOCAL_SHAPE))),
                        eval_linear_bn(deterministic_behavior(_scenario([(2, 2), (2, 2)])), 2),
                        eval_bilocal_ij(behavior)):
            assert recompute_value(witness) == pytest.approx(witness.value)

    def test_dispatch_needs_n(self):
        """Families without a fixed size need n"""
        behavior = deterministic_behavior(_scenario([(2, 2)] * 3))
        with pytest.raises(ArgumentError):
            evaluate(behavior, "chain_ij")
        with pytest.raises(ArgumentError):
            evaluate(behavior, "unknown", 3)


class TestSvetlichny:
    """Tests for the Svetlichny star witness"""

    def test_coefficients_reduce_to_chsh(self):
        """n=2 gives the CHSH signs"""
        assert svetlichny_coefficients(2) == {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): -1}

    def test_three_party_coefficients(self):
        """Signs follow (-1)^(k(k-1)/2)"""
        coefficients = svetlichny_coefficients(3)
        assert coefficients[(0, 0, 0)] == 1
        assert coefficients[(1, 0, 0)] == 1
        assert coefficients[(1, 1, 0)] == -1
        assert coefficients[(1, 1, 1)] == -1

    def test_canonical_conditioning(self):
        """Branch j uses settings (2 i_j, 2 i_j + 1) for central outcome i"""
        conditioning = svetlichny_conditioning(2)
        assert conditioning[0] == [(0, 1), (0, 1)]
        assert conditioning[1] == [(0, 1), (2, 3)]
        assert conditioning[2] == [(2, 3), (0, 1)]

    def test_deterministic_branch_score(self):
        """Deterministic branches with one central outcome reach the classical bound"""
        scenario = Scenario.from_shape(["A1", "A2", "B"], [(4, 2), (4, 2), (1, 4)])
        witness = eval_star_svetlichny(deterministic_behavior(scenario), 2, svetlichny_conditioning(2))
        assert witness.components["score_0"] == pytest.approx(2.0)
        assert witness.value == pytest.approx(2.0)

    def test_explicit_parties(self):
        """Center and branches can be named explicitly"""
        scenario = Scenario.from_shape(["B", "A1", "A2"], [(1, 2), (2, 2), (2, 2)])
        conditioning = {0: [(0, 1), (0, 1)], 1: [(1, 0), (0, 1)]}
        witness = eval_star_svetlichny(deterministic_behavior(scenario), 2, conditioning, ["B"], ["A1", "A2"])
        assert witness.components == {"score_0": pytest.approx(2.0), "score_1": pytest.approx(0.0)}

    def test_incomplete_conditioning(self):
        """Every central outcome needs a settings map"""
        scenario = Scenario.from_shape(["A1", "A2", "B"], [(4, 2), (4, 2), (1, 4)])
        with pytest.raises(ArgumentError):
            eval_star_svetlichny(deterministic_behavior(scenario), 2, {0: [(0, 1), (0, 1)]})

    @pytest.mark.parametrize("theta", [math.pi / 4, 0.3])
    def test_two_branch_score_matches_tripartite_linear(self, theta):
        """Per-outcome CHSH pairs relabel the tripartite linear inequality blocks"""
        behavior = canonical_linear_b3(theta, math.pi / 4).behavior()
        conditioning = {0: [(0, 1), (0, 1)], 1: [(1, 0), (0, 1)], 2: [(0, 1), (2, 1)], 3: [(1, 0), (2, 1)]}
        names = behavior.scenario.names
        star = eval_star_svetlichny(behavior, 2, conditioning, [names[1]], [names[0], names[2]])
        linear = eval_linear_b3(behavior)
        assert star.value == pytest.approx(linear.value, abs=1e-12)
        for b in range(4):
            assert star.components[f"score_{b}"] == pytest.approx(linear.components[f"B{b}"], abs=1e-12)

    def test_parse_conditioning(self):
        """JSON keys become central outcome indices"""
        assert parse_conditioning({"0": [[0, 1], [2, 3]]}) == {0: [(0, 1), (2, 3)]}
        with pytest.raises(ArgumentError):
            parse_conditioning({"first": [[0, 1]]})
        with pytest.raises(ArgumentError):
            parse_conditioning({"0": [[0, 1, 2]]})


class TestBounds:
    """Tests for the closed-form bound table"""

    def test_bilocal_bounds(self):
        """Classical 1, FQNN 2^(1/4), FNN sqrt 2, quantum sqrt 2"""
        assert bound_lookup("bilocal_ij", 3, None, "all_classical").threshold == 1.0
        assert bound_lookup("bilocal_ij", 3, 1, "hybrid_quantum").threshold == pytest.approx(2 ** 0.25)
        fnn = bound_lookup("bilocal_ij", 3, 1, "hybrid_ns")
        assert fnn.threshold == pytest.approx(math.sqrt(2))
        assert not fnn.detectable

    def test_chain_quantum_bounds(self):
        """Detectable only beyond half the sources"""
        assert bound_lookup("chain_ij", 3, 1, "hybrid_quantum").threshold == pytest.approx(2 ** 0.25)
        assert bound_lookup("chain_ij", 5, 3, "hybrid_quantum").threshold == pytest.approx(2 ** (1 / 3))
        low = bound_lookup("chain_ij", 5, 1, "hybrid_quantum")
        assert low.threshold == pytest.approx(math.sqrt(2))
        assert not low.detectable
        assert bound_lookup("chain_ij", 5, 4, "hybrid_quantum").threshold == 1.0

    def test_chain_ns_bounds(self):
        """2^(1 - 2|S|/(n+1))"""
        assert bound_lookup("chain_ij", 5, 1, "hybrid_ns").threshold == pytest.approx(2 ** (2 / 3))
        assert bound_lookup("chain_ij", 5, 0, "hybrid_ns").threshold == pytest.approx(2.0)
        assert bound_lookup("chain_ij", 3, 2, "hybrid_ns").threshold == pytest.approx(1.0)

    def test_star_bounds(self):
        """2^((n-l)/(2n)) and 2^((n-l)/n)"""
        assert bound_lookup("star_ij", 3, 1, "hybrid_quantum").threshold == pytest.approx(2 ** (1 / 3))
        assert bound_lookup("star_ij", 3, 1, "hybrid_ns").threshold == pytest.approx(2 ** (2 / 3))
        assert bound_lookup("star_ij", 3, 3, "hybrid_ns").threshold == pytest.approx(1.0)

    def test_linear_bounds(self):
        """Linear witnesses: classical 2, quantum 2 sqrt 2"""
        assert bound_lookup("linear_b3", 3, None, "quantum_max").threshold == pytest.approx(2 * math.sqrt(2))
        assert bound_lookup("linear_bn", 4, 1, "hybrid_quantum").threshold == 2.0
        assert bound_lookup("star_svetlichny", 3, None, "all_classical").threshold == 4.0
        assert bound_lookup("star_svetlichny", 3, None, "quantum_max").threshold == pytest.approx(4 * math.sqrt(2))

    def test_invalid_lookups(self):
        """Bad models, parameters and sizes raise ArgumentError"""
        with pytest.raises(ArgumentError):
            bound_lookup("bilocal_ij", 3, None, "superquantum")
        with pytest.raises(ArgumentError):
            bound_lookup("bilocal_ij", 3, 1, "all_classical")
        with pytest.raises(ArgumentError):
            bound_lookup("bilocal_ij", 3, 3, "hybrid_quantum")
        with pytest.raises(ArgumentError):
            bound_lookup("bilocal_ij", 4, None, "quantum_max")
        with pytest.raises(ArgumentError):
            bound_lookup("chain_ij", 2, None, "quantum_max")

    def test_bound_table_order(self):
        """Classical and quantum first, then hybrid rows by parameter"""
        table = bound_table("bilocal_ij", 3)
        assert [(b.model, b.parameter) for b in table] == [
            ("all_classical", None), ("quantum_max", None),
            ("hybrid_quantum", 1), ("hybrid_quantum", 2),
            ("hybrid_ns", 1), ("hybrid_ns", 2),
        ]

    @pytest.mark.parametrize("family", FAMILIES)
    def test_nesting_and_monotonicity(self, family):
        """classical <= hybrid quantum <= quantum max, thresholds non-increasing in l"""
        sizes = [3] if family in ("bilocal_ij", "linear_b3") else range(2, 8)
        for n in sizes:
            if family == "chain_ij" and n < 3:
                continue
            classical = bound_lookup(family, n, None, "all_classical").threshold
            quantum = bound_lookup(family, n, None, "quantum_max").threshold
            hybrid = [b.threshold for b in bound_table(family, n) if b.model == "hybrid_quantum"]
            ns = [b.threshold for b in bound_table(family, n) if b.model == "hybrid_ns"]
            assert classical <= hybrid[0] + 1e-12
            assert hybrid[0] <= quantum + 1e-12
            assert all(a >= b - 1e-12 for a, b in zip(hybrid, hybrid[1:]))
            assert all(a >= b - 1e-12 for a, b in zip(ns, ns[1:]))
            if family in ("bilocal_ij", "star_ij"):
                assert quantum <= bound_lookup(family, n, 1, "hybrid_ns").threshold + 1e-12
            if family == "chain_ij":
                isolated = min_isolated_count(_odd_part(n), 1)
                assert quantum <= bound_lookup(family, n, isolated, "hybrid_ns").threshold + 1e-12


class TestCertification:
    """Tests for claims and their thresholds"""

    def test_isolated_party_count(self):
        """Odd parties with only classical sources"""
        assert isolated_party_count(5, [1]) == 1
        assert isolated_party_count(5, [1, 2]) == 1
        assert isolated_party_count(5, [2, 3]) == 1
        assert isolated_party_count(5, [1, 2, 3, 4]) == 3
        assert isolated_party_count(3, [1, 2]) == 2
        with pytest.raises(ArgumentError):
            isolated_party_count(3, [3])

    def test_min_isolated_count(self):
        """Best placement of l classical sources"""
        assert min_isolated_count(5, 1) == 0
        assert min_isolated_count(5, 2) == 1
        assert min_isolated_count(5, 4) == 3
        assert min_isolated_count(7, 2) == 0

    def test_claim_names(self):
        """Claims appear in a fixed order per family"""
        assert [c[0] for c in claim_thresholds("bilocal_ij", 3)] == ["NN", "FQNN", "FNN"]
        assert [c[0] for c in claim_thresholds("chain_ij", 3)] == ["NN", "FQNN", "2-QNN", "2-NN"]
        assert [c[0] for c in claim_thresholds("chain_ij", 5)] == ["NN", "3-QNN", "4-QNN", "4-NN"]
        assert [c[0] for c in claim_thresholds("chain_ij", 4)] == ["NN", "2-QNN", "3-QNN", "3-NN"]
        assert [c[0] for c in claim_thresholds("star_ij", 2)] == ["NN", "FQNN", "FNN", "2-QNN", "2-NN"]

    def test_certify_strict_margin(self):
        """A value equal to a threshold does not certify it"""
        witness = WitnessValue(family="bilocal_ij", n=3, value=2 ** 0.25, components={})
        assert [c.claim for c in certify(witness)] == ["NN"]

    def test_certify_positive_margins_only(self):
        """Every emitted claim has a margin above the tolerance"""
        witness = WitnessValue(family="star_ij", n=3, value=1.3, components={})
        claims = certify(witness, tol=1e-9)
        assert claims
        assert all(c.margin > 1e-9 for c in claims)
        assert "FQNN" in [c.claim for c in claims]
        assert "FNN" not in [c.claim for c in claims]

    def test_tolerance_suppresses_small_margins(self):
        """Margins below tol are dropped"""
        witness = WitnessValue(family="bilocal_ij", n=3, value=math.sqrt(2), components={})
        assert certify(witness, tol=0.5) == []

    def test_even_chain(self):
        """Even chains are certified through both odd subchains"""
        behavior = deterministic_behavior(_scenario([(2, 2)] * 4))
        witnesses, claims = certify_even_chain(behavior, 4)
        assert [w.n for w in witnesses] == [3, 3]
        assert claims == []

    def test_even_chain_report(self):
        """The report notes the subchain reduction"""
        report = evaluate_report(deterministic_behavior(_scenario([(2, 2)] * 4)), "chain_ij", 4)
        assert report.n == 4
        assert any("Even chain" in w for w in report.warnings)

    def test_even_chain_bounds_at_parent_levels(self):
        """Bound rows name the four-party claims, and the value is the weaker subchain"""
        behavior = behavior_from_pr_chain(4, [1])
        report = evaluate_report(behavior, "chain_ij", 4)
        named = [b.claim for b in report.bounds if b.claim is not None]
        assert named == [name for name, _, _ in claim_thresholds("chain_ij", 4)]
        assert named[0] == "NN"
        assert all(b.claim is None for b in report.bounds if b.model == "quantum_max")
        witnesses, _ = certify_even_chain(behavior, 4)
        assert report.value == min(w.value for w in witnesses)
        assert set(report.components) == {"left_I", "left_J", "right_I", "right_J"}

    def test_report_warns_on_signaling(self):
        """No-signaling violations become warnings"""
        table = np.zeros((2, 1, 2, 2, 4, 2))
        for xa in (0, 1):
            for xc in (0, 1):
                table[xa, 0, xc, xc, 0, 0] = 1.0
        report = evaluate_report(Behavior(_scenario(BILOCAL_SHAPE), table), "bilocal_ij")
        assert report.warnings
        assert all(w.startswith("No-signaling violated") for w in report.warnings)
        assert len(report.bounds) == 6
