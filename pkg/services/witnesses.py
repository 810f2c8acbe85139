"""
Witness evaluation, closed-form bound table and certification claims.

Families and the behaviors they read (inputs, outputs per party, in order):

    bilocal_ij       A (2,2)  B (1,4)  C (2,2)
    chain_ij         A1..An (2,2), n odd
    star_ij          A1..An (2,2), center B (2,2)
    linear_b3        A (2,2)  B (1,4)  C (3,2)
    linear_bn        A1 (2,2), middles (1,4), An (4,2); n=2 is A1 (2,2) A2 (2,2)
    star_svetlichny  branches with two outcomes, center conditioning their settings
"""
import itertools
import logging
import math
from functools import reduce
from operator import xor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.config import resolve_tolerance
from models.witness_models import (
    BoundEntry, BoundSpec, CertificationClaim, ClaimEntry, WitnessReport, WitnessValue,
)
from services.behaviors import Behavior, SignRule, check_no_signaling, correlator, marginalize_behavior
from utils.errors import ArgumentError, ScenarioMismatchError

logger = logging.getLogger(__name__)

FAMILIES = ("bilocal_ij", "chain_ij", "star_ij", "linear_b3", "linear_bn", "star_svetlichny")
MODELS = ("all_classical", "hybrid_ns", "hybrid_quantum", "quantum_max")

PARITY = SignRule.parity()
SQRT2 = math.sqrt(2.0)

# XOR class of the middle outcomes (b0 b1) -> block key of the linear chain inequality
BN_BLOCK_OF_CLASS = {0: "00", 1: "11", 2: "01", 3: "10"}

# (Bob outcome, [(sign, x, z)]) for the tripartite linear inequality
B3_BLOCKS = (
    (0, ((1, 0, 0), (1, 0, 1), (1, 1, 0), (-1, 1, 1))),
    (1, ((1, 0, 0), (-1, 0, 1), (1, 1, 0), (1, 1, 1))),
    (2, ((1, 0, 1), (1, 0, 2), (-1, 1, 1), (1, 1, 2))),
    (3, ((-1, 0, 1), (1, 0, 2), (1, 1, 1), (1, 1, 2))),
)


def _require_shape(behavior: Behavior, expected: Sequence[Tuple[int, int]], family: str) -> None:
    actual = behavior.scenario.shape
    if list(actual) != list(expected):
        raise ScenarioMismatchError(f"{family} expects scenario {list(expected)}, got {actual}")


def _require_odd_chain(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise ArgumentError(f"chain_ij is evaluated on an odd number of parties >= 3, got {n}")


# Evaluation

def eval_bilocal_ij(behavior: Behavior) -> WitnessValue:
    """
    Nonlinear bilocal witness sqrt|I| + sqrt|J|.

    Bob's first output bit enters I and his second bit enters J.
    """
    _require_shape(behavior, [(2, 2), (1, 4), (2, 2)], "bilocal_ij")
    i_sum = j_sum = 0.0
    for x, z in itertools.product((0, 1), repeat=2):
        i_sum += correlator(behavior, (x, 0, z), (PARITY, SignRule.bit(0), PARITY))
        j_sum += (-1) ** (x + z) * correlator(behavior, (x, 0, z), (PARITY, SignRule.bit(1), PARITY))
    i_val, j_val = i_sum / 4, j_sum / 4
    value = math.sqrt(abs(i_val)) + math.sqrt(abs(j_val))
    return WitnessValue(family="bilocal_ij", n=3, value=value, components={"I": i_val, "J": j_val})


def eval_chain_ij(behavior: Behavior, n: int) -> WitnessValue:
    """
    Chain witness |I|^(2/(n+1)) + |J|^(2/(n+1)) for odd n.

    Odd parties enter through A+ = (A0 + A1)/2 in I and A- = (A0 - A1)/2 in J;
    even parties are held at input 0 in I and input 1 in J.
    """
    _require_odd_chain(n)
    _require_shape(behavior, [(2, 2)] * n, "chain_ij")
    odd = list(range(0, n, 2))
    k = len(odd)
    rules = [PARITY] * n
    i_sum = j_sum = 0.0
    for xs in itertools.product((0, 1), repeat=k):
        settings_i, settings_j = [0] * n, [1] * n
        for position, x in zip(odd, xs):
            settings_i[position] = settings_j[position] = x
        i_sum += correlator(behavior, settings_i, rules)
        j_sum += (-1) ** sum(xs) * correlator(behavior, settings_j, rules)
    i_val, j_val = i_sum / 2 ** k, j_sum / 2 ** k
    value = abs(i_val) ** (1 / k) + abs(j_val) ** (1 / k)
    return WitnessValue(family="chain_ij", n=n, value=value, components={"I": i_val, "J": j_val})


def eval_star_ij(behavior: Behavior, n: int) -> WitnessValue:
    """Star witness |I|^(1/n) + |J|^(1/n); branches A1..An first, center last."""
    if n < 1:
        raise ArgumentError(f"A star needs at least one branch, got {n}")
    _require_shape(behavior, [(2, 2)] * (n + 1), "star_ij")
    rules = [PARITY] * (n + 1)
    i_sum = j_sum = 0.0
    for xs in itertools.product((0, 1), repeat=n):
        i_sum += correlator(behavior, xs + (0,), rules)
        j_sum += (-1) ** sum(xs) * correlator(behavior, xs + (1,), rules)
    i_val, j_val = i_sum / 2 ** n, j_sum / 2 ** n
    value = abs(i_val) ** (1 / n) + abs(j_val) ** (1 / n)
    return WitnessValue(family="star_ij", n=n, value=value, components={"I": i_val, "J": j_val})


def eval_linear_b3(behavior: Behavior) -> WitnessValue:
    """Tripartite linear inequality: one CHSH test per Bob outcome, weighted by its probability."""
    _require_shape(behavior, [(2, 2), (1, 4), (3, 2)], "linear_b3")
    components = {}
    for b, terms in B3_BLOCKS:
        rules = (PARITY, SignRule.outcome(b), PARITY)
        components[f"B{b}"] = sum(sign * correlator(behavior, (x, 0, z), rules) for sign, x, z in terms)
    return WitnessValue(family="linear_b3", n=3, value=sum(components.values()), components=components)


def _bn_shape(n: int) -> List[Tuple[int, int]]:
    if n == 2:
        return [(2, 2), (2, 2)]
    return [(2, 2)] + [(1, 4)] * (n - 2) + [(4, 2)]


def family_shape(family: str, n: int) -> List[Tuple[int, int]]:
    """(inputs, outputs) per party of the behavior a family reads."""
    if family in ("bilocal_ij", "linear_b3"):
        return [(2, 2), (1, 4), (2, 2) if family == "bilocal_ij" else (3, 2)]
    if family == "chain_ij":
        return [(2, 2)] * n
    if family == "star_ij":
        return [(2, 2)] * (n + 1)
    if family == "linear_bn":
        return _bn_shape(n)
    raise ArgumentError(f"Family '{family}' has no fixed scenario shape")


def eval_linear_bn(behavior: Behavior, n: int) -> WitnessValue:
    """
    Linear chain inequality.

    Middle outcomes are grouped by the XOR of their two-bit labels; each
    group weights one CHSH test between the end parties.
    """
    if n < 2:
        raise ArgumentError(f"linear_bn needs n >= 2, got {n}")
    _require_shape(behavior, _bn_shape(n), "linear_bn")
    sign = np.array([1.0, -1.0])
    table = behavior.table[(slice(None),) + (0,) * (n - 2) + (slice(None),)]
    table = np.tensordot(table, sign, axes=([2], [0]))            # sum out A1 with its sign
    table = np.tensordot(table, sign, axes=([table.ndim - 1], [0]))  # and An
    flat = table.reshape(table.shape[0], table.shape[1], -1)
    classes = np.array([reduce(xor, labels, 0) for labels in itertools.product(range(4), repeat=n - 2)])
    corr = {c: flat[:, :, classes == c].sum(axis=2) for c in range(4)}

    blocks = {
        "00": corr[0][0, 0] + corr[0][0, 1] + corr[0][1, 0] - corr[0][1, 1],
    }
    if n > 2:
        blocks["11"] = corr[1][0, 0] + corr[1][0, 1] - corr[1][1, 0] + corr[1][1, 1]
        blocks["01"] = corr[2][0, 2] + corr[2][0, 3] + corr[2][1, 2] - corr[2][1, 3]
        blocks["10"] = corr[3][0, 2] + corr[3][0, 3] - corr[3][1, 2] + corr[3][1, 3]
    components = {f"B{key}": float(value) for key, value in blocks.items()}
    return WitnessValue(family="linear_bn", n=n, value=sum(components.values()), components=components)


def svetlichny_coefficients(n: int) -> Dict[Tuple[int, ...], int]:
    """
    Coefficients of the n-party Svetlichny combination of correlators.

    The coefficient of input tuple x is (-1)^(k(k-1)/2) with k the number of
    ones in x; n=2 gives CHSH and n=1 the single term A0.
    """
    if n < 1:
        raise ArgumentError(f"Svetlichny coefficients need n >= 1, got {n}")
    if n == 1:
        return {(0,): 1}
    return {xs: (-1) ** (sum(xs) * (sum(xs) - 1) // 2) for xs in itertools.product((0, 1), repeat=n)}


def eval_star_svetlichny(behavior: Behavior, n: int, conditioning: Mapping[int, Sequence[Tuple[int, int]]],
                         center: Optional[Sequence[str]] = None,
                         branches: Optional[Sequence[str]] = None) -> WitnessValue:
    """
    Svetlichny score of the branches conditioned on each central outcome.

    Args:
        behavior: behavior containing the center and branch parties
        n: number of branch parties
        conditioning: central outcome index -> per branch (setting for x=0, setting for x=1);
            with several center parties the outcome index is their row-major flattening
        center: center parties (default: the last party)
        branches: branch parties (default: every non-center party)

    Returns:
        WitnessValue with one "score_<outcome>" component per central outcome
    """
    names = behavior.scenario.names
    center = list(center) if center else [names[-1]]
    branches = list(branches) if branches else [p for p in names if p not in center]
    for party in center + branches:
        if party not in names:
            raise ArgumentError(f"Unknown party '{party}'")
    if len(branches) != n or set(branches) & set(center):
        raise ScenarioMismatchError(f"Expected {n} branch parties distinct from the center, got {branches}")

    specs = {p.name: p for p in behavior.scenario.parties}
    for party in branches:
        if specs[party].outputs != 2:
            raise ScenarioMismatchError(f"Branch {party} must have two outcomes")
    center_outputs = tuple(specs[p].outputs for p in center)
    num_outcomes = int(np.prod(center_outputs))
    for outcome in range(num_outcomes):
        pairs = conditioning.get(outcome)
        if pairs is None or len(pairs) != n:
            raise ArgumentError(f"Conditioning is incomplete for central outcome {outcome}")
        for party, pair in zip(branches, pairs):
            if len(pair) != 2 or not all(0 <= s < specs[party].inputs for s in pair):
                raise ArgumentError(f"Conditioning {pair} is invalid for branch {party}")

    coefficients = svetlichny_coefficients(n)
    branch_pos = [names.index(p) for p in branches]
    center_pos = [names.index(p) for p in center]
    components = {}
    for outcome in range(num_outcomes):
        rules = [SignRule.ignore()] * len(names)
        for pos, local in zip(center_pos, np.unravel_index(outcome, center_outputs)):
            rules[pos] = SignRule.outcome(int(local))
        for pos in branch_pos:
            rules[pos] = PARITY
        score = 0.0
        for xs, coefficient in coefficients.items():
            settings = [0] * len(names)
            for j, (pos, x) in enumerate(zip(branch_pos, xs)):
                settings[pos] = conditioning[outcome][j][x]
            score += coefficient * correlator(behavior, settings, rules)
        components[f"score_{outcome}"] = score
    return WitnessValue(family="star_svetlichny", n=n, value=sum(components.values()), components=components)


def recompute_value(witness: WitnessValue) -> float:
    """Apply the family formula to the stored components."""
    c = witness.components
    if witness.family == "bilocal_ij":
        return math.sqrt(abs(c["I"])) + math.sqrt(abs(c["J"]))
    if witness.family == "chain_ij":
        k = (witness.n + 1) // 2
        return abs(c["I"]) ** (1 / k) + abs(c["J"]) ** (1 / k)
    if witness.family == "star_ij":
        return abs(c["I"]) ** (1 / witness.n) + abs(c["J"]) ** (1 / witness.n)
    return float(sum(c.values()))


def evaluate(behavior: Behavior, family: str, n: Optional[int] = None, **kwargs) -> WitnessValue:
    """Dispatch to the evaluator of a family."""
    logger.info(f"Evaluating {family} witness (n={n})")
    if family == "bilocal_ij":
        return eval_bilocal_ij(behavior)
    if family == "linear_b3":
        return eval_linear_b3(behavior)
    if n is None:
        raise ArgumentError(f"Family {family} needs n")
    if family == "chain_ij":
        return eval_chain_ij(behavior, n)
    if family == "star_ij":
        return eval_star_ij(behavior, n)
    if family == "linear_bn":
        return eval_linear_bn(behavior, n)
    if family == "star_svetlichny":
        conditioning = kwargs.get("conditioning")
        if conditioning is None:
            conditioning = svetlichny_conditioning(n)
        return eval_star_svetlichny(behavior, n, conditioning, kwargs.get("center"), kwargs.get("branches"))
    raise ArgumentError(f"Unknown witness family '{family}'")


def svetlichny_conditioning(n: int) -> Dict[int, List[Tuple[int, int]]]:
    """
    Canonical settings map of the linear star: for central outcome i1..in,
    branch j uses settings (2 i_j, 2 i_j + 1).
    """
    if n < 1:
        raise ArgumentError(f"Svetlichny star needs n >= 1, got {n}")
    conditioning = {}
    for outcome in range(2 ** n):
        bits = [(outcome >> (n - 1 - j)) & 1 for j in range(n)]
        conditioning[outcome] = [(2 * b, 2 * b + 1) for b in bits]
    return conditioning


# Bounds

def source_count(family: str, n: int) -> int:
    """Number of sources of the network a family is defined on."""
    if family in ("bilocal_ij", "linear_b3"):
        return 2
    if family in ("chain_ij", "linear_bn"):
        return n - 1
    if family in ("star_ij", "star_svetlichny"):
        return n
    raise ArgumentError(f"Unknown witness family '{family}'")


def _validate_family_n(family: str, n: int) -> None:
    if family not in FAMILIES:
        raise ArgumentError(f"Unknown witness family '{family}'")
    if family in ("bilocal_ij", "linear_b3") and n != 3:
        raise ArgumentError(f"{family} is tripartite, got n={n}")
    if family == "chain_ij" and n < 3:
        raise ArgumentError(f"chain_ij needs n >= 3, got {n}")
    if family == "linear_bn" and n < 2:
        raise ArgumentError(f"linear_bn needs n >= 2, got {n}")
    if family == "star_ij" and n < 1:
        raise ArgumentError(f"star_ij needs n >= 1, got {n}")
    if family == "star_svetlichny" and n < 2:
        raise ArgumentError(f"star_svetlichny needs n >= 2, got {n}")


def _all_classical(family: str, n: int) -> float:
    if family in ("linear_b3", "linear_bn"):
        return 2.0
    if family == "star_svetlichny":
        return 2.0 ** (n - 1)
    return 1.0


def _quantum_max(family: str, n: int) -> float:
    if family in ("linear_b3", "linear_bn"):
        return 2 * SQRT2
    if family == "star_svetlichny":
        return 2.0 ** (n - 1) * SQRT2
    return SQRT2


def _odd_chain_quantum_bound(n: int, level: int) -> float:
    if level >= n - 1:
        return 1.0
    if n == 3 and level == 1:
        return 2 ** 0.25
    if level > n / 2:
        return 2 ** ((n - 1) / (2 * (n + 1)))
    return SQRT2


def _odd_chain_ns_bound(n: int, isolated: int) -> float:
    return 2 ** (1 - 2 * isolated / (n + 1))


def _hybrid_quantum(family: str, n: int, level: int) -> float:
    if family == "bilocal_ij":
        return 2 ** 0.25 if level == 1 else 1.0
    if family == "chain_ij":
        if n % 2 == 1:
            return _odd_chain_quantum_bound(n, level)
        return _odd_chain_quantum_bound(n - 1, level - 1) if level >= 2 else SQRT2
    if family == "star_ij":
        return 2 ** ((n - level) / (2 * n))
    return _all_classical(family, n)


def _hybrid_ns(family: str, n: int, parameter: int) -> float:
    if family == "bilocal_ij":
        return SQRT2 if parameter == 1 else 1.0
    if family == "chain_ij":
        return _odd_chain_ns_bound(n if n % 2 == 1 else n - 1, parameter)
    if family == "star_ij":
        return 2 ** ((n - parameter) / n)
    return _all_classical(family, n)


def _parameter_range(family: str, n: int, model: str) -> range:
    if model == "hybrid_ns" and family == "chain_ij":
        odd_n = n if n % 2 == 1 else n - 1
        return range(0, (odd_n + 1) // 2 + 1)
    return range(1, source_count(family, n) + 1)


def _detectable(threshold: float, quantum_max: float) -> bool:
    return threshold < quantum_max and not math.isclose(threshold, quantum_max, rel_tol=1e-12, abs_tol=1e-12)


def bound_lookup(family: str, n: int, parameter: Optional[int], model: str) -> BoundSpec:
    """
    Closed-form threshold of a family for one model class.

    Args:
        family: witness family
        n: scenario size (parties for chains, branches for stars, 3 for tripartite families)
        parameter: number of classical sources for hybrid models; for chain_ij
            with hybrid_ns the number of odd parties receiving only classical systems.
            None for all_classical and quantum_max.
        model: all_classical, hybrid_ns, hybrid_quantum or quantum_max

    Returns:
        BoundSpec with the threshold and whether quantum strategies can exceed it
    """
    _validate_family_n(family, n)
    if model not in MODELS:
        raise ArgumentError(f"Unknown model class '{model}'")
    quantum_max = _quantum_max(family, n)
    if model in ("all_classical", "quantum_max"):
        if parameter is not None:
            raise ArgumentError(f"{model} takes no parameter")
        threshold = _all_classical(family, n) if model == "all_classical" else quantum_max
    else:
        if parameter is None or parameter not in _parameter_range(family, n, model):
            raise ArgumentError(f"Parameter {parameter} is out of range for {family} n={n} {model}")
        if model == "hybrid_quantum":
            threshold = _hybrid_quantum(family, n, parameter)
        else:
            threshold = _hybrid_ns(family, n, parameter)
    return BoundSpec(
        family=family, n=n, parameter=parameter, model=model,
        threshold=threshold, detectable=_detectable(threshold, quantum_max),
    )


def bound_table(family: str, n: int) -> List[BoundSpec]:
    """Every bound of a family: all_classical, quantum_max, then hybrid rows by parameter."""
    table = [bound_lookup(family, n, None, "all_classical"), bound_lookup(family, n, None, "quantum_max")]
    for model in ("hybrid_quantum", "hybrid_ns"):
        table.extend(bound_lookup(family, n, p, model) for p in _parameter_range(family, n, model))
    return table


def isolated_party_count(n: int, classical_sources: Sequence[int]) -> int:
    """
    Count odd chain parties all of whose sources are classical.

    Args:
        n: chain length
        classical_sources: classical source labels, source i joining A_i and A_{i+1}
    """
    classical = set(classical_sources)
    if any(not 1 <= s <= n - 1 for s in classical):
        raise ArgumentError(f"Source labels must lie in 1..{n - 1}")
    count = 0
    for party in range(1, n + 1, 2):
        incident = [s for s in (party - 1, party) if 1 <= s <= n - 1]
        if incident and all(s in classical for s in incident):
            count += 1
    return count


def min_isolated_count(n: int, level: int) -> int:
    """Smallest isolated-party count any placement of `level` classical sources yields on an odd chain."""
    _require_odd_chain(n)
    if not 0 <= level <= n - 1:
        raise ArgumentError(f"Level {level} out of range for a chain of {n} parties")
    return max(0, level - (n - 3) // 2)


# Certification

def _claim_name(kind: str, level: int) -> str:
    return f"F{kind}" if level == 1 else f"{level}-{kind}"


def claim_thresholds(family: str, n: int) -> List[Tuple[str, int, BoundSpec]]:
    """
    The (claim, level, bound) triples a witness of this family can certify.

    The order is fixed: NN first, then family-specific claims by level.
    """
    _validate_family_n(family, n)
    m = source_count(family, n)
    entries = [("NN", m, bound_lookup(family, n, None, "all_classical"))]
    if family in ("linear_b3", "linear_bn", "star_svetlichny", "bilocal_ij"):
        entries.append(("FQNN", 1, bound_lookup(family, n, 1, "hybrid_quantum")))
        entries.append(("FNN", 1, bound_lookup(family, n, 1, "hybrid_ns")))
    elif family == "star_ij":
        for level in range(1, n + 1):
            entries.append((_claim_name("QNN", level), level, bound_lookup(family, n, level, "hybrid_quantum")))
            entries.append((_claim_name("NN", level), level, bound_lookup(family, n, level, "hybrid_ns")))
    elif n % 2 == 1:
        first_nn = math.ceil((3 * n - 1) / 4)
        for level in range(1, m + 1):
            if level > n / 2 or (n == 3 and level == 1):
                entries.append((_claim_name("QNN", level), level, bound_lookup(family, n, level, "hybrid_quantum")))
            if level >= first_nn:
                isolated = min_isolated_count(n, level)
                entries.append((_claim_name("NN", level), level, bound_lookup(family, n, isolated, "hybrid_ns")))
    else:
        for name, level, spec in claim_thresholds(family, n - 1)[1:]:
            shifted_name = _claim_name(name.split("-")[-1].lstrip("F"), level + 1)
            entries.append((shifted_name, level + 1, spec))
    return entries


def certify(witness: WitnessValue, tol: Optional[float] = None) -> List[CertificationClaim]:
    """
    Claims whose thresholds the witness value strictly exceeds.

    A claim is emitted only when value - threshold > tol.
    """
    tol = resolve_tolerance(tol)
    claims = []
    for name, level, spec in claim_thresholds(witness.family, witness.n):
        margin = witness.value - spec.threshold
        if margin > tol:
            claims.append(CertificationClaim(claim=name, level=level, witness=witness, margin=margin))
    logger.info(f"{witness.family} value {witness.value:.6f}: {[c.claim for c in claims]}")
    return claims


def _shift_claim(claim: CertificationClaim, n: int) -> Tuple[str, int]:
    if claim.claim == "NN":
        return "NN", n - 1
    kind = claim.claim.split("-")[-1].lstrip("F")
    return _claim_name(kind, claim.level + 1), claim.level + 1


def certify_even_chain(behavior: Behavior, n: int,
                       tol: Optional[float] = None) -> Tuple[List[WitnessValue], List[CertificationClaim]]:
    """
    Certify an even chain through its two (n-1)-party subchains.

    The last party (then the first) is dropped at input 0; a claim survives
    when both subchains certify it, with its level raised by one.

    Returns:
        the two subchain witnesses and the surviving claims
    """
    if n < 4 or n % 2 == 1:
        raise ArgumentError(f"certify_even_chain needs an even n >= 4, got {n}")
    _require_shape(behavior, [(2, 2)] * n, "chain_ij")
    names = behavior.scenario.names
    left = eval_chain_ij(marginalize_behavior(behavior, names[-1], 0), n - 1)
    right = eval_chain_ij(marginalize_behavior(behavior, names[0], 0), n - 1)
    right_claims = {c.claim: c for c in certify(right, tol)}
    claims = []
    for claim in certify(left, tol):
        other = right_claims.get(claim.claim)
        if other is None:
            continue
        weakest = claim if claim.margin <= other.margin else other
        name, level = _shift_claim(claim, n)
        claims.append(CertificationClaim(claim=name, level=level, witness=weakest.witness, margin=weakest.margin))
    return [left, right], claims


def witness_report(witness: WitnessValue, tol: Optional[float] = None,
                   claims: Optional[List[CertificationClaim]] = None,
                   warnings: Optional[List[str]] = None) -> WitnessReport:
    """Witness value with its bound table and certified claims."""
    if claims is None:
        claims = certify(witness, tol)
    bounds = [
        BoundEntry(model=b.model, parameter=b.parameter, threshold=b.threshold, detectable=b.detectable)
        for b in bound_table(witness.family, witness.n)
    ]
    return WitnessReport(
        family=witness.family,
        n=witness.n,
        value=witness.value,
        components=witness.components,
        bounds=bounds,
        claims=[ClaimEntry(**c.summary()) for c in claims],
        warnings=warnings or [],
    )


def even_chain_report(behavior: Behavior, n: int, tol: Optional[float] = None,
                       warnings: Optional[List[str]] = None) -> WitnessReport:
    """
    Report of an even chain at its own size.

    The value is the weaker of the two subchain values. Bound rows carry
    the parent claim they certify, named at the parent level.
    """
    witnesses, claims = certify_even_chain(behavior, n, tol)
    weakest = min(witnesses, key=lambda w: w.value)
    components = {f"{side}_{key}": value for side, w in zip(("left", "right"), witnesses)
                  for key, value in w.components.items()}
    bounds = [
        BoundEntry(model=spec.model, parameter=spec.parameter, threshold=spec.threshold,
                   detectable=spec.detectable, claim=name)
        for name, _, spec in claim_thresholds("chain_ij", n)
    ]
    top = bound_lookup("chain_ij", n - 1, None, "quantum_max")
    bounds.insert(1, BoundEntry(model=top.model, threshold=top.threshold, detectable=top.detectable))
    return WitnessReport(
        family="chain_ij",
        n=n,
        value=weakest.value,
        components=components,
        bounds=bounds,
        claims=[ClaimEntry(**c.summary()) for c in claims],
        warnings=warnings or [],
    )


def evaluate_report(behavior: Behavior, family: str, n: Optional[int] = None, tol: Optional[float] = None,
                    **kwargs) -> WitnessReport:
    """
    Evaluate a behavior and certify it, reporting no-signaling violations as warnings.

    Even chains are certified through their two odd subchains.
    """
    tol = resolve_tolerance(tol)
    warnings = [
        f"No-signaling violated: marginal of {'+'.join(v.parties)} depends on the input of "
        f"{v.depends_on} (deviation {v.deviation:.3g})"
        for v in check_no_signaling(behavior, tol)
    ]
    if family == "chain_ij" and n is not None and n % 2 == 0:
        warnings.append(f"Even chain of {n} parties evaluated on its two {n - 1}-party subchains")
        return even_chain_report(behavior, n, tol, warnings)
    witness = evaluate(behavior, family, n, **kwargs)
    return witness_report(witness, tol, warnings=warnings)


def parse_conditioning(raw: Mapping[str, Sequence[Sequence[int]]]) -> Dict[int, List[Tuple[int, int]]]:
    """Conditioning read from JSON: string outcome keys, per-branch [x=0 setting, x=1 setting] lists."""
    conditioning = {}
    for key, pairs in raw.items():
        try:
            outcome = int(key)
        except (TypeError, ValueError) as e:
            raise ArgumentError(f"Conditioning key '{key}' is not a central outcome index") from e
        if any(len(pair) != 2 for pair in pairs):
            raise ArgumentError(f"Conditioning entry {key} must list two settings per branch")
        conditioning[outcome] = [(int(a), int(b)) for a, b in pairs]
    return conditioning
