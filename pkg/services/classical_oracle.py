"""
Brute-force classical maxima of the witness families.

Linear witnesses are maximized over deterministic responses, since the
classical set is the convex hull of those. The nonlinear star and bilocal
witnesses are maximized over deterministic response functions of the
branches, with the source priors swept on a simplex grid and the center
answering with the sign that makes its correlator positive.
The enumerate method instead builds every deterministic network behavior
at small alphabets and grids and evaluates the witness on it.
"""
import itertools
import logging
import math
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config.config import NetcertConfig
from models.behavior_models import Scenario
from models.network_models import NetworkTopology
from services.behaviors import Behavior
from services.network_model import make_topology
from services.witnesses import (
    eval_bilocal_ij, eval_linear_b3, eval_linear_bn, eval_star_ij, eval_star_svetlichny, svetlichny_conditioning,
)
from utils.errors import ArgumentError, OracleBudgetExceeded

logger = logging.getLogger(__name__)

ORACLE_FAMILIES = ("bilocal_ij", "star_ij", "linear_b3", "linear_bn", "star_svetlichny")
ORACLE_METHODS = ("closed_form", "enumerate")

# Per symbol, a dichotomic branch response (A(0), A(1)) as (A+, A-) = ((A0+A1)/2, (A0-A1)/2)
_BRANCH_RESPONSES = ((1, 0), (-1, 0), (0, 1), (0, -1))


def prior_grid(alphabet: int, grid: int) -> List[Tuple[float, ...]]:
    """Priors over `alphabet` symbols whose weights are multiples of 1/(grid-1)."""
    if alphabet < 1 or grid < 2:
        raise ArgumentError(f"Invalid prior grid: alphabet {alphabet}, grid {grid}")
    steps = grid - 1
    priors = []
    for cuts in itertools.combinations_with_replacement(range(steps + 1), alphabet - 1):
        bounds = (0,) + cuts + (steps,)
        priors.append(tuple((bounds[i + 1] - bounds[i]) / steps for i in range(alphabet)))
    return priors


def deterministic_table(scenario: Scenario, functions: Sequence[Sequence[int]]) -> Behavior:
    """Behavior where party p answers functions[p][x] to input x."""
    table = np.zeros(scenario.input_shape + scenario.output_shape)
    for xs in itertools.product(*(range(n) for n in scenario.input_shape)):
        outputs = tuple(functions[p][x] for p, x in enumerate(xs))
        table[xs + outputs] = 1.0
    return Behavior(scenario, table)


def network_local_behavior(topology: NetworkTopology, scenario: Scenario, priors: Sequence[Sequence[float]],
                           responses: Sequence[Callable[[int, Tuple[int, ...]], int]]) -> Behavior:
    """
    Classical network behavior by direct enumeration over source symbols.

    P(a|x) = sum over lambda of prod_j p_j(lambda_j) prod_p [a_p = f_p(x_p, lambda of p's sources)].

    Args:
        topology: network whose sources carry the symbols
        scenario: party cardinalities in topology party order
        priors: one prior per source
        responses: per party, f(x, symbols in source order) -> output
    """
    if len(priors) != topology.num_sources or len(responses) != len(topology.parties):
        raise ArgumentError("One prior per source and one response per party are required")
    table = np.zeros(scenario.input_shape + scenario.output_shape)
    feeds = [topology.party_sources(p) for p in topology.parties]
    for symbols in itertools.product(*(range(len(p)) for p in priors)):
        weight = math.prod(priors[j][s] for j, s in enumerate(symbols))
        if weight == 0.0:
            continue
        for xs in itertools.product(*(range(n) for n in scenario.input_shape)):
            outputs = tuple(
                responses[p](x, tuple(symbols[j] for j in feeds[p])) for p, x in enumerate(xs)
            )
            table[xs + outputs] += weight
    return Behavior(scenario, table)


class _Budget:
    """Counts evaluations and keeps the running maximum"""

    def __init__(self, limit: int):
        self.limit = limit
        self.evaluated = 0
        self.best: Optional[float] = None

    def record(self, value: float) -> None:
        if self.evaluated >= self.limit:
            raise OracleBudgetExceeded(
                f"Oracle budget of {self.limit} evaluations exhausted", self.best, self.evaluated
            )
        self.evaluated += 1
        if self.best is None or value > self.best:
            self.best = value


def _functions(inputs: int, outputs: int) -> Iterable[Tuple[int, ...]]:
    return itertools.product(range(outputs), repeat=inputs)


def _linear_b3_max(budget: _Budget) -> None:
    scenario = Scenario.from_shape(["A", "B", "C"], [(2, 2), (1, 4), (3, 2)])
    for fa, b, fc in itertools.product(_functions(2, 2), range(4), _functions(3, 2)):
        budget.record(eval_linear_b3(deterministic_table(scenario, [fa, (b,), fc])).value)


def _linear_bn_max(n: int, budget: _Budget) -> None:
    names = [f"A{i}" for i in range(1, n + 1)]
    if n == 2:
        scenario = Scenario.from_shape(names, [(2, 2), (2, 2)])
        for fa, fz in itertools.product(_functions(2, 2), repeat=2):
            budget.record(eval_linear_bn(deterministic_table(scenario, [fa, fz]), n).value)
        return
    scenario = Scenario.from_shape(names, [(2, 2)] + [(1, 4)] * (n - 2) + [(4, 2)])
    # only the XOR of the middle outcomes enters the inequality
    for fa, xor_class, fz in itertools.product(_functions(2, 2), range(4), _functions(4, 2)):
        middles = [(xor_class,)] + [(0,)] * (n - 3)
        budget.record(eval_linear_bn(deterministic_table(scenario, [fa] + middles + [fz]), n).value)


def _svetlichny_max(n: int, budget: _Budget) -> None:
    names = [f"A{i}" for i in range(1, n + 1)] + ["B"]
    scenario = Scenario.from_shape(names, [(4, 2)] * n + [(1, 2 ** n)])
    conditioning = svetlichny_conditioning(n)
    for outcome in range(2 ** n):
        for pairs in itertools.product(_functions(2, 2), repeat=n):
            functions = []
            for (first, second), settings in zip(pairs, conditioning[outcome]):
                response = [0, 0, 0, 0]
                response[settings[0]], response[settings[1]] = first, second
                functions.append(response)
            behavior = deterministic_table(scenario, functions + [(outcome,)])
            budget.record(eval_star_svetlichny(behavior, n, conditioning).value)


def _star_max(n: int, alphabet: int, grid: int, budget: _Budget) -> None:
    """
    Closed-form evaluation of |I|^(1/n) + |J|^(1/n) for each choice of priors and branch responses.

    With the center answering sign(prod A+) and sign(prod A-), |I| is the
    product over sources of the weight u_j of symbols on which the branch
    response is constant, and |J| the product of the complementary weights.
    """
    options = []
    for prior in prior_grid(alphabet, grid):
        for responses in itertools.product(_BRANCH_RESPONSES, repeat=alphabet):
            u = sum(p * abs(plus) for p, (plus, _) in zip(prior, responses))
            w = sum(p * abs(minus) for p, (_, minus) in zip(prior, responses))
            options.append((u, w))
    logger.debug(f"Star oracle: {len(options)} candidates per source, {len(options) ** n} in total")
    for choice in itertools.product(options, repeat=n):
        u = math.prod(c[0] for c in choice)
        w = math.prod(c[1] for c in choice)
        budget.record(u ** (1 / n) + w ** (1 / n))


def _enumerated_max(family: str, n: int, alphabet: int, grid: int, budget: _Budget) -> None:
    """
    Every deterministic response of every party to its input and source
    symbols, evaluated on the enumerated network behavior.
    """
    if family == "bilocal_ij":
        topology = make_topology("chain", 3)
        shape = [(2, 2), (1, 4), (2, 2)]
        evaluator = eval_bilocal_ij
    else:
        topology = make_topology("star", n)
        shape = [(2, 2)] * (n + 1)
        evaluator = lambda behavior: eval_star_ij(behavior, n)
    scenario = Scenario.from_shape(topology.parties, shape)
    tables = []
    for party, (inputs, outputs) in zip(topology.parties, shape):
        symbols = list(itertools.product(range(alphabet), repeat=topology.degree(party)))
        keys = list(itertools.product(range(inputs), symbols))
        tables.append([dict(zip(keys, values)) for values in itertools.product(range(outputs), repeat=len(keys))])
    logger.debug(f"Enumerating {math.prod(len(t) for t in tables)} response choices per prior choice")
    for priors in itertools.product(prior_grid(alphabet, grid), repeat=topology.num_sources):
        for choice in itertools.product(*tables):
            responses = [lambda x, s, table=table: table[(x, s)] for table in choice]
            budget.record(evaluator(network_local_behavior(topology, scenario, priors, responses)).value)


def brute_force_classical_max(family: str, n: Optional[int] = None, alphabet: int = 2, grid: int = 9,
                              budget: Optional[int] = None, method: str = "closed_form") -> float:
    """
    Largest witness value reachable with every source classical.

    Args:
        family: bilocal_ij, star_ij, linear_b3, linear_bn or star_svetlichny
        n: chain length (linear_bn) or branch count (star families); fixed at 3 for the tripartite families
        alphabet: symbols per source for the nonlinear families
        grid: points per prior weight for the nonlinear families
        budget: maximum number of evaluated candidates (default from configuration)
        method: for bilocal_ij and star_ij, "closed_form" scores each prior and
            branch response choice directly; "enumerate" builds every network
            behavior and evaluates the witness on it (small alphabets and grids only)

    Returns:
        Maximum witness value over the enumerated classical strategies

    Raises:
        OracleBudgetExceeded: with the partial maximum when the budget runs out
    """
    config = NetcertConfig.get_instance()
    limit = config.ORACLE_BUDGET if budget is None else int(budget)
    if family not in ORACLE_FAMILIES:
        raise ArgumentError(f"No classical oracle for family '{family}'")
    if method not in ORACLE_METHODS:
        raise ArgumentError(f"Unknown oracle method '{method}'")
    if family in ("bilocal_ij", "star_ij"):
        if not 1 <= alphabet <= config.ORACLE_MAX_ALPHABET:
            raise ArgumentError(f"Alphabet must lie in 1..{config.ORACLE_MAX_ALPHABET}, got {alphabet}")
        if not 2 <= grid <= config.ORACLE_MAX_GRID:
            raise ArgumentError(f"Prior grid must lie in 2..{config.ORACLE_MAX_GRID}, got {grid}")

    budget_tracker = _Budget(limit)
    if family == "star_ij" and (n is None or n < 1):
        raise ArgumentError("star_ij oracle needs n >= 1")
    if family in ("bilocal_ij", "star_ij") and method == "enumerate":
        _enumerated_max(family, n, alphabet, grid, budget_tracker)
    elif family == "bilocal_ij":
        _star_max(2, alphabet, grid, budget_tracker)
    elif family == "star_ij":
        _star_max(n, alphabet, grid, budget_tracker)
    elif family == "linear_b3":
        _linear_b3_max(budget_tracker)
    elif family == "linear_bn":
        if n is None or not 2 <= n <= 5:
            raise ArgumentError(f"linear_bn oracle supports 2 <= n <= 5, got {n}")
        _linear_bn_max(n, budget_tracker)
    else:
        if n is None or not 2 <= n <= 4:
            raise ArgumentError(f"star_svetlichny oracle supports 2 <= n <= 4, got {n}")
        _svetlichny_max(n, budget_tracker)

    logger.info(f"Classical oracle {family} (n={n}): max {budget_tracker.best} over {budget_tracker.evaluated} candidates")
    return float(budget_tracker.best)
