import asyncio
import itertools
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.config import NetcertConfig, resolve_tolerance
from models.sweep_models import SweepResult, SweepSpec
from services.strategies import WITNESS_OF_STRATEGY, build_strategy, simulate_witness
from services.witnesses import claim_thresholds
from utils.errors import ArgumentError
from utils.serialization import write_csv

logger = logging.getLogger(__name__)

DEFAULT_N = {"bilocal": 3, "linear_b3": 3}


def source_total(family: str, n: int) -> int:
    """Number of sources of the canonical network of a strategy family."""
    if family in ("bilocal", "linear_b3"):
        return 2
    if family in ("chain_ij", "chain_bn"):
        return n - 1
    return n


def resolve_parameters(family: str, n: int, values: Dict[str, float]) -> Tuple[List[float], List[float], Optional[List[float]]]:
    """
    Map named sweep parameters to source angles, visibilities and measurement angles.

    Recognized names: theta (every source), theta<j> (source j), visibility,
    visibility<j>, vartheta, and product (two-source families: sin2t1 sin2t2,
    realized with t2 = pi/4).
    """
    m = source_total(family, n)
    thetas = [math.pi / 4] * m
    visibilities = [1.0] * m
    varthetas = None
    for name, value in values.items():
        if name == "theta":
            thetas = [value] * m
        elif name == "visibility":
            visibilities = [value] * m
        elif name == "vartheta":
            varthetas = [value]
        elif name == "product":
            if m != 2:
                raise ArgumentError(f"'product' applies to two-source families, not {family}")
            if not 0.0 <= value <= 1.0:
                raise ArgumentError(f"product must lie in [0, 1], got {value}")
            thetas = [0.5 * math.asin(value), math.pi / 4]
        elif name.startswith("theta") and name[5:].isdigit() and 1 <= int(name[5:]) <= m:
            thetas[int(name[5:]) - 1] = value
        elif name.startswith("visibility") and name[10:].isdigit() and 1 <= int(name[10:]) <= m:
            visibilities[int(name[10:]) - 1] = value
        else:
            raise ArgumentError(f"Unknown sweep parameter '{name}' for {family} with {m} sources")
    return thetas, visibilities, varthetas


class SweepRunner:
    """
    Evaluates a witness over a parameter grid, one worker thread per point
    with at most max_concurrent running at once.
    """

    def __init__(self, max_concurrent: Optional[int] = None, tol: Optional[float] = None):
        self.max_concurrent = max_concurrent or NetcertConfig.get_instance().MAX_WORKERS
        self.tol = resolve_tolerance(tol)

    def grid(self, spec: SweepSpec) -> List[Dict[str, float]]:
        """Grid points in row-major order of the swept axes."""
        axes = [np.linspace(p.start, p.stop, p.steps) for p in spec.swept]
        total = math.prod(len(a) for a in axes)
        limit = NetcertConfig.get_instance().MAX_SWEEP_POINTS
        if total > limit:
            raise ArgumentError(f"Sweep has {total} points, limit is {limit}")
        names = [p.name for p in spec.swept]
        return [dict(zip(names, (float(v) for v in point))) for point in itertools.product(*axes)]

    def evaluate_point(self, spec: SweepSpec, n: int, point: Dict[str, float]) -> List[object]:
        values = {**spec.fixed, **point}
        thetas, visibilities, varthetas = resolve_parameters(spec.family, n, values)
        canonical = build_strategy(spec.family, thetas, visibilities, varthetas)
        witness = simulate_witness(canonical)
        row: List[object] = [point[p.name] for p in spec.swept] + [float(witness.value)]
        for _, _, bound in claim_thresholds(witness.family, witness.n):
            row.append(float(bound.threshold))
            row.append(bool(witness.value - bound.threshold > self.tol))
        return row

    async def run(self, spec: SweepSpec) -> SweepResult:
        """
        Evaluate every grid point of a sweep.

        Args:
            spec: family, fixed and swept parameters

        Returns:
            SweepResult whose rows follow the grid order
        """
        n = spec.n or DEFAULT_N.get(spec.family)
        if n is None:
            raise ArgumentError(f"Sweeps of {spec.family} need n")
        points = self.grid(spec)
        header = [p.name for p in spec.swept] + ["value"]
        for claim, _, _ in claim_thresholds(WITNESS_OF_STRATEGY[spec.family], n):
            header += [f"threshold_{claim}", f"violates_{claim}"]
        logger.info(f"Starting {spec.family} sweep over {len(points)} points")
        self.semaphore = asyncio.Semaphore(self.max_concurrent)

        async def evaluate_with_semaphore(point: Dict[str, float]) -> List[object]:
            """Evaluate one grid point with semaphore for concurrency control"""
            async with self.semaphore:
                try:
                    return await asyncio.to_thread(self.evaluate_point, spec, n, point)
                except Exception as e:
                    logger.error(f"Error evaluating {spec.family} at {point}: {e}")
                    raise

        rows = await asyncio.gather(*(evaluate_with_semaphore(point) for point in points))
        return SweepResult(header=header, rows=list(rows))

    @staticmethod
    def to_csv(result: SweepResult) -> str:
        return write_csv(result.header, result.rows)
