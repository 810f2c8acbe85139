"""
Command-line surface: eval, generate, sweep, certify, decompose, oracle.

Exit codes: 0 success, 1 unreadable/unwritable files and internal errors,
2 invalid arguments or schema errors, 3 scenario mismatch.
"""
import argparse
import asyncio
import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from config.config import NetcertConfig, resolve_tolerance
from models.behavior_models import BehaviorDocument
from models.network_models import NetworkTopology
from models.strategy_models import NetworkBehaviorDocument, NetworkStrategyDocument, StrategyDocument
from models.sweep_models import SweepSpec
from services.behaviors import Behavior, behavior_from_pr_chain
from services.classical_oracle import ORACLE_FAMILIES, ORACLE_METHODS, brute_force_classical_max
from services.network_certifier import NetworkCertifier
from services.network_model import decompose_network
from services.strategies import build_strategy
from services.sweep_runner import SweepRunner, source_total
from services.witnesses import FAMILIES, bound_lookup, evaluate_report, parse_conditioning
from utils.errors import ArgumentError, CoverageError, NetcertError, OracleBudgetExceeded, ScenarioMismatchError
from utils.serialization import dumps_canonical

logger = logging.getLogger("netcert.cli")

Model = TypeVar("Model", bound=BaseModel)

STRATEGY_FAMILIES = ("bilocal", "chain_ij", "chain_bn", "linear_b3", "star_ij", "star_svetlichny", "pr_chain")

EXIT_OK, EXIT_FAILURE, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2, 3


def parse_angle(text: str) -> float:
    """Parse '0.3', 'pi/4' or '3pi/8' into radians."""
    text = text.strip().replace(" ", "")
    if "pi" not in text:
        return float(text)
    numerator, _, denominator = text.partition("/")
    coefficient = numerator.replace("pi", "").replace("*", "")
    value = (float(coefficient) if coefficient else 1.0) * math.pi
    return value / float(denominator) if denominator else value


def _read_model(path: str, model: Type[Model]) -> Model:
    with open(path, "r", encoding="utf-8") as handle:
        return model.model_validate(json.load(handle))


def _emit(obj, out: Optional[str] = None) -> None:
    text = obj if isinstance(obj, str) else dumps_canonical(obj)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_eval(args: argparse.Namespace) -> int:
    behavior = Behavior.from_document(_read_model(args.behavior_file, BehaviorDocument), args.tol)
    kwargs = {}
    if args.conditioning:
        with open(args.conditioning, "r", encoding="utf-8") as handle:
            kwargs["conditioning"] = parse_conditioning(json.load(handle))
    if args.center:
        kwargs["center"] = args.center
    if args.branches:
        kwargs["branches"] = args.branches
    report = evaluate_report(behavior, args.family, args.n, args.tol, **kwargs)
    _emit(report)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    if args.from_strategy:
        canonical = build_strategy(_read_model(args.from_strategy, StrategyDocument))
        _emit(canonical.behavior().to_document(), args.out)
        logger.info(f"Rebuilt {canonical.family} behavior, predicted value {canonical.predicted_value}")
        return EXIT_OK
    if args.family is None:
        raise ArgumentError("generate needs --family or --from-strategy")
    if args.family == "pr_chain":
        if args.n is None:
            raise ArgumentError("pr_chain needs --n")
        behavior = behavior_from_pr_chain(args.n, args.classical or [])
        _emit(behavior.to_document(), args.out)
        return EXIT_OK

    thetas = list(args.theta or [math.pi / 4])
    if len(thetas) == 1:
        if args.n is None and args.family not in ("bilocal", "linear_b3"):
            raise ArgumentError(f"{args.family} needs --n or one --theta per source")
        thetas = thetas * source_total(args.family, args.n or 3)
    canonical = build_strategy(args.family, thetas, args.visibility, args.vartheta, args.classical or [])
    _emit(canonical.behavior().to_document(), args.out)
    if args.strategy_out:
        _emit(canonical.to_document(), args.strategy_out)
    logger.info(f"Generated {args.family} behavior, predicted value {canonical.predicted_value}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = _read_model(args.spec_file, SweepSpec)
    runner = SweepRunner(max_concurrent=args.workers, tol=args.tol)
    result = asyncio.run(runner.run(spec))
    _emit(runner.to_csv(result), args.out or spec.output)
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    topology = _read_model(args.topology_file, NetworkTopology)
    with open(args.strategy_file, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    certifier = NetworkCertifier(max_concurrent=args.workers, tol=args.tol)
    description = {"topology": Path(args.topology_file).name, "strategy": Path(args.strategy_file).name}
    if isinstance(payload, dict) and "behavior" in payload:
        measured = NetworkBehaviorDocument.model_validate(payload)
        report = asyncio.run(certifier.certify_behavior(topology, measured, description))
    else:
        document = NetworkStrategyDocument.model_validate(payload)
        report = asyncio.run(certifier.certify(topology, document, description))
    _emit(report, args.out)
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace) -> int:
    topology = _read_model(args.topology_file, NetworkTopology)
    cover, multipartite = decompose_network(topology)
    _emit({
        "subnetworks": [
            {"kind": s.kind, "parties": s.parties, "sources": s.source_map, "center": s.center}
            for s in cover.subnetworks
        ],
        "multipartite_sources": multipartite,
    })
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    n = 3 if args.family in ("bilocal_ij", "linear_b3") else args.n
    value = brute_force_classical_max(args.family, n, args.alphabet, args.grid, args.budget, args.method)
    bound = bound_lookup(args.family, n, None, "all_classical")
    _emit({"family": args.family, "n": n, "value": value, "all_classical": bound.threshold})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netcert", description="Network nonlocality witnesses and certification")
    parser.add_argument("--tol", type=float, default=None, help="numerical tolerance (default NETCERT_TOL)")
    parser.add_argument("--log-level", default=None, help="logging level (default NETCERT_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a witness on a behavior file")
    p.add_argument("behavior_file")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--conditioning", help="JSON map: central outcome -> per-branch setting pairs")
    p.add_argument("--center", nargs="+")
    p.add_argument("--branches", nargs="+")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("generate", help="write the behavior of a canonical strategy")
    p.add_argument("--family", choices=STRATEGY_FAMILIES)
    p.add_argument("--from-strategy", help="strategy document written by --strategy-out")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", nargs="+", type=parse_angle)
    p.add_argument("--visibility", nargs="+", type=float)
    p.add_argument("--vartheta", nargs="+", type=parse_angle)
    p.add_argument("--classical", nargs="+", type=int, help="1-based classical sources")
    p.add_argument("--out", required=True)
    p.add_argument("--strategy-out")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("sweep", help="evaluate a witness over a parameter grid")
    p.add_argument("spec_file")
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("certify", help="certify a network from per-source strategies or a measured behavior")
    p.add_argument("topology_file")
    p.add_argument("strategy_file", help="per-source strategy, or a document with a whole-network behavior")
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("decompose", help="cover a topology by chains and stars")
    p.add_argument("topology_file")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("oracle", help="brute-force classical maximum of a witness")
    p.add_argument("--family", required=True, choices=ORACLE_FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--grid", type=int, default=9)
    p.add_argument("--budget", type=int)
    p.add_argument("--method", choices=ORACLE_METHODS, default="closed_form")
    p.set_defaults(handler=cmd_oracle)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = NetcertConfig.get_instance()
    logging.basicConfig(
        level=(args.log_level or config.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    default_tol = config.TOLERANCE

    try:
        if args.tol is not None:
            if not args.tol > 0:
                raise ArgumentError(f"--tol must be positive, got {args.tol}")
            # state, observable and behavior validation read the configured tolerance
            config.TOLERANCE = args.tol
        args.tol = resolve_tolerance(args.tol)
        return args.handler(args)
    except ScenarioMismatchError as e:
        logger.error(f"Scenario mismatch: {e}")
        return EXIT_MISMATCH
    except OracleBudgetExceeded as e:
        logger.error(f"{e}; partial maximum {e.partial_max} after {e.evaluated} evaluations")
        return EXIT_FAILURE
    except (ValidationError, json.JSONDecodeError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID
    except (OSError, CoverageError, NetcertError) as e:
        logger.error(f"Failed: {e}")
        return EXIT_FAILURE
    except Exception as e:
        logger.exception(f"Internal error: {e}")
        return EXIT_FAILURE
    finally:
        config.TOLERANCE = default_tol


if __name__ == "__main__":
    sys.exit(main())
