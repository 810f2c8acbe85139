from typing import List, Optional

from fastapi import APIRouter, HTTPException
import logging

from config.config import NetcertConfig
from models.network_models import NetworkTopology
from models.request_models import DecomposedSubnetwork, DecomposeResponse, EvalRequest
from models.witness_models import BoundSpec, WitnessFamily, WitnessReport
from services.behaviors import Behavior
from services.network_model import decompose_network
from services.witnesses import FAMILIES, bound_table, evaluate_report, parse_conditioning

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Create router
router = APIRouter(
    prefix="/api",
    tags=["Witnesses"],
    responses={404: {"description": "Not found"}}
)


@router.post("/eval", response_model=WitnessReport)
async def evaluate_witness(request: EvalRequest):
    """
    Evaluate a witness on a behavior.

    Returns the witness value with its intermediates, the closed-form bound
    table for the family and the claims certified by strict violations.
    """
    try:
        logger.info(f"Evaluation request for {request.family} (n={request.n})")
        behavior = Behavior.from_document(request.behavior, request.tol)
        kwargs = {}
        if request.conditioning is not None:
            kwargs["conditioning"] = parse_conditioning(request.conditioning)
        if request.center:
            kwargs["center"] = request.center
        if request.branches:
            kwargs["branches"] = request.branches
        return evaluate_report(behavior, request.family, request.n, request.tol, **kwargs)
    except ValueError as e:
        logger.error(f"Validation error: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Evaluation error: {e}")
        raise HTTPException(
            status_code=500,
            detail=f"An error occurred during evaluation: {str(e)}"
        )


@router.get("/bounds/{family}", response_model=List[BoundSpec])
async def get_bounds(family: WitnessFamily, n: Optional[int] = None):
    """
    Closed-form bound table of a witness family.

    The tripartite families default to n=3; every other family needs n.
    """
    try:
        if n is None:
            if family not in ("bilocal_ij", "linear_b3"):
                raise ValueError(f"{family} needs the query parameter n")
            n = 3
        return bound_table(family, n)
    except ValueError as e:
        logger.error(f"Validation error: {e}")
        raise HTTPException(status_code=400, detail=str(e))


@router.post("/decompose", response_model=DecomposeResponse)
async def decompose(topology: NetworkTopology):
    """
    Cover a network by chains and stars.

    Multipartite sources are listed separately; they need explicit blocks
    at certification time.
    """
    try:
        cover, multipartite = decompose_network(topology)
        return DecomposeResponse(
            subnetworks=[
                DecomposedSubnetwork(kind=s.kind, parties=s.parties, sources=s.source_map, center=s.center)
                for s in cover.subnetworks
            ],
            multipartite_sources=multipartite,
        )
    except ValueError as e:
        logger.error(f"Validation error: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Decomposition error: {e}")
        raise HTTPException(
            status_code=500,
            detail=f"An error occurred during decomposition: {str(e)}"
        )


@router.get("/status")
async def api_status():
    """
    Check API status and the configured numerical limits
    """
    config = NetcertConfig.get_instance()
    return {
        "status": "online",
        "families": list(FAMILIES),
        "tolerance": config.TOLERANCE,
        "max_workers": config.MAX_WORKERS,
        "max_qubits": config.MAX_QUBITS,
    }
