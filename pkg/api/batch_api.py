from fastapi import APIRouter, HTTPException
import logging

from config.config import NetcertConfig
from models.request_models import CertifyRequest
from models.sweep_models import SweepResult, SweepSpec
from models.witness_models import Report
from services.network_certifier import NetworkCertifier
from services.sweep_runner import SweepRunner

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Create router
router = APIRouter(
    prefix="/api/batch",
    tags=["Sweeps and Certification"],
    responses={404: {"description": "Not found"}}
)

# Initialize runners
sweep_runner = SweepRunner()
network_certifier = NetworkCertifier()


@router.post("/sweep", response_model=SweepResult)
async def run_sweep(spec: SweepSpec):
    """
    Evaluate a witness over a parameter grid.

    Grid points run concurrently on the worker pool; rows come back in
    grid order with one threshold and violation flag per claim.
    """
    try:
        logger.info(f"Sweep request for {spec.family} over {[p.name for p in spec.swept]}")
        return await sweep_runner.run(spec)
    except ValueError as e:
        logger.error(f"Validation error: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Sweep error: {e}")
        raise HTTPException(
            status_code=500,
            detail=f"An error occurred during the sweep: {str(e)}"
        )


@router.post("/certify", response_model=Report)
async def certify_network(request: CertifyRequest):
    """
    Certify a network from one strategy setting per source, or from a
    measured behavior of all its parties.

    The network is decomposed into chains and stars; each piece runs its
    canonical experiment (or is read off the behavior marginal) and the
    report aggregates their claims.
    """
    try:
        certifier = network_certifier
        if request.tol is not None:
            certifier = NetworkCertifier(NetcertConfig.get_instance().MAX_WORKERS, request.tol)
        logger.info(f"Certification request for {len(request.topology.parties)} parties")
        if request.measured is not None:
            return await certifier.certify_behavior(request.topology, request.measured)
        return await certifier.certify(request.topology, request.strategy)
    except ValueError as e:
        logger.error(f"Validation error: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Certification error: {e}")
        raise HTTPException(
            status_code=500,
            detail=f"An error occurred during certification: {str(e)}"
        )
