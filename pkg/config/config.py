"""
Configuration settings for the network nonlocality toolkit
"""
import os
from dataclasses import dataclass

from dotenv import load_dotenv

# Load environment variables from a local .env before reading them
load_dotenv()


@dataclass
class NetcertConfig:
    """Configuration constants for evaluation, sweeps and certification"""

    # Service identity
    SERVICE_NAME: str = "NetCert"
    VERSION: str = "1.0.0"

    # Numerical tolerance for every invariant check (mirrors --tol)
    TOLERANCE: float = float(os.getenv("NETCERT_TOL", "1e-9"))

    # Logging configuration
    LOG_LEVEL: str = os.getenv("NETCERT_LOG_LEVEL", "INFO")

    # Worker pool for sweeps and multi-subnetwork certification
    MAX_WORKERS: int = int(os.getenv("NETCERT_MAX_WORKERS", "4"))

    # Classical oracle limits
    ORACLE_BUDGET: int = int(os.getenv("NETCERT_ORACLE_BUDGET", "5000000"))
    ORACLE_MAX_ALPHABET: int = int(os.getenv("NETCERT_ORACLE_MAX_ALPHABET", "2"))
    ORACLE_MAX_GRID: int = int(os.getenv("NETCERT_ORACLE_MAX_GRID", "9"))

    # Dense simulation limit
    MAX_QUBITS: int = int(os.getenv("NETCERT_MAX_QUBITS", "14"))

    # Scalar phase search for the Svetlichny star
    PHASE_XTOL: float = float(os.getenv("NETCERT_PHASE_XTOL", "1e-10"))

    # Sweep limits
    MAX_SWEEP_POINTS: int = int(os.getenv("NETCERT_MAX_SWEEP_POINTS", "100000"))

    @classmethod
    def get_instance(cls) -> 'NetcertConfig':
        """Get singleton instance of configuration"""
        if not hasattr(cls, '_instance'):
            cls._instance = cls()
        return cls._instance


def resolve_tolerance(tol=None) -> float:
    """Return tol, or the configured tolerance when tol is None."""
    if tol is None:
        return NetcertConfig.get_instance().TOLERANCE
    return float(tol)
