"""Exception hierarchy shared by the services, the CLI and the API."""
from typing import Optional


class NetcertError(Exception):
    """Base class for every error raised by the toolkit"""


class ArgumentError(NetcertError, ValueError):
    """Invalid parameters or malformed inputs"""


class ScenarioMismatchError(ArgumentError):
    """Behavior scenario does not fit the requested witness family"""


class UnsupportedTopologyError(ArgumentError):
    """Topology outside what the decomposition can handle"""


class CoverageError(NetcertError):
    """A subnetwork cover failed to cover every parent source"""


class OracleBudgetExceeded(NetcertError):
    """
    The classical enumeration ran out of budget.

    Attributes:
        partial_max: best value found before the budget ran out
        evaluated: number of candidates evaluated
    """

    def __init__(self, message: str, partial_max: Optional[float], evaluated: int):
        super().__init__(message)
        self.partial_max = partial_max
        self.evaluated = evaluated
