"""
Dense complex linear algebra for few-qubit network strategies.

States, observables and projective measurements are immutable values. Qubit
order inside a multi-qubit operator follows the Kronecker order of its
factors, most significant qubit first.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config.config import resolve_tolerance
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PAULIS = {"I": SIGMA_I, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def _qubits_for_dimension(dim: int) -> int:
    num_qubits = int(round(np.log2(dim))) if dim > 0 else -1
    if num_qubits < 0 or 2 ** num_qubits != dim:
        raise ArgumentError(f"Dimension {dim} is not a power of two")
    return num_qubits


def _is_hermitian(matrix: np.ndarray, tol: float) -> bool:
    return bool(np.allclose(matrix, matrix.conj().T, atol=tol, rtol=0.0))


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on num_qubits qubits"""
    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self):
        amplitudes = _frozen(np.ravel(self.amplitudes))
        object.__setattr__(self, "amplitudes", amplitudes)
        if amplitudes.size != 2 ** self.num_qubits:
            raise ArgumentError(
                f"{amplitudes.size} amplitudes do not describe {self.num_qubits} qubits"
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > resolve_tolerance():
            raise ArgumentError(f"State is not normalized (squared norm {norm})")

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def to_mixed(self) -> 'MixedState':
        return MixedState(self.density(), self.num_qubits)


@dataclass(frozen=True)
class MixedState:
    """Density matrix on num_qubits qubits"""
    density: np.ndarray
    num_qubits: int

    def __post_init__(self):
        density = _frozen(self.density)
        object.__setattr__(self, "density", density)
        tol = resolve_tolerance()
        dim = 2 ** self.num_qubits
        if density.shape != (dim, dim):
            raise ArgumentError(f"Density of shape {density.shape} does not describe {self.num_qubits} qubits")
        if not _is_hermitian(density, tol):
            raise ArgumentError("Density matrix is not Hermitian")
        trace = float(np.trace(density).real)
        if abs(trace - 1.0) > tol:
            raise ArgumentError(f"Density matrix has trace {trace}")
        if float(np.linalg.eigvalsh(density).min()) < -tol:
            raise ArgumentError("Density matrix has a negative eigenvalue")

    def to_mixed(self) -> 'MixedState':
        return self


State = Union[PureState, MixedState]


@dataclass(frozen=True)
class Observable:
    """Hermitian operator; dichotomic observables have spectrum in [-1, 1]"""
    matrix: np.ndarray
    num_qubits: int

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        object.__setattr__(self, "matrix", matrix)
        dim = 2 ** self.num_qubits
        if matrix.shape != (dim, dim):
            raise ArgumentError(f"Observable of shape {matrix.shape} does not act on {self.num_qubits} qubits")
        if not _is_hermitian(matrix, resolve_tolerance()):
            raise ArgumentError("Observable is not Hermitian")

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> 'Observable':
        matrix = np.asarray(matrix, dtype=complex)
        return cls(matrix, _qubits_for_dimension(matrix.shape[0]))

    def is_dichotomic(self, tol: Optional[float] = None) -> bool:
        tol = resolve_tolerance(tol)
        eigenvalues = np.linalg.eigvalsh(self.matrix)
        return bool(np.all(np.abs(eigenvalues) <= 1.0 + tol))


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Complete set of orthogonal projectors with distinct bit-string labels"""
    projectors: Tuple[np.ndarray, ...]
    outcome_labels: Tuple[str, ...]

    def __post_init__(self):
        projectors = tuple(_frozen(p) for p in self.projectors)
        labels = tuple(self.outcome_labels)
        object.__setattr__(self, "projectors", projectors)
        object.__setattr__(self, "outcome_labels", labels)
        if not projectors:
            raise ArgumentError("A measurement needs at least one projector")
        if len(labels) != len(projectors):
            raise ArgumentError("One outcome label is required per projector")
        if len(set(labels)) != len(labels):
            raise ArgumentError("Outcome labels must be pairwise distinct")
        tol = resolve_tolerance()
        dim = projectors[0].shape[0]
        _qubits_for_dimension(dim)
        for projector in projectors:
            if projector.shape != (dim, dim):
                raise ArgumentError("Projectors must share one square shape")
            if not _is_hermitian(projector, tol):
                raise ArgumentError("Projector is not Hermitian")
            if not np.allclose(projector @ projector, projector, atol=tol, rtol=0.0):
                raise ArgumentError("Projector is not idempotent")
        if not np.allclose(sum(projectors), np.eye(dim), atol=tol, rtol=0.0):
            raise ArgumentError("Projectors do not sum to the identity")

    @property
    def dimension(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def num_qubits(self) -> int:
        return _qubits_for_dimension(self.dimension)

    @property
    def num_outcomes(self) -> int:
        return len(self.projectors)

    def as_array(self) -> np.ndarray:
        """Projectors stacked as an array of shape (outcomes, dim, dim)."""
        return np.stack(self.projectors)

    @classmethod
    def from_observable(cls, observable: Union[Observable, np.ndarray]) -> 'ProjectiveMeasurement':
        """
        Split a dichotomic observable into its +1 and -1 eigenprojectors.

        Outcome 0 is the +1 eigenspace, so (-1)^a reproduces the observable.
        """
        if not isinstance(observable, Observable):
            observable = Observable.from_matrix(observable)
        matrix = observable.matrix
        identity = np.eye(matrix.shape[0], dtype=complex)
        if not np.allclose(matrix @ matrix, identity, atol=resolve_tolerance(), rtol=0.0):
            raise ArgumentError("Only observables with spectrum {+1, -1} define a projective measurement")
        return cls(((identity + matrix) / 2, (identity - matrix) / 2), ("0", "1"))


def tensor_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    """
    Kronecker product of square matrices (or vectors) in list order.

    Args:
        factors: non-empty ordered list of matrices

    Returns:
        Product whose dimension is the product of the factor dimensions
    """
    if len(factors) == 0:
        raise ArgumentError("tensor_product needs at least one factor")
    arrays = [np.asarray(f, dtype=complex) for f in factors]
    for array in arrays:
        if array.ndim == 2 and array.shape[0] != array.shape[1]:
            raise ArgumentError(f"Factor of shape {array.shape} is not square")
    return reduce(np.kron, arrays)


def pauli(label: str) -> np.ndarray:
    """Single-qubit Pauli matrix for 'I', 'X', 'Y' or 'Z'."""
    if label not in _PAULIS:
        raise ArgumentError(f"Unknown Pauli label '{label}'")
    return _PAULIS[label].copy()


def pauli_string(labels: str) -> np.ndarray:
    """Tensor product of Pauli matrices, e.g. 'ZZ' or 'XIZ'."""
    try:
        return tensor_product([_PAULIS[label] for label in labels])
    except KeyError as e:
        raise ArgumentError(f"Unknown Pauli label {e}") from e


def basis_state(bits: Sequence[int]) -> PureState:
    """Computational basis state |b1 b2 ... bk>."""
    bits = [int(b) for b in bits]
    amplitudes = np.zeros(2 ** len(bits), dtype=complex)
    amplitudes[int("".join(str(b) for b in bits), 2) if bits else 0] = 1.0
    return PureState(amplitudes, len(bits))


def generalized_epr(theta: float) -> PureState:
    """cos(theta)|00> + sin(theta)|11>."""
    amplitudes = np.array([np.cos(theta), 0.0, 0.0, np.sin(theta)], dtype=complex)
    return PureState(amplitudes, 2)


def xz_observable(vartheta: float, sign: int = 1) -> Observable:
    """cos(vartheta) sigma_z + sign * sin(vartheta) sigma_x."""
    if sign not in (1, -1):
        raise ArgumentError(f"sign must be +1 or -1, got {sign}")
    return Observable(np.cos(vartheta) * SIGMA_Z + sign * np.sin(vartheta) * SIGMA_X, 1)


def xy_observable(phi: float) -> Observable:
    """cos(phi) sigma_x + sin(phi) sigma_y."""
    return Observable(np.cos(phi) * SIGMA_X + np.sin(phi) * SIGMA_Y, 1)


def _bell_vectors() -> List[np.ndarray]:
    s = 1 / np.sqrt(2)
    return [
        np.array([s, 0, 0, s], dtype=complex),   # 00: phi+
        np.array([s, 0, 0, -s], dtype=complex),  # 01: phi-
        np.array([0, s, s, 0], dtype=complex),   # 10: psi+
        np.array([0, s, -s, 0], dtype=complex),  # 11: psi-
    ]


def projective_basis(kind: str, n: int = 2) -> ProjectiveMeasurement:
    """
    Bell or GHZ-type joint measurement.

    Args:
        kind: "bell" (n must be 2) or "ghz" (n >= 2)
        n: number of qubits measured

    Returns:
        ProjectiveMeasurement whose outcome index is the big-endian integer
        of its label. Bell labels are b0 b1 with b0 the phi/psi bit and b1
        the phase bit. GHZ label i1..in projects onto
        (|0,i2..in> + (-1)^i1 |1,j2..jn>)/sqrt(2), j the bitwise complement.
    """
    if kind == "bell":
        if n != 2:
            raise ArgumentError("The Bell basis is defined for n=2 only")
        vectors = _bell_vectors()
        labels = ["00", "01", "10", "11"]
    elif kind == "ghz":
        if n < 2:
            raise ArgumentError(f"GHZ basis needs n >= 2, got {n}")
        vectors, labels = [], []
        for bits in itertools.product((0, 1), repeat=n):
            first, rest = bits[0], bits[1:]
            low = int("".join(str(b) for b in (0,) + rest), 2)
            high = int("".join(str(1 - b) for b in (0,) + rest), 2)
            vector = np.zeros(2 ** n, dtype=complex)
            vector[low] = 1 / np.sqrt(2)
            vector[high] = (-1) ** first / np.sqrt(2)
            vectors.append(vector)
            labels.append("".join(str(b) for b in bits))
    else:
        raise ArgumentError(f"Unknown basis kind '{kind}'")
    return ProjectiveMeasurement(tuple(np.outer(v, v.conj()) for v in vectors), tuple(labels))


def apply_werner_noise(state: State, v: float) -> MixedState:
    """
    Mix a two-qubit state with white noise: v*rho + (1-v)*I/4.

    Args:
        state: two-qubit PureState (a MixedState is also accepted)
        v: visibility in [0, 1]
    """
    if not 0.0 <= v <= 1.0:
        raise ArgumentError(f"Visibility must lie in [0, 1], got {v}")
    if state.num_qubits != 2:
        raise ArgumentError("Werner noise is applied to two-qubit states")
    rho = state.density() if isinstance(state, PureState) else np.asarray(state.density)
    return MixedState(v * rho + (1 - v) * np.eye(4, dtype=complex) / 4, 2)


def expectation(state: State, operator: np.ndarray) -> float:
    """Real part of <operator> in the given state."""
    operator = operator.matrix if isinstance(operator, Observable) else np.asarray(operator)
    if isinstance(state, PureState):
        return float(np.vdot(state.amplitudes, operator @ state.amplitudes).real)
    return float(np.trace(operator @ state.density).real)
