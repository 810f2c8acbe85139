import math

import numpy as np
import pytest

from services.quantum_core import (
    SIGMA_X, SIGMA_Z, MixedState, Observable, ProjectiveMeasurement, PureState, apply_werner_noise,
    basis_state, expectation, generalized_epr, pauli, pauli_string, projective_basis, tensor_product,
    xy_observable, xz_observable,
)
from utils.errors import ArgumentError


class TestStates:
    """Tests for state construction and validation"""

    def test_generalized_epr_correlations(self):
        """ZZ is perfectly correlated and XX reads sin(2 theta)"""
        for theta in (0.0, math.pi / 8, math.pi / 4, math.pi / 2):
            state = generalized_epr(theta)
            assert expectation(state, pauli_string("ZZ")) == pytest.approx(1.0, abs=1e-12)
            assert expectation(state, pauli_string("XX")) == pytest.approx(math.sin(2 * theta), abs=1e-12)

    def test_random_angles_give_unit_norm(self):
        """Generalized EPR states are normalized for any angle"""
        for theta in np.random.default_rng(3).uniform(0.0, math.pi / 2, 50):
            assert np.linalg.norm(generalized_epr(theta).amplitudes) == pytest.approx(1.0, abs=1e-12)

    def test_product_state_at_zero_angle(self):
        """theta=0 is |00>"""
        assert np.allclose(generalized_epr(0.0).amplitudes, basis_state([0, 0]).amplitudes)

    def test_unnormalized_state_rejected(self):
        """Amplitudes must have unit norm"""
        with pytest.raises(ArgumentError):
            PureState(np.array([1.0, 1.0]), 1)

    def test_wrong_amplitude_count_rejected(self):
        """Amplitude count must be 2^num_qubits"""
        with pytest.raises(ArgumentError):
            PureState(np.array([1.0, 0.0, 0.0]), 2)

    def test_negative_density_rejected(self):
        """Density matrices must be positive"""
        with pytest.raises(ArgumentError):
            MixedState(np.diag([1.5, -0.5]), 1)

    def test_states_are_immutable(self):
        """Stored arrays are read-only"""
        state = generalized_epr(math.pi / 4)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 0.0


class TestWernerNoise:
    """Tests for white-noise mixing"""

    def test_visibility_scales_correlators(self):
        """Every Pauli correlator is multiplied by v"""
        state = apply_werner_noise(generalized_epr(math.pi / 4), 0.7)
        assert expectation(state, pauli_string("ZZ")) == pytest.approx(0.7, abs=1e-12)
        assert expectation(state, pauli_string("XX")) == pytest.approx(0.7, abs=1e-12)

    def test_zero_visibility_is_maximally_mixed(self):
        """v=0 gives I/4"""
        state = apply_werner_noise(generalized_epr(0.3), 0.0)
        assert np.allclose(state.density, np.eye(4) / 4)

    def test_out_of_range_visibility(self):
        """v must lie in [0, 1]"""
        with pytest.raises(ArgumentError):
            apply_werner_noise(generalized_epr(0.3), 1.2)

    def test_only_two_qubits(self):
        """Werner noise is a two-qubit map"""
        with pytest.raises(ArgumentError):
            apply_werner_noise(basis_state([0, 0, 0]), 0.5)


class TestOperators:
    """Tests for observables, tensor products and measurements"""

    def test_tensor_product_dimension(self):
        """Dimensions multiply"""
        assert tensor_product([SIGMA_X, SIGMA_Z, np.eye(2)]).shape == (8, 8)

    def test_tensor_product_order(self):
        """First factor is the most significant qubit"""
        assert np.allclose(tensor_product([SIGMA_Z, np.eye(2)]), np.diag([1, 1, -1, -1]))

    def test_tensor_product_needs_factors(self):
        """Empty products are rejected"""
        with pytest.raises(ArgumentError):
            tensor_product([])

    def test_xz_observable_is_dichotomic(self):
        """cos Z +/- sin X squares to the identity"""
        for sign in (1, -1):
            observable = xz_observable(0.4, sign)
            assert np.allclose(observable.matrix @ observable.matrix, np.eye(2))
            assert observable.is_dichotomic()

    def test_random_xz_observables_square_to_identity(self):
        for vartheta in np.random.default_rng(5).uniform(0.0, 2 * math.pi, 50):
            for sign in (1, -1):
                matrix = xz_observable(vartheta, sign).matrix
                assert np.allclose(matrix @ matrix, np.eye(2), atol=1e-12)

    def test_xz_observable_sign(self):
        """sign must be +1 or -1"""
        with pytest.raises(ArgumentError):
            xz_observable(0.4, 0)

    def test_xy_observable(self):
        """phi=0 is X and phi=pi/2 is Y"""
        assert np.allclose(xy_observable(0.0).matrix, SIGMA_X)
        assert np.allclose(xy_observable(math.pi / 2).matrix, pauli("Y"))

    def test_non_hermitian_observable(self):
        """Observables must be Hermitian"""
        with pytest.raises(ArgumentError):
            Observable(np.array([[0, 1], [0, 0]]), 1)

    def test_unknown_pauli(self):
        """Only I, X, Y and Z exist"""
        with pytest.raises(ArgumentError):
            pauli("Q")
        with pytest.raises(ArgumentError):
            pauli_string("XQ")

    def test_from_observable(self):
        """Outcome 0 is the +1 eigenspace"""
        measurement = ProjectiveMeasurement.from_observable(SIGMA_Z)
        assert measurement.outcome_labels == ("0", "1")
        assert np.allclose(measurement.projectors[0], np.diag([1, 0]))

    def test_incomplete_measurement_rejected(self):
        """Projectors must sum to the identity"""
        with pytest.raises(ArgumentError):
            ProjectiveMeasurement((np.diag([1.0, 0.0]),), ("0",))

    def test_duplicate_labels_rejected(self):
        """Outcome labels are distinct"""
        with pytest.raises(ArgumentError):
            ProjectiveMeasurement((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), ("0", "0"))


class TestJointBases:
    """Tests for Bell and GHZ measurements"""

    def test_bell_basis_labels(self):
        """00 is phi+ and 11 is psi-"""
        bell = projective_basis("bell")
        assert bell.outcome_labels == ("00", "01", "10", "11")
        phi_plus = generalized_epr(math.pi / 4)
        probabilities = [expectation(phi_plus, p) for p in bell.projectors]
        assert probabilities == pytest.approx([1.0, 0.0, 0.0, 0.0], abs=1e-12)

    def test_bell_labels_read_zz_and_xx(self):
        """First bit is the ZZ parity, second bit the XX parity"""
        bell = projective_basis("bell")
        zz, xx = pauli_string("ZZ"), pauli_string("XX")
        for index, projector in enumerate(bell.projectors):
            b0, b1 = divmod(index, 2)
            state = PureState(np.linalg.eigh(projector)[1][:, -1], 2)
            assert expectation(state, zz) == pytest.approx((-1) ** b0, abs=1e-12)
            assert expectation(state, xx) == pytest.approx((-1) ** b1, abs=1e-12)

    def test_bell_needs_two_qubits(self):
        """The Bell basis is a two-qubit measurement"""
        with pytest.raises(ArgumentError):
            projective_basis("bell", 3)

    def test_ghz_basis(self):
        """2^n orthogonal projectors, label 000 on the GHZ state"""
        ghz = projective_basis("ghz", 3)
        assert ghz.num_outcomes == 8
        assert ghz.num_qubits == 3
        vector = np.zeros(8)
        vector[0] = vector[7] = 1 / math.sqrt(2)
        state = PureState(vector, 3)
        assert expectation(state, ghz.projectors[0]) == pytest.approx(1.0, abs=1e-12)
        assert expectation(state, ghz.projectors[4]) == pytest.approx(0.0, abs=1e-12)

    def test_two_qubit_ghz_is_bell_up_to_order(self):
        """The n=2 GHZ basis holds the Bell projectors, each exactly once"""
        bell = projective_basis("bell").projectors
        matches = [
            [j for j, b in enumerate(bell) if np.allclose(g, b, atol=1e-12)]
            for g in projective_basis("ghz", 2).projectors
        ]
        assert all(len(m) == 1 for m in matches)
        assert sorted(m[0] for m in matches) == [0, 1, 2, 3]

    def test_unknown_basis(self):
        """Only bell and ghz are supported"""
        with pytest.raises(ArgumentError):
            projective_basis("w", 3)
