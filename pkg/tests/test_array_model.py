import math
from fractions import Fraction

import numpy as np
import numpy.testing as npt
import pytest

from quantdoa.array_model import (
    ArrayGeometry,
    SourceSet,
    derive_rng,
    generate_snapshots,
    manifold,
    mean_square_aperture,
    steering_vector,
)


class TestArrayGeometry:
    def test_positions_paper_convention(self):
        g = ArrayGeometry(4, d=0.5)
        npt.assert_array_equal(g.positions, [-0.5, 0.0, 0.5, 1.0])

    def test_positions_symmetric_convention(self):
        g = ArrayGeometry(4, d=0.5, symmetric=True)
        npt.assert_array_equal(g.positions, [-0.75, -0.25, 0.25, 0.75])
        assert math.fsum(g.positions) == 0.0

    @pytest.mark.parametrize("M", [1, 2, 3, 17, 128])
    def test_uniform_spacing(self, M):
        g = ArrayGeometry(M, d=0.5)
        pos = g.positions
        assert pos.size == M
        assert np.all(np.diff(pos) > 0)
        npt.assert_array_equal(np.diff(pos), np.full(M - 1, 0.5))
        npt.assert_allclose(pos - pos[0], 0.5 * np.arange(M), rtol=0, atol=0)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            ArrayGeometry(0)
        with pytest.raises(ValueError):
            ArrayGeometry(4, d=0.0)
        with pytest.raises(ValueError):
            ArrayGeometry(4, wavelength=-1.0)


class TestSteeringVector:
    def test_broadside_is_all_ones(self):
        a = steering_vector(ArrayGeometry(4), 0.0)
        npt.assert_array_equal(a, np.ones(4, dtype=complex))

    def test_two_element_30_degrees(self):
        # element at half a wavelength picks up a quarter-cycle phase
        a = steering_vector(ArrayGeometry(2), math.radians(30.0))
        npt.assert_allclose(a, [1.0, 1.0j], atol=1e-15)

    def test_two_element_minus_30_degrees(self):
        a = steering_vector(ArrayGeometry(2), math.radians(-30.0))
        npt.assert_allclose(a, [1.0, -1.0j], atol=1e-15)

    def test_unit_modulus_everywhere(self):
        g = ArrayGeometry(32)
        for theta in np.linspace(-math.pi / 2 + 1e-6, math.pi / 2 - 1e-6, 101):
            npt.assert_allclose(np.abs(steering_vector(g, theta)), 1.0, rtol=0, atol=4e-16)

    def test_conjugation_symmetry(self):
        g = ArrayGeometry(16)
        for theta in (0.1, 0.7, 1.3, math.radians(15.0)):
            npt.assert_array_equal(
                np.conj(steering_vector(g, theta)), steering_vector(g, -theta)
            )

    @pytest.mark.parametrize("theta", [math.pi / 2, -math.pi / 2, 2.0])
    def test_rejects_out_of_domain_angles(self, theta):
        with pytest.raises(ValueError):
            steering_vector(ArrayGeometry(4), theta)

    def test_manifold_matches_steering_columns(self):
        g = ArrayGeometry(8)
        thetas = np.array([-0.4, 0.0, 0.9])
        A = manifold(g, thetas)
        for k, theta in enumerate(thetas):
            npt.assert_array_equal(A[:, k], steering_vector(g, theta))


class TestMeanSquareAperture:
    def test_two_elements(self):
        assert mean_square_aperture(ArrayGeometry(2)) == 0.25

    def test_single_element(self):
        assert mean_square_aperture(ArrayGeometry(1)) == 0.0625

    def test_reference_array(self):
        # closed form 0.25 * (2 * sum_{k=1..63} k^2 + 64^2)
        assert mean_square_aperture(ArrayGeometry(128)) == 43696.0

    @pytest.mark.parametrize("M", list(range(1, 20)) + [64, 127, 128, 333, 512])
    def test_matches_exact_rational_sum(self, M):
        g = ArrayGeometry(M, d=0.5)
        exact = sum(
            (Fraction(m) - Fraction(M, 2)) ** 2 * Fraction(1, 4) for m in range(1, M + 1)
        )
        assert mean_square_aperture(g) == float(exact)


class TestSourceSet:
    def test_total_power(self):
        s = SourceSet((0.1, -0.2, 0.3), (1.0, 2.0, 4.0))
        assert s.count == 3
        assert s.total_power == 7.0

    def test_rejects_duplicates_and_bad_powers(self):
        with pytest.raises(ValueError):
            SourceSet((0.1, 0.1), (1.0, 1.0))
        with pytest.raises(ValueError):
            SourceSet((0.1,), (0.0,))
        with pytest.raises(ValueError):
            SourceSet((), ())
        with pytest.raises(ValueError):
            SourceSet((math.pi / 2,), (1.0,))


class TestGenerateSnapshots:
    def test_determinism(self):
        g = ArrayGeometry(128)
        s = SourceSet((math.radians(15.0),), (1.0,))
        y1 = generate_snapshots(g, s, 1.0, 32, seed=7)
        y2 = generate_snapshots(g, s, 1.0, 32, seed=7)
        npt.assert_array_equal(y1.data, y2.data)
        assert y1.kind == "unquantized"
        assert y1.n_elements == 128 and y1.n_snapshots == 32

    def test_different_seeds_differ(self):
        g = ArrayGeometry(8)
        s = SourceSet((0.2,), (1.0,))
        y1 = generate_snapshots(g, s, 1.0, 16, seed=1)
        y2 = generate_snapshots(g, s, 1.0, 16, seed=2)
        assert not np.array_equal(y1.data, y2.data)

    def test_noiseless_rank_one_model(self):
        g = ArrayGeometry(8)
        theta = 0.3
        s = SourceSet((theta,), (1.0,))
        y = generate_snapshots(g, s, 0.0, 200_000, seed=11)
        R = y.data @ y.data.conj().T / y.n_snapshots
        a = steering_vector(g, theta)
        npt.assert_allclose(R, np.outer(a, a.conj()), atol=0.02)

    def test_empirical_covariance_converges(self):
        # Frobenius error vs the model covariance shrinks like 1/sqrt(N)
        g = ArrayGeometry(8)
        s = SourceSet((0.25, -0.6), (1.0, 2.0))
        noise = 0.5
        A = np.column_stack([steering_vector(g, a) for a in s.angles])
        R_model = A @ np.diag(s.powers) @ A.conj().T + noise * np.eye(8)

        def mean_err(N, n_seeds=4):
            errs = []
            for seed in range(n_seeds):
                y = generate_snapshots(g, s, noise, N, seed=100 + seed)
                R_hat = y.data @ y.data.conj().T / N
                errs.append(np.linalg.norm(R_hat - R_model))
            return np.mean(errs)

        e_small, e_big = mean_err(1000), mean_err(16_000)
        assert e_big < e_small
        # expected ratio 1/4; accept anything clearly below 1/2
        assert e_big / e_small < 0.5

    def test_sources_uncorrelated(self):
        g = ArrayGeometry(8)
        s = SourceSet((math.radians(-20.0), math.radians(35.0)), (1.0, 1.0))
        y = generate_snapshots(g, s, 0.0, 100_000, seed=42)
        A = np.column_stack([steering_vector(g, a) for a in s.angles])
        recovered = np.linalg.pinv(A) @ y.data
        c = recovered[0] @ recovered[1].conj() / y.n_snapshots
        rho = abs(c) / math.sqrt(
            float(np.mean(np.abs(recovered[0]) ** 2) * np.mean(np.abs(recovered[1]) ** 2))
        )
        assert rho < 0.02

    def test_rejects_bad_arguments(self):
        g = ArrayGeometry(4)
        s = SourceSet((0.1,), (1.0,))
        with pytest.raises(ValueError):
            generate_snapshots(g, s, 1.0, 0, seed=1)
        with pytest.raises(ValueError):
            generate_snapshots(g, s, -1.0, 8, seed=1)


class TestDeriveRng:
    def test_streams_keyed_independently(self):
        a = derive_rng(5, (0, 1)).standard_normal(4)
        b = derive_rng(5, (0, 1)).standard_normal(4)
        c = derive_rng(5, (1, 0)).standard_normal(4)
        npt.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_rejects_oversized_seed(self):
        with pytest.raises(ValueError):
            derive_rng(2**64)
        with pytest.raises(ValueError):
            derive_rng(-1)
