import math

import numpy as np
import pytest

from quantdoa.array_model import ArrayGeometry
from quantdoa.crlb import (
    OperatingPoint,
    covariance,
    covariance_derivative,
    crlb,
    effective_snr,
    fim_closed_form,
    fim_numeric,
    performance_loss_db,
)
from quantdoa.quantizer import QuantizerSpec


def point(M=16, theta_deg=15.0, bits=math.inf, snr_db=0.0, N=32, symmetric=False, d=0.5):
    return OperatingPoint(
        geometry=ArrayGeometry(M, d=d, symmetric=symmetric),
        theta=math.radians(theta_deg),
        signal_power=10.0 ** (snr_db / 10.0),
        noise_power=1.0,
        snapshots=N,
        spec=QuantizerSpec.for_bits(bits),
    )


def expected_ratio(pt):
    g = effective_snr(pt)
    M = pt.geometry.M
    return M * g / (M * g + 1.0)


class TestEffectiveSnr:
    def test_reduces_to_input_snr_at_infinite_bits(self):
        assert effective_snr(point(bits=math.inf, snr_db=0.0)) == 1.0

    def test_one_bit_unit_powers(self):
        assert effective_snr(point(bits=1, snr_db=0.0)) == pytest.approx(
            0.6366 / 1.3634, rel=1e-12
        )
        assert effective_snr(point(bits=1, snr_db=0.0)) == pytest.approx(0.46692, abs=5e-6)

    def test_two_bit_ten_db(self):
        assert effective_snr(point(bits=2, snr_db=10.0)) == pytest.approx(
            8.825 / 2.175, rel=1e-12
        )


class TestFisherInformation:
    def test_positive_everywhere(self):
        for pt in (point(), point(bits=1, snr_db=-20.0), point(M=4, theta_deg=-60.0, bits=2)):
            assert fim_numeric(pt) > 0
            assert fim_closed_form(pt) > 0

    def test_closed_form_plugin_value(self):
        pt = point(M=2, theta_deg=0.0, bits=math.inf, snr_db=0.0)
        assert fim_closed_form(pt) == pytest.approx(2 * (2 * math.pi) ** 2 * 0.25, rel=1e-12)
        assert fim_closed_form(pt) == pytest.approx(19.739, abs=5e-4)

    def test_linear_in_effective_snr(self):
        lo, hi = point(snr_db=0.0), point(snr_db=10.0)
        ratio = effective_snr(hi) / effective_snr(lo)
        assert fim_closed_form(hi) / fim_closed_form(lo) == pytest.approx(ratio, rel=1e-12)

    def test_ratio_identity_zero_centroid(self):
        # numeric/closed-form == M g / (M g + 1) whenever positions sum to zero
        for M in (4, 16, 128):
            for bits in (1, 2, 3, math.inf):
                for snr_db in (-20.0, 0.0, 20.0):
                    for theta_deg in (0.0, 15.0, 60.0):
                        pt = point(M=M, theta_deg=theta_deg, bits=bits, snr_db=snr_db, symmetric=True)
                        ratio = fim_numeric(pt) / fim_closed_form(pt)
                        assert abs(ratio / expected_ratio(pt) - 1.0) < 1e-9

    def test_ratio_identity_default_convention_carries_centroid_term(self):
        # with positions summing to M d / 2 the identity gains a centering factor
        for M in (4, 16, 128):
            pt = point(M=M, theta_deg=15.0, bits=2, snr_db=0.0)
            pos = pt.geometry.positions
            centering = 1.0 - pos.sum() ** 2 / (M * float(np.sum(pos**2)))
            ratio = fim_numeric(pt) / fim_closed_form(pt)
            assert abs(ratio / (expected_ratio(pt) * centering) - 1.0) < 1e-9

    def test_reference_ratio_at_unit_effective_snr(self):
        pt = point(M=128, theta_deg=15.0, bits=math.inf, snr_db=0.0, symmetric=True)
        assert effective_snr(pt) == 1.0
        ratio = fim_numeric(pt) / fim_closed_form(pt)
        assert ratio == pytest.approx(128.0 / 129.0, rel=1e-9)

    def test_endfire_limit_scales_like_cos_squared(self):
        base = point(theta_deg=15.0, bits=2)
        near_endfire = point(theta_deg=89.9, bits=2)
        expected = (math.cos(near_endfire.theta) / math.cos(base.theta)) ** 2
        assert fim_numeric(near_endfire) / fim_numeric(base) == pytest.approx(expected, rel=1e-9)
        assert fim_numeric(near_endfire) < 1e-4 * fim_numeric(base)


class TestGradient:
    def test_analytic_derivative_matches_finite_differences(self):
        rng = np.random.default_rng(204)
        for _ in range(20):
            M = int(rng.integers(4, 48))
            pt = OperatingPoint(
                geometry=ArrayGeometry(M, symmetric=bool(rng.integers(0, 2))),
                theta=float(rng.uniform(-1.3, 1.3)),
                signal_power=float(10.0 ** rng.uniform(-2, 2)),
                noise_power=1.0,
                snapshots=32,
                spec=QuantizerSpec.for_bits(int(rng.integers(1, 6))),
            )
            h = 1e-6
            up = OperatingPoint(pt.geometry, pt.theta + h, pt.signal_power, 1.0, 32, pt.spec)
            dn = OperatingPoint(pt.geometry, pt.theta - h, pt.signal_power, 1.0, 32, pt.spec)
            fd = (covariance(up) - covariance(dn)) / (2 * h)
            analytic = covariance_derivative(pt)
            rel = np.linalg.norm(fd - analytic) / np.linalg.norm(analytic)
            assert rel < 1e-5


class TestCrlb:
    def test_reference_value(self):
        pt = point(M=128, theta_deg=15.0, bits=math.inf, snr_db=0.0, N=32)
        value = crlb(pt)
        assert value == pytest.approx(9.708e-9, rel=5e-4)
        assert math.degrees(math.sqrt(value)) == pytest.approx(0.005645, abs=1e-6)

    def test_exact_variant_uses_numeric_fim(self):
        pt = point(M=16, theta_deg=10.0, bits=2)
        assert crlb(pt, exact=True) == pytest.approx(1.0 / (32 * fim_numeric(pt)), rel=1e-12)

    def test_snapshot_scaling(self):
        assert crlb(point(N=128)) == pytest.approx(crlb(point(N=32)) / 4.0, rel=1e-12)

    def test_ratio_to_infinite_bits_matches_loss_factor(self):
        for bits in (1, 2, 3, 5):
            for snr_db in (-10.0, 0.0, 10.0):
                gamma = 10.0 ** (snr_db / 10.0)
                ratio = crlb(point(bits=bits, snr_db=snr_db)) / crlb(
                    point(bits=math.inf, snr_db=snr_db)
                )
                assert abs(ratio / 10.0 ** (performance_loss_db(bits, gamma) / 10.0) - 1.0) < 1e-12

    def test_invariant_under_joint_power_scaling(self):
        # power-of-two scalings commute exactly with IEEE rounding
        base = OperatingPoint(ArrayGeometry(16), 0.3, 2.0, 0.5, 32, QuantizerSpec.for_bits(3))
        for c in (0.0625, 4.0, 256.0):
            scaled = OperatingPoint(
                ArrayGeometry(16), 0.3, c * 2.0, c * 0.5, 32, QuantizerSpec.for_bits(3)
            )
            assert crlb(scaled) == crlb(base)
            assert crlb(scaled, exact=True) == pytest.approx(crlb(base, exact=True), rel=1e-12)

    def test_rejects_invalid_points(self):
        with pytest.raises(ValueError):
            point(theta_deg=90.0)
        with pytest.raises(ValueError):
            OperatingPoint(ArrayGeometry(4), 0.1, 0.0, 1.0, 32, QuantizerSpec.for_bits(2))
        with pytest.raises(ValueError):
            OperatingPoint(ArrayGeometry(4), 0.1, 1.0, 1.0, 0, QuantizerSpec.for_bits(2))


class TestPerformanceLoss:
    def test_zero_at_infinite_bits(self):
        for gamma in (1e-6, 1.0, 1e6):
            assert performance_loss_db(math.inf, gamma) == 0.0

    def test_spot_values(self):
        # frozen from high-precision evaluation of 10 log10((1 + beta g)/alpha)
        assert performance_loss_db(1, 1e-12) == pytest.approx(1.9613337, abs=1e-4)
        assert performance_loss_db(2, 1.0) == pytest.approx(1.0253282, abs=1e-4)
        assert performance_loss_db(3, 1.0) == pytest.approx(0.3001300, abs=1e-4)
        assert performance_loss_db(5, 100.0) == pytest.approx(0.9796, abs=1e-4)

    def test_monotone_in_gamma_and_bits(self):
        gammas = 10.0 ** np.linspace(-2.5, 2.5, 21)
        for bits in (1, 2, 3, 4, 5, 8):
            losses = [performance_loss_db(bits, g) for g in gammas]
            assert all(b > a for a, b in zip(losses, losses[1:]))
        for g in gammas:
            by_bits = [performance_loss_db(b, g) for b in (1, 2, 3, 4, 5, 6, 7)]
            assert all(b < a for a, b in zip(by_bits, by_bits[1:]))

    def test_low_and_high_gamma_asymptotics(self):
        for bits in (1, 2, 3, 4, 5):
            spec = QuantizerSpec.for_bits(bits)
            floor = 10.0 * math.log10(1.0 / spec.alpha)
            assert performance_loss_db(bits, 1e-9) == pytest.approx(floor, abs=1e-6)
            slope = performance_loss_db(bits, 1e5) - performance_loss_db(bits, 1e4)
            assert 9.5 < slope <= 10.0

    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(ValueError):
            performance_loss_db(2, 0.0)
