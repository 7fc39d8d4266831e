import numpy as np
import pytest

from specdep.bands import default_bands
from specdep.ks import DetectionConfig
from specdep.marginals import BootstrapConfig
from specdep.simulate import (
    DEFAULT_THRESHOLDS,
    DgpSpec,
    ThresholdTable,
    calibrate_thresholds,
    collect_null_statistics,
    default_threshold_table,
    dgp2_band_specs,
    power_scenario,
    simulate,
    simulate_dgp1,
    simulate_dgp2,
    simulate_gate_pair,
)


def mean_periodogram_peak_hz(epochs):
    T = epochs.shape[1]
    spec = np.mean(np.abs(np.fft.rfft(epochs, axis=1)) ** 2, axis=0) / T
    return float(np.argmax(spec[1:]) + 1) * 1000.0 / T


class TestDgp1:
    def test_offset_between_variants(self):
        za = simulate_dgp1("A", 100, 1000, seed=1)
        zb = simulate_dgp1("B", 100, 1000, seed=1)
        assert abs(zb.mean() - za.mean() - 1.0) < 0.05

    def test_lag1_autocorrelation(self):
        # Z = 0.9 X + eps with X an AR(1) at 0.9 and Var(eps) = 0.1:
        # corr(Z_t, Z_t-1) = 0.9 * Var(0.9 X) / Var(Z)
        z = simulate_dgp1("A", 100, 1000, seed=2)
        var_signal = 0.81 / (1 - 0.81)
        theory = 0.9 * 0.81 * var_signal / (0.81 * var_signal + 0.1)
        sample = np.mean([np.corrcoef(row[:-1], row[1:])[0, 1] for row in z])
        assert abs(sample - theory) < 0.05

    def test_seed_reproducibility(self):
        a = simulate_dgp1("A", 5, 500, seed=3)
        b = simulate_dgp1("A", 5, 500, seed=3)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, simulate_dgp1("A", 5, 500, seed=4))

    def test_epochs_are_fresh_draws(self):
        z = simulate_dgp1("A", 3, 500, seed=5)
        assert not np.array_equal(z[0], z[1])

    def test_noise_interpretation_flag(self):
        lo = simulate_dgp1("A", 50, 1000, seed=6, noise_var=0.1, noise_is_sd=True)
        hi = simulate_dgp1("A", 50, 1000, seed=6, noise_var=0.1, noise_is_sd=False)
        # sd 0.1 adds variance 0.01 versus variance 0.1
        assert lo.var() < hi.var()

    def test_variant_validation(self):
        with pytest.raises(ValueError):
            simulate_dgp1("C", 5, 100, seed=0)


def ar2_theoretical_peak_hz(nominal_hz, rho, T=1000, fs=1000.0):
    """Oracle: minimize the AR(2) transfer denominator on a dense grid."""
    p = 2 * np.pi * nominal_hz / T
    phi1, phi2 = 2 * rho * np.cos(p), -rho * rho
    w = np.linspace(1e-6, np.pi, 200_000)
    denom = (1 - phi1 * np.cos(w) - phi2 * np.cos(2 * w)) ** 2 + (
        phi1 * np.sin(w) + phi2 * np.sin(2 * w)
    ) ** 2
    return float(w[np.argmin(denom)] * fs / (2 * np.pi))


class TestDgp2:
    @pytest.mark.parametrize("index,nominal", [(1, 4.0), (3, 9.0), (6, 150.0)])
    def test_peak_matches_ar2_theory_at_default_rho(self, index, nominal):
        # the true AR(2) peak sits below the nominal root phase when the
        # modulus is not close enough to 1 (at 0.97 the 4 Hz resonance is
        # swallowed by the low-frequency shoulder entirely)
        z = simulate_dgp2(index, 100, 1000, seed=7, rho=0.97)
        theory = ar2_theoretical_peak_hz(nominal, 0.97)
        assert abs(mean_periodogram_peak_hz(z) - theory) <= 1.0

    @pytest.mark.parametrize("index,nominal", [(1, 4.0), (3, 9.0), (6, 150.0)])
    def test_peak_near_nominal_for_rho_close_to_one(self, index, nominal):
        z = simulate_dgp2(index, 100, 1000, seed=7, rho=0.995)
        assert abs(mean_periodogram_peak_hz(z) - nominal) <= 1.0

    def test_small_rho_flattens_spectrum(self):
        sharp = simulate_dgp2(2, 50, 1000, seed=8, rho=0.97)
        flat = simulate_dgp2(2, 50, 1000, seed=8, rho=0.05)

        def peak_to_mean(epochs):
            spec = np.mean(np.abs(np.fft.rfft(epochs, axis=1)) ** 2, axis=0)[1:]
            return spec.max() / spec.mean()

        assert peak_to_mean(sharp) > 20.0
        assert peak_to_mean(flat) < 5.0

    def test_index_and_rho_validation(self):
        with pytest.raises(ValueError):
            simulate_dgp2(7, 10, 100, seed=0)
        with pytest.raises(ValueError):
            simulate_dgp2(1, 10, 100, seed=0, rho=1.0)


class TestDgpSpec:
    def test_kind_validation(self):
        with pytest.raises(ValueError, match="unknown DGP kind"):
            DgpSpec("dgp2-7", 10, 100)
        with pytest.raises(ValueError):
            DgpSpec("dgp1-a", 10, 100, rho=1.5)

    def test_simulate_dispatch_shapes(self):
        for kind in ("dgp1-a", "dgp1-b", "dgp2-4"):
            z = simulate(DgpSpec(kind, 4, 300, seed=1))
            assert z.shape == (4, 300)


class TestCalibrateThresholds:
    def test_quantile_with_rare_tail(self):
        stats = np.concatenate([np.zeros(990), np.ones(10)])
        table = calibrate_thresholds({"delta": stats}, alpha=0.01)
        assert 0.0 < table.for_band("delta") <= 1.0

    def test_all_equal_statistics(self):
        table = calibrate_thresholds({"beta": np.full(200, 0.042)}, alpha=0.01)
        assert table.for_band("beta") == pytest.approx(0.042)

    def test_requires_100_statistics(self):
        with pytest.raises(ValueError, match="at least 100"):
            calibrate_thresholds({"delta": np.zeros(99)}, alpha=0.01)

    def test_monotone_in_alpha(self):
        rng = np.random.default_rng(9)
        stats = {"gamma": rng.random(500)}
        t1 = calibrate_thresholds(stats, alpha=0.01).for_band("gamma")
        t50 = calibrate_thresholds(stats, alpha=0.5).for_band("gamma")
        assert t50 <= t1

    def test_table_serialization_round_trip(self):
        table = calibrate_thresholds({"delta": np.linspace(0, 1, 120)}, alpha=0.05, source="dgp1")
        again = ThresholdTable.from_dict(table.to_dict())
        assert again.thresholds == table.thresholds
        assert again.alpha == table.alpha
        assert again.source == "dgp1"
        assert again.n_null_stats == table.n_null_stats

    def test_default_table_matches_shipped_values(self):
        table = default_threshold_table()
        assert table.thresholds == DEFAULT_THRESHOLDS
        assert table.alpha == 0.01 and table.source == "dgp2"


class TestBandSpecMapping:
    def test_dgp2_band_assignment(self):
        specs = dgp2_band_specs(100, 1000, seed=0)
        assert [s.kind for s in specs["delta"]] == ["dgp2-1"]
        assert [s.kind for s in specs["theta"]] == ["dgp2-2"]
        assert [s.kind for s in specs["alpha"]] == ["dgp2-3"]
        assert [s.kind for s in specs["beta"]] == ["dgp2-4", "dgp2-5"]
        assert [s.kind for s in specs["gamma"]] == ["dgp2-6"]


FAST = DetectionConfig(bootstrap=BootstrapConfig(n_blocks=10, n_replicates=30, seed=0), grid_size=41)


class TestNullStatisticsAndPower:
    def test_null_statistic_count(self):
        spec = DgpSpec("dgp1-a", 8, 200, seed=1)
        stats = collect_null_statistics([spec], default_bands()[0], 200.0, FAST)
        assert stats.shape == (6,)  # R - 2 per run
        assert np.all((stats >= 0) & (stats <= 1))

    def test_power_scenario_boundaries(self):
        segments = [DgpSpec("dgp1-a", 5, 200, seed=1), DgpSpec("dgp1-b", 4, 200, seed=2)]
        result = power_scenario(segments, default_bands()[0], 200.0, FAST, threshold=np.inf)
        assert result.boundaries == (6,)
        assert result.n_exceedances == 0
        assert list(result.report.ks.epochs) == list(range(2, 9))

    def test_single_segment_allowed(self):
        result = power_scenario(
            [DgpSpec("dgp1-a", 5, 200, seed=3)], default_bands()[0], 200.0, FAST, threshold=np.inf
        )
        assert result.boundaries == ()

    def test_mismatched_epoch_lengths(self):
        with pytest.raises(ValueError, match="epoch length"):
            power_scenario(
                [DgpSpec("dgp1-a", 4, 200, seed=1), DgpSpec("dgp1-b", 4, 400, seed=1)],
                default_bands()[0],
                200.0,
                FAST,
                threshold=1.0,
            )


class TestGatePair:
    def test_shapes_and_validation(self):
        x, y = simulate_gate_pair(6, 300, change_epoch=4, seed=1)
        assert x.shape == y.shape == (6, 300)
        with pytest.raises(ValueError):
            simulate_gate_pair(6, 300, change_epoch=1, seed=1)
        with pytest.raises(ValueError):
            simulate_gate_pair(6, 300, change_epoch=7, seed=1)

    def test_reproducible(self):
        a = simulate_gate_pair(4, 200, change_epoch=3, seed=2)
        b = simulate_gate_pair(4, 200, change_epoch=3, seed=2)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])
