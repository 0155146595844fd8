import math

import numpy as np
import pytest
from scipy.integrate import quad

from gibbslines import polymer as pm
from gibbslines.errors import PrecisionError, ResourceLimitError
from gibbslines.special import scaling_constants


def inv_gamma_pdf(x, theta):
    return x ** (-theta - 1.0) * math.exp(-1.0 / x) / math.gamma(theta)


class TestWeightField:
    def test_density_normalizes(self):
        for theta in (0.5, 1.0, 3.0):
            mass, err = quad(inv_gamma_pdf, 0, np.inf, args=(theta,))
            assert err < 1e-8
            assert mass == pytest.approx(1.0, abs=1e-7)

    def test_density_mode(self):
        theta = 2.0
        mode = 1.0 / (theta + 1.0)
        for d in (1e-4, -1e-4):
            assert inv_gamma_pdf(mode, theta) > inv_gamma_pdf(mode + d, theta)

    def test_sample_mean(self):
        theta = 3.0
        mean_oracle, err = quad(lambda x: x * inv_gamma_pdf(x, theta), 0, np.inf)
        assert mean_oracle == pytest.approx(1.0 / (theta - 1.0), abs=1e-8)
        field = pm.sample_weight_field(theta, 500, 200, seed=11)
        draws = field.entries.ravel()  # 1e5 draws
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 0.5) < 4.0 * se

    def test_deterministic_and_positive(self):
        a = pm.sample_weight_field(1.0, 4, 4, seed=5)
        b = pm.sample_weight_field(1.0, 4, 4, seed=5)
        assert np.array_equal(a.entries, b.entries)
        assert np.all(a.entries > 0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            pm.sample_weight_field(-1.0, 3, 3, seed=0)
        with pytest.raises(ValueError):
            pm.sample_weight_field(1.0, 0, 3, seed=0)


class TestSinglePath:
    def test_all_ones_two_paths(self):
        field = pm.WeightField(entries=np.ones((3, 3)), theta=1.0)
        table = pm.single_path_partition(field, 2, 2)
        assert table[-1, -1] == pytest.approx(math.log(2.0), abs=1e-14)

    def test_column_climb(self):
        field = pm.sample_weight_field(2.0, 3, 4, seed=3)
        expect = np.log(field.entries[0, :4]).sum()
        got = pm.single_path_partition(field, 1, 4)[-1, -1]
        assert got == pytest.approx(expect, rel=1e-13)

    def test_against_enumeration(self):
        field = pm.sample_weight_field(1.0, 4, 4, seed=21)
        for n in (2, 3, 4):
            for k in (1, 2, 4):
                dp = pm.single_path_partition(field, n, k)[-1, -1]
                brute = pm.tau_bruteforce(field, k, 1, n)
                assert dp == pytest.approx(brute, rel=1e-12)

    def test_out_of_range(self):
        field = pm.sample_weight_field(1.0, 3, 3, seed=0)
        with pytest.raises(ValueError):
            pm.single_path_partition(field, 5, 2)


class TestTau:
    def test_empty_family_convention(self):
        field = pm.sample_weight_field(1.0, 4, 4, seed=2)
        assert pm.tau_bruteforce(field, 3, 3, 2) == -np.inf
        assert pm.tau_lgv(field, 3, 3, 2) == -np.inf

    def test_forced_tuple_when_l_equals_k(self):
        field = pm.sample_weight_field(1.0, 3, 3, seed=7)
        expect = np.log(field.entries[:2, :2]).sum()
        assert pm.tau_bruteforce(field, 2, 2, 2) == pytest.approx(expect, rel=1e-13)
        assert pm.tau_lgv(field, 2, 2, 2) == pytest.approx(expect, rel=1e-12)

    def test_lgv_reduces_to_dp_at_l1(self):
        field = pm.sample_weight_field(0.7, 5, 4, seed=9)
        for n, k in ((3, 2), (5, 4)):
            assert pm.tau_lgv(field, k, 1, n) == pytest.approx(
                pm.single_path_partition(field, n, k)[-1, -1], rel=1e-12
            )

    def test_oracle_triangle_small(self):
        # enumeration = determinant on 20 random fields
        for trial in range(20):
            field = pm.sample_weight_field(1.0, 5, 4, seed=4000 + trial)
            for n in range(1, 6):
                for k in range(1, 5):
                    for l in range(1, min(k, n) + 1):
                        brute = pm.tau_bruteforce(field, k, l, n)
                        det = pm.tau_lgv(field, k, l, n)
                        assert det == pytest.approx(brute, rel=1e-9)

    def test_enumeration_guard(self):
        field = pm.sample_weight_field(1.0, 12, 12, seed=0)
        with pytest.raises(ResourceLimitError):
            pm.tau_bruteforce(field, 12, 4, 12, max_tuples=10**4)

    def test_environment_monotonicity(self):
        # raising one weight cannot decrease any partition function
        field = pm.sample_weight_field(1.0, 4, 4, seed=31)
        entries = field.entries.copy()
        entries[1, 1] *= 3.0
        bigger = pm.WeightField(entries=entries, theta=1.0)
        for (k, l, n) in ((3, 2, 4), (4, 1, 3), (2, 2, 3)):
            assert pm.tau_lgv(bigger, k, l, n) >= pm.tau_lgv(field, k, l, n)

    def test_double_double_agrees(self):
        field = pm.sample_weight_field(1.0, 5, 4, seed=17)
        a = pm.tau_lgv(field, 4, 2, 5, precision="double")
        b = pm.tau_lgv(field, 4, 2, 5, precision="double-double")
        assert a == pytest.approx(b, rel=1e-12)

    def test_bad_precision_mode(self):
        field = pm.sample_weight_field(1.0, 3, 3, seed=0)
        with pytest.raises(ValueError):
            pm.tau_lgv(field, 2, 1, 2, precision="quad")


class TestZArray:
    def test_l1_is_tau(self):
        field = pm.sample_weight_field(1.0, 4, 3, seed=13)
        table = pm.build_partition_table(field, k=3, l_max=2, n_values=range(2, 5))
        z = pm.z_array(table, 3, range(2, 5))
        for col, n in enumerate(range(2, 5)):
            assert z[0, col] == table.value(1, n)

    def test_telescoping_exact(self):
        field = pm.sample_weight_field(1.0, 4, 4, seed=19)
        table = pm.build_partition_table(field, k=4, l_max=3, n_values=range(3, 5))
        z = pm.z_array(table, 4, range(3, 5))
        # sums of log z's reproduce log tau bit-for-bit (they are differences)
        sums = np.cumsum(z, axis=0)
        for l in (1, 2, 3):
            for col, n in enumerate(range(3, 5)):
                assert sums[l - 1, col] == pytest.approx(table.value(l, n), abs=1e-12)

    def test_ratio_against_bruteforce(self):
        field = pm.sample_weight_field(1.0, 4, 3, seed=23)
        table = pm.build_partition_table(field, k=3, l_max=2, n_values=[3])
        z = pm.z_array(table, 3, [3])
        expect = pm.tau_bruteforce(field, 3, 2, 3) - pm.tau_bruteforce(field, 3, 1, 3)
        assert z[1, 0] == pytest.approx(expect, rel=1e-9)

    def test_domain_errors(self):
        field = pm.sample_weight_field(1.0, 4, 3, seed=1)
        table = pm.build_partition_table(field, k=3, l_max=2, n_values=range(2, 5))
        with pytest.raises(ValueError):
            pm.z_array(table, 2, range(2, 5))  # wrong k
        with pytest.raises(ValueError):
            pm.z_array(table, 3, range(1, 3))  # n below l_max


class TestLineEnsemble:
    def test_top_curve_is_centered_single_path(self):
        theta, N = 1.0, 3
        ens = pm.polymer_line_ensemble(theta, N, 1, seed=77)
        field = pm.sample_weight_field(theta, 3 * N, 2 * N, seed=77)
        center = 2 * N * scaling_constants(theta).h_theta_1
        for j in (-N, 0, N):
            direct = pm.single_path_partition(field, 2 * N + j, 2 * N)[-1, -1]
            assert ens.value(1, j) == pytest.approx(direct + center, rel=1e-10, abs=1e-8)

    def test_against_bruteforce_small(self):
        theta, N = 1.0, 2
        ens = pm.polymer_line_ensemble(theta, N, 2, seed=42)
        field = pm.sample_weight_field(theta, 3 * N, 2 * N, seed=42)
        center = 2 * N * scaling_constants(theta).h_theta_1
        for j in (-2, -1, 0, 1, 2):
            for i in (1, 2):
                log_z = pm.tau_bruteforce(field, 2 * N, i, 2 * N + j)
                if i > 1:
                    log_z -= pm.tau_bruteforce(field, 2 * N, i - 1, 2 * N + j)
                assert ens.value(i, j) == pytest.approx(log_z + center, rel=1e-9, abs=1e-7)

    def test_determinism(self):
        a = pm.polymer_line_ensemble(1.0, 2, 2, seed=5)
        b = pm.polymer_line_ensemble(1.0, 2, 2, seed=5)
        assert np.array_equal(a.curves, b.curves)

    def test_interpolation_semantics(self):
        ens = pm.polymer_line_ensemble(1.0, 2, 1, seed=3)
        assert ens.value(1, 1) == ens.curves[0, 3]
        mid = 0.5 * (ens.curves[0, 2] + ens.curves[0, 3])
        assert ens.value(1, 0.5) == pytest.approx(mid, rel=1e-15)

    def test_curve_ordering_all_finite(self):
        ens = pm.polymer_line_ensemble(1.0, 4, 3, seed=8)
        assert np.all(np.isfinite(ens.curves))

    def test_batched_top_curves_match_statistics(self):
        # the batched sampler and the ensemble route agree in distribution;
        # here check shape, centering scale and determinism
        tc = pm.sample_top_curves(1.0, 4, 50, seed=12)
        tc2 = pm.sample_top_curves(1.0, 4, 50, seed=12)
        assert tc.shape == (50, 9)
        assert np.array_equal(tc, tc2)

    def test_invalid_k_top(self):
        with pytest.raises(ValueError):
            pm.polymer_line_ensemble(1.0, 2, 3, seed=0)
