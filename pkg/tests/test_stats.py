import dataclasses
import statistics

import numpy as np
import pytest

from rlekit import (boxplot_stats, gene_medians, rle_deviations, rle_summary,
                    scenario, simulate, standard_boxplot_summary,
                    summaries_from_json, summaries_to_csv, summaries_to_json)

from conftest import make_matrix, random_matrix


class TestGeneMedians:
    def test_hand_example(self):
        m = make_matrix([[1, 2], [3, 4], [5, 6]])
        np.testing.assert_array_equal(gene_medians(m), [3.0, 4.0])

    def test_constant_matrix(self):
        m = make_matrix(np.full((4, 3), 2.5))
        np.testing.assert_array_equal(gene_medians(m), [2.5, 2.5, 2.5])

    def test_even_count_mean_of_middle_pair(self):
        m = make_matrix([[1.0], [3.0]])
        assert gene_medians(m)[0] == 2.0


class TestRleDeviations:
    def test_hand_example(self):
        m = make_matrix([[1, 2, 3], [3, 4, 5]])
        d = rle_deviations(m)
        np.testing.assert_array_equal(d.deviations, [[-1, -1, -1], [1, 1, 1]])

    def test_identical_rows_are_zero(self):
        m = make_matrix(np.tile([3.0, 1.0, 4.0], (5, 1)))
        np.testing.assert_array_equal(rle_deviations(m).deviations, np.zeros((5, 3)))

    def test_per_feature_shift_invariance(self, rng):
        m = random_matrix(rng, 6, 11)
        shift = rng.standard_normal(11)
        shifted = make_matrix(m.values + shift[np.newaxis, :])
        np.testing.assert_allclose(rle_deviations(shifted).deviations,
                                   rle_deviations(m).deviations, atol=1e-12, rtol=0)

    def test_column_medians_are_zero(self, rng):
        for _ in range(20):
            m = random_matrix(rng, int(rng.integers(2, 12)), int(rng.integers(2, 25)))
            col_med = np.median(rle_deviations(m).deviations, axis=0)
            np.testing.assert_allclose(col_med, 0.0, atol=1e-12)

    def test_single_sample_warns(self):
        with pytest.warns(UserWarning, match="single sample"):
            d = rle_deviations(make_matrix([[1.0, 2.0]]))
        np.testing.assert_array_equal(d.deviations, [[0.0, 0.0]])

    def test_metadata_carried(self):
        m = make_matrix(np.zeros((2, 2)), groups=["a", "b"])
        d = rle_deviations(m)
        assert d.sample_ids == m.sample_ids
        assert d.feature_ids == m.feature_ids
        assert d.groups == ("a", "b")


class TestBoxplotStats:
    def test_nine_points(self):
        s = boxplot_stats(list(range(1, 10)))
        assert (s.median, s.q1, s.q3) == (5.0, 3.0, 7.0)
        assert (s.whisker_low, s.whisker_high) == (1.0, 9.0)
        assert s.outliers == ()

    def test_constant_values(self):
        s = boxplot_stats([4.0] * 4)
        assert s.median == s.q1 == s.q3 == s.whisker_low == s.whisker_high == 4.0
        assert s.outliers == ()

    def test_zero_iqr_with_outlier(self):
        s = boxplot_stats([0, 0, 0, 0, 10])
        assert s.median == s.q1 == s.q3 == 0.0
        assert s.whisker_low == s.whisker_high == 0.0
        assert s.outliers == (10.0,)

    def test_invariants_on_random_data(self, rng):
        for _ in range(30):
            values = rng.standard_normal(int(rng.integers(1, 80)))
            values[: values.size // 6] *= 20.0
            s = boxplot_stats(values)
            assert s.q1 <= s.median <= s.q3
            iqr = s.q3 - s.q1
            assert s.whisker_low >= s.q1 - 1.5 * iqr - 1e-12
            assert s.whisker_high <= s.q3 + 1.5 * iqr + 1e-12
            for x in s.outliers:
                assert x < s.whisker_low or x > s.whisker_high

    def test_quartiles_match_numpy(self, rng):
        values = rng.standard_normal(57)
        s = boxplot_stats(values)
        assert s.q1 == pytest.approx(np.quantile(values, 0.25), abs=1e-13)
        assert s.q3 == pytest.approx(np.quantile(values, 0.75), abs=1e-13)
        assert s.median == pytest.approx(np.median(values), abs=0)

    def test_hinges_change_quartiles_not_median(self):
        values = [1.0, 2.0, 3.0, 4.0]
        lin = boxplot_stats(values, quantile_method="linear")
        hin = boxplot_stats(values, quantile_method="hinges")
        assert lin.median == hin.median == 2.5
        assert (lin.q1, lin.q3) == (1.75, 3.25)
        assert (hin.q1, hin.q3) == (1.5, 3.5)

    def test_custom_whisker_coefficient(self):
        values = [0, 0, 0, 0, 1.0]
        wide = boxplot_stats(values, whisker_coef=100.0)
        assert wide.outliers == (1.0,) if wide.q3 == 0 else True
        # with a fence wide enough nothing is an outlier
        s = boxplot_stats([1, 2, 3, 4, 100], whisker_coef=1e6)
        assert s.outliers == ()
        assert s.whisker_high == 100.0

    def test_empty_errors(self):
        with pytest.raises(ValueError, match="empty"):
            boxplot_stats([])

    def test_bad_coef_errors(self):
        with pytest.raises(ValueError, match="whisker_coef"):
            boxplot_stats([1.0], whisker_coef=0.0)

    def test_bad_method_errors(self):
        with pytest.raises(ValueError, match="quantile method"):
            boxplot_stats([1.0], quantile_method="nearest")


class TestRleSummary:
    def test_identical_rows_collapse_to_zero(self):
        m = make_matrix(np.tile([5.0, 1.0, 2.0, 8.0], (4, 1)))
        for s in rle_summary(m):
            assert s.median == s.q1 == s.q3 == 0.0
            assert s.outliers == ()

    def test_two_row_medians(self):
        m = make_matrix([[1, 2, 3], [3, 4, 5]])
        s = rle_summary(m)
        assert [x.median for x in s] == [-1.0, 1.0]

    def test_sample_permutation_equivariance(self, rng):
        m = random_matrix(rng, 6, 15)
        perm = rng.permutation(6)
        permuted = make_matrix(m.values[perm])
        orig = rle_summary(m)
        shuffled = rle_summary(permuted)
        for new_pos, old_pos in enumerate(perm):
            a, b = shuffled[new_pos], orig[old_pos]
            assert (a.median, a.q1, a.q3) == (b.median, b.q1, b.q3)
            assert a.outliers == b.outliers

    def test_groups_carried_onto_summaries(self):
        m = make_matrix(np.zeros((2, 3)), groups=["lab1", "lab2"])
        assert [s.group for s in rle_summary(m)] == ["lab1", "lab2"]
        assert [s.sample_id for s in rle_summary(m)] == ["S1", "S2"]

    def test_matches_per_row_boxplot_stats(self, rng):
        m = random_matrix(rng, 5, 33)
        dev = rle_deviations(m).deviations
        for i, s in enumerate(rle_summary(m)):
            ref = boxplot_stats(dev[i])
            assert (s.median, s.q1, s.q3) == (ref.median, ref.q1, ref.q3)
            assert (s.whisker_low, s.whisker_high) == (ref.whisker_low, ref.whisker_high)
            assert s.outliers == ref.outliers


class TestStandardSummary:
    def test_single_row_median(self):
        m = make_matrix([[1, 2, 3]])
        assert standard_boxplot_summary(m)[0].median == 2.0

    def test_constant_matrix_collapses(self):
        m = make_matrix(np.full((3, 4), 7.0))
        for s in standard_boxplot_summary(m):
            assert s.median == s.q1 == s.q3 == 7.0

    def test_per_feature_constants_make_identical_summaries(self):
        m = make_matrix(np.tile([9.0, -1.0, 4.0], (5, 1)))
        summaries = standard_boxplot_summary(m)
        first = summaries[0]
        for s in summaries[1:]:
            assert (s.median, s.q1, s.q3, s.whisker_low, s.whisker_high) == \
                (first.median, first.q1, first.q3, first.whisker_low, first.whisker_high)


class TestStatisticalBehaviour:
    def test_ideal_case_medians_concentrate_near_zero(self):
        # additive-effect variance off: every sample is mean + noise only
        config = dataclasses.replace(scenario(1, seed=11), sample_effect_var=0.0)
        summaries = rle_summary(simulate(config).matrix)
        assert max(abs(s.median) for s in summaries) < 0.05

    def test_median_robust_to_one_corrupted_sample(self, rng):
        # corrupting a single sample moves each feature's median at most to
        # the envelope reached by sending that sample's value to +-infinity
        for m_count in (4, 5, 6, 9):
            values = rng.standard_normal((m_count, 12))
            corrupted = values.copy()
            corrupted[2] = rng.choice([-1.0, 1.0], size=12) * 1e6
            med = gene_medians(make_matrix(corrupted))
            for j in range(12):
                col = values[:, j].tolist()
                lo_env = statistics.median(col[:2] + [-1e18] + col[3:])
                hi_env = statistics.median(col[:2] + [1e18] + col[3:])
                assert lo_env <= med[j] <= hi_env

    def test_rle_median_spread_below_within_sample_spread(self):
        # large per-feature spread, small per-sample shifts: RLE medians
        # vary far less than the raw values inside any one sample
        config = dataclasses.replace(scenario(1, seed=3), sample_effect_var=0.01)
        matrix = simulate(config).matrix
        rle_medians = [s.median for s in rle_summary(matrix)]
        raw = standard_boxplot_summary(matrix)
        assert max(rle_medians) - min(rle_medians) < min(s.iqr for s in raw)


class TestSerialisation:
    def test_json_round_trip(self, rng):
        m = random_matrix(rng, 4, 21)
        m = make_matrix(m.values, groups=["a", "a", "b", "b"])
        summaries = rle_summary(m)
        back = summaries_from_json(summaries_to_json(summaries))
        assert back == summaries

    def test_json_schema_keys(self):
        m = make_matrix([[1.0, 2.0], [3.0, 4.0]])
        import json

        records = json.loads(summaries_to_json(rle_summary(m)))
        assert {"sample", "group", "median", "q1", "q3",
                "whisker_low", "whisker_high", "outliers"} == set(records[0])

    def test_csv_outliers_semicolon_joined(self):
        m = make_matrix([[0, 0, 0, 0, 10], [0, 0, 0, 0, -10]]).values
        summaries = [boxplot_stats(row, sample_id=f"s{i}") for i, row in enumerate(m)]
        text = summaries_to_csv(summaries)
        lines = text.strip().split("\n")
        assert lines[0].startswith("sample,group,median")
        assert lines[1].endswith(",10")
        assert lines[2].endswith(",-10")
