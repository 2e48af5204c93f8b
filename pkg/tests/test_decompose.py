import dataclasses

import numpy as np
import pytest

from rlekit import (ExpressionMatrix, decompose, remove_additive_sample_effect,
                    remove_nonadditive, rle_deviations, rle_series, rle_summary,
                    scenario, simulate, svd_partition, twoway_residual)

from conftest import make_matrix, random_matrix


def additive_matrix(row_effects, col_effects):
    a = np.asarray(row_effects, dtype=np.float64)
    b = np.asarray(col_effects, dtype=np.float64)
    return make_matrix(a[:, np.newaxis] + b[np.newaxis, :])


def frob_rel(delta, ref):
    return np.linalg.norm(delta) / np.linalg.norm(ref)


class TestRemoveAdditive:
    def test_annihilates_sample_effects(self, rng):
        a = rng.standard_normal(5)
        b = rng.standard_normal(8)
        out = remove_additive_sample_effect(additive_matrix(a, b))
        expected_row = b - b.mean()
        for i in range(5):
            np.testing.assert_allclose(out[i], expected_row, atol=1e-12)

    def test_constant_matrix_goes_to_zero(self):
        out = remove_additive_sample_effect(make_matrix(np.full((3, 3), 4.2)))
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    def test_hand_example(self):
        out = remove_additive_sample_effect(make_matrix([[1, 2, 3], [5, 5, 5]]))
        np.testing.assert_array_equal(out, [[-1, 0, 1], [0, 0, 0]])

    def test_rows_have_zero_mean(self, rng):
        out = remove_additive_sample_effect(random_matrix(rng, 6, 11))
        np.testing.assert_allclose(out.mean(axis=1), 0.0, atol=1e-12)

    def test_gene_centering_alternative(self, rng):
        m = random_matrix(rng, 5, 7)
        out = remove_additive_sample_effect(m, center="gene")
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-12)

    def test_gene_centering_leaves_rle_unchanged(self, rng):
        m = random_matrix(rng, 5, 9)
        centered = make_matrix(remove_additive_sample_effect(m, center="gene"))
        for a, b in zip(rle_summary(centered), rle_summary(m)):
            assert a.median == pytest.approx(b.median, abs=1e-12)
            assert a.q1 == pytest.approx(b.q1, abs=1e-12)
            assert a.q3 == pytest.approx(b.q3, abs=1e-12)

    def test_too_small_errors(self):
        with pytest.raises(ValueError):
            remove_additive_sample_effect(make_matrix([[1.0, 2.0]]))

    def test_unknown_center_errors(self):
        with pytest.raises(ValueError, match="center"):
            remove_additive_sample_effect(make_matrix(np.eye(3)), center="both")


class TestTwowayResidual:
    def test_additive_matrix_vanishes(self, rng):
        d = twoway_residual(additive_matrix(rng.standard_normal(4),
                                            rng.standard_normal(6)))
        np.testing.assert_allclose(d, 0.0, atol=1e-12)

    def test_hand_example(self):
        d = twoway_residual(make_matrix([[1, 2], [3, 5]]))
        np.testing.assert_allclose(d, [[0.25, -0.25], [-0.25, 0.25]], atol=1e-15)

    def test_double_centered_input_unchanged(self, rng):
        u = rng.standard_normal(5)
        v = rng.standard_normal(7)
        y = np.outer(u - u.mean(), v - v.mean())
        np.testing.assert_allclose(twoway_residual(y), y, atol=1e-12)

    def test_idempotent(self, rng):
        y = random_matrix(rng, 6, 10).values
        once = twoway_residual(y)
        np.testing.assert_allclose(twoway_residual(once), once, atol=1e-12)

    def test_commutes_with_row_centering(self, rng):
        y = random_matrix(rng, 7, 9).values
        np.testing.assert_allclose(twoway_residual(remove_additive_sample_effect(y)),
                                   twoway_residual(y), atol=1e-10)

    def test_row_and_column_means_vanish(self, rng):
        y = 10.0 * random_matrix(rng, 8, 14).values
        d = twoway_residual(y)
        scale = np.abs(d).max()
        np.testing.assert_allclose(d.mean(axis=0), 0.0, atol=1e-10 * scale)
        np.testing.assert_allclose(d.mean(axis=1), 0.0, atol=1e-10 * scale)


class TestSvdPartition:
    def test_zero_matrix_has_no_components(self):
        s, u, v = svd_partition(np.zeros((4, 6)))
        assert s.size == 0
        assert u.shape == (4, 0)
        assert v.shape == (6, 0)

    def test_rank_one_construction(self):
        e = np.array([0.5, 0.5, -0.5, -0.5])
        f = np.array([0.5, -0.5, 0.5, -0.5])
        s, u, v = svd_partition(3.0 * np.outer(e, f))
        assert s.shape == (1,)
        assert s[0] == pytest.approx(3.0, abs=1e-12)
        rebuilt = s[0] * np.outer(u[:, 0], v[:, 0])
        np.testing.assert_allclose(rebuilt, 3.0 * np.outer(e, f), atol=1e-12)

    def test_components_sum_to_input(self, rng):
        d = twoway_residual(random_matrix(rng, 5, 8).values)
        s, u, v = svd_partition(d)
        rebuilt = (u * s) @ v.T
        assert frob_rel(rebuilt - d, d) < 1e-8

    def test_singular_values_descending(self, rng):
        d = twoway_residual(random_matrix(rng, 6, 9).values)
        s, _, _ = svd_partition(d)
        assert (np.diff(s) <= 0).all()

    def test_sign_convention(self, rng):
        d = twoway_residual(random_matrix(rng, 6, 9).values)
        _, u, _ = svd_partition(d)
        for k in range(u.shape[1]):
            assert u[np.argmax(np.abs(u[:, k])), k] > 0

    def test_deterministic_across_runs(self, rng):
        d = twoway_residual(random_matrix(rng, 7, 11).values)
        a = svd_partition(d)
        b = svd_partition(d.copy())
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_warns_on_uncentered_input(self, rng):
        with pytest.warns(UserWarning, match="double-centered"):
            svd_partition(random_matrix(rng, 4, 5).values + 3.0)

    def test_rank_tol_drops_small_components(self):
        e = np.array([0.5, 0.5, -0.5, -0.5])
        f = np.array([0.5, -0.5, 0.5, -0.5])
        e2 = np.array([0.5, -0.5, -0.5, 0.5])
        f2 = np.array([0.5, 0.5, -0.5, -0.5])
        d = 2.0 * np.outer(e, f) + 1e-9 * np.outer(e2, f2)
        s_strict, _, _ = svd_partition(d, rank_tol=1e-12)
        s_loose, _, _ = svd_partition(d, rank_tol=1e-6)
        assert s_strict.size == 2
        assert s_loose.size == 1


class TestRemoveNonadditive:
    def test_p_zero_is_identity(self, rng):
        m = random_matrix(rng, 5, 9)
        dec = decompose(m)
        np.testing.assert_array_equal(remove_nonadditive(dec.centered, dec, 0),
                                      dec.centered)

    def test_full_removal_leaves_replicated_gene_profile(self, rng):
        m = random_matrix(rng, 5, 9)
        dec = decompose(m)
        full = dec.corrected(dec.rank)
        profile = m.values.mean(axis=0) - m.values.mean()
        np.testing.assert_allclose(full, np.tile(profile, (5, 1)), atol=1e-8)

    def test_full_removal_kills_rle_deviations(self, rng):
        m = random_matrix(rng, 6, 12, scale=3.0)
        dec = decompose(m)
        stripped = make_matrix(dec.corrected(dec.rank))
        assert np.abs(rle_deviations(stripped).deviations).max() <= 1e-8

    def test_reconstruction_identity(self, rng):
        m = random_matrix(rng, 5, 8)
        dec = decompose(m)
        total = sum(dec.component(k) for k in range(dec.rank))
        np.testing.assert_allclose(dec.corrected(dec.rank) + total, dec.centered,
                                   atol=1e-12)
        assert frob_rel(dec.residual - total, dec.residual) < 1e-8

    def test_out_of_range_p_errors(self, rng):
        m = random_matrix(rng, 4, 6)
        dec = decompose(m)
        with pytest.raises(ValueError, match="p must lie"):
            remove_nonadditive(dec.centered, dec, dec.rank + 1)
        with pytest.raises(ValueError, match="p must lie"):
            dec.corrected(-1)
        with pytest.raises(ValueError, match="component index"):
            dec.component(dec.rank)

    def test_matches_corrected(self, rng):
        m = random_matrix(rng, 5, 9)
        dec = decompose(m)
        for p in range(dec.rank + 1):
            np.testing.assert_array_equal(remove_nonadditive(dec.centered, dec, p),
                                          dec.corrected(p))


class TestInteractionRecovery:
    def test_single_component_equals_interaction_without_noise(self):
        cfg = dataclasses.replace(scenario(4, seed=9), noise_var_override=0.0)
        ds = simulate(cfg)
        dec = decompose(ds.matrix)
        assert dec.rank == 1
        m1 = dec.component(0)
        assert frob_rel(m1 - ds.interaction, ds.interaction) < 1e-6


class TestRleSeries:
    def test_purely_additive_dyadic_matrix_has_rank_zero(self):
        # dyadic values make the double centering exact, so the residual is
        # exactly zero and the series stops at p = 0 with ideal summaries
        m = additive_matrix([0.0, 0.25, 0.5, 1.0], [0.5, 1.5, 2.0, 4.0])
        series = rle_series(m, 0)
        assert len(series) == 1
        p, summaries = series[0]
        assert p == 0
        for s in summaries:
            assert s.median == s.q1 == s.q3 == 0.0

    def test_p_max_beyond_rank_errors(self):
        m = additive_matrix([0.0, 0.25, 0.5, 1.0], [0.5, 1.5, 2.0, 4.0])
        with pytest.raises(ValueError, match="rank"):
            rle_series(m, 1)

    def test_series_structure(self, rng):
        m = random_matrix(rng, 6, 10)
        series = rle_series(m, 3)
        assert [p for p, _ in series] == [0, 1, 2, 3]
        assert all(len(summ) == 6 for _, summ in series)

    def test_groups_flow_through(self, rng):
        m = ExpressionMatrix(rng.standard_normal((4, 6)),
                             ("a", "b", "c", "d"),
                             tuple(f"g{j}" for j in range(6)),
                             ("x", "x", "y", "y"))
        series = rle_series(m, 1)
        assert [s.group for s in series[0][1]] == ["x", "x", "y", "y"]

    def test_negative_p_max_errors(self, rng):
        with pytest.raises(ValueError, match="p_max"):
            rle_series(random_matrix(rng, 4, 6), -1)

    def test_series_settles_near_zero_on_simulated_data(self):
        matrix = simulate(scenario(4, seed=7)).matrix
        series = rle_series(matrix, 6)
        worst = [max(abs(s.median) for s in summ) for _, summ in series]
        assert worst[-1] < 0.1
        assert max(b - a for a, b in zip(worst, worst[1:])) <= 0.005
