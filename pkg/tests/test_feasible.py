import json
import math

import numpy as np
import pytest

from wgnoise import (
    BlockLayout,
    DimensionError,
    ValidationError,
    cosine_similarity_study,
    feasibility_residuals,
    magnitude_bounds,
    project_latent_batch,
    project_to_feasible,
    to_compact,
)

LAYOUT = BlockLayout.for_dimension(1024, 16)


def gaussian(n, seed):
    return np.random.default_rng(seed).standard_normal(n)


class TestProjectToFeasible:
    def test_report_shape_and_residuals(self):
        x = gaussian(1024, 0)
        report = project_to_feasible(x, LAYOUT, seed=1)
        assert report.output.shape == x.shape
        assert report.threshold_indices.shape == (LAYOUT.block_count,)
        tol = 1e-9 * LAYOUT.block_size
        assert report.max_block_l1_residual < tol
        assert report.max_block_l2_residual < tol
        assert report.blocks_perturbed == 0

    def test_cosine_definition(self):
        x = gaussian(1024, 1)
        report = project_to_feasible(x, LAYOUT, seed=1)
        expected = float(
            x @ report.output / (np.linalg.norm(x) * np.linalg.norm(report.output))
        )
        assert report.cosine_similarity == pytest.approx(expected, abs=1e-15)

    def test_output_norm_is_n(self):
        report = project_to_feasible(gaussian(1024, 2), LAYOUT, seed=0)
        norm_sq = np.linalg.norm(report.output) ** 2
        assert abs(norm_sq - LAYOUT.n) < 1e-9 * LAYOUT.n

    def test_idempotent(self):
        first = project_to_feasible(gaussian(1024, 3), LAYOUT, seed=0)
        second = project_to_feasible(first.output, LAYOUT, seed=0)
        assert second.distance < 1e-9 * np.linalg.norm(first.output)
        assert np.abs(second.output - first.output).max() < 1e-9

    def test_distance_consistency_with_spectral_move(self):
        # spatial squared distance equals twice the compact-spectral one
        x = gaussian(1024, 4)
        report = project_to_feasible(x, LAYOUT, seed=0)
        spectral_move = np.abs(to_compact(x) - to_compact(report.output)) ** 2
        assert report.distance**2 == pytest.approx(2.0 * spectral_move.sum(), rel=1e-9)

    def test_compact_magnitudes_capped(self):
        report = project_to_feasible(gaussian(1024, 5), LAYOUT, seed=0)
        cap = magnitude_bounds(LAYOUT).max + 1e-9
        assert np.abs(to_compact(report.output)).max() <= cap

    def test_zero_vector_flagged_not_nan(self):
        report = project_to_feasible(np.zeros(1024), LAYOUT, seed=7)
        assert report.cosine_similarity is None
        assert report.blocks_perturbed == LAYOUT.block_count
        tol = 1e-9 * LAYOUT.block_size
        assert max(report.max_block_l1_residual, report.max_block_l2_residual) < tol
        # the JSON view carries an explicit null, not a NaN
        payload = json.loads(json.dumps(report.summary_dict()))
        assert payload["cosine_similarity"] is None

    def test_gaussian_draw_cosine_is_high(self):
        layout = BlockLayout.for_dimension(65536, 16)
        report = project_to_feasible(gaussian(65536, 8), layout, seed=0)
        assert report.cosine_similarity >= 0.985

    def test_layout_mismatch(self):
        with pytest.raises(DimensionError):
            project_to_feasible(np.zeros(100), LAYOUT, seed=0)


class TestFeasibilityResiduals:
    def test_zero_vector_residuals_equal_targets(self):
        l1, l2 = feasibility_residuals(np.zeros(1024), LAYOUT)
        np.testing.assert_allclose(l1, LAYOUT.l1_target)
        np.testing.assert_allclose(l2, LAYOUT.l2sq_target)
        assert LAYOUT.l1_target == pytest.approx(14.1796, abs=1e-4)

    def test_projected_vector_residuals_vanish(self):
        report = project_to_feasible(gaussian(1024, 9), LAYOUT, seed=0)
        l1, l2 = feasibility_residuals(report.output, LAYOUT)
        assert max(l1.max(), l2.max()) < 1e-9 * LAYOUT.block_size

    def test_gaussian_residuals_match_clt_scale(self):
        # blockwise l1 of a Gaussian draw is ~ Normal(target, B*(1 - pi/4)),
        # so the mean residual is sigma * sqrt(2/pi); l2^2 is Gamma(B) with
        # sigma = sqrt(B)
        b = 16
        layout = BlockLayout.for_dimension(2 * b * 6400, b)
        l1, l2 = feasibility_residuals(gaussian(layout.n, 10), layout)
        sigma_l1 = math.sqrt(b * (1.0 - math.pi / 4.0))
        sigma_l2 = math.sqrt(b)
        assert l1.mean() == pytest.approx(sigma_l1 * math.sqrt(2 / math.pi), rel=0.05)
        assert l2.mean() == pytest.approx(sigma_l2 * math.sqrt(2 / math.pi), rel=0.05)


class TestProjectLatentBatch:
    def test_matches_single_vector_path(self):
        latents = np.stack([gaussian(1024, 20 + i) for i in range(4)])
        batch, stats = project_latent_batch(latents, LAYOUT, row_seed=0)
        for i in range(4):
            single = project_to_feasible(latents[i], LAYOUT, seed=0)
            np.testing.assert_allclose(batch[i], single.output, atol=1e-12)
        assert stats.blocks_perturbed == 0
        assert stats.max_magnitude <= magnitude_bounds(LAYOUT).max + 1e-9

    def test_shape_validation(self):
        with pytest.raises(DimensionError):
            project_latent_batch(np.zeros((2, 100)), LAYOUT)


class TestCosineSimilarityStudy:
    def test_summary_ordering_and_rows(self):
        layout = BlockLayout.for_dimension(64, 16)
        result, cosines = cosine_similarity_study(10, 64, layout, seed=3)
        assert cosines.shape == (10,)
        assert result.sample_count == 10
        assert result.min_cos <= result.p01_cos <= result.mean_cos <= 1.0
        assert result.min_cos == pytest.approx(cosines.min())

    def test_deterministic_given_seed(self):
        layout = BlockLayout.for_dimension(64, 16)
        _, first = cosine_similarity_study(50, 64, layout, seed=11)
        _, second = cosine_similarity_study(50, 64, layout, seed=11)
        np.testing.assert_array_equal(first, second)

    def test_worker_sharding_matches_serial(self):
        layout = BlockLayout.for_dimension(64, 16)
        _, serial = cosine_similarity_study(600, 64, layout, seed=12, workers=1)
        _, sharded = cosine_similarity_study(600, 64, layout, seed=12, workers=2)
        np.testing.assert_array_equal(serial, sharded)

    def test_validation(self):
        layout = BlockLayout.for_dimension(64, 16)
        with pytest.raises(ValidationError):
            cosine_similarity_study(0, 64, layout, seed=0)
        with pytest.raises(DimensionError):
            cosine_similarity_study(1, 128, layout, seed=0)
