import numpy as np
import pytest

from skewbench.clustering import estimate_bandwidth, mean_shift
from skewbench.core import RngSeed, SkewbenchError
from skewbench.datagen import GenSpec, generate_blobs, generate_imbalanced


def rng(seed=0):
    return RngSeed(seed).generator()


class TestEstimateBandwidth:
    def test_two_points(self):
        assert estimate_bandwidth(np.array([[0.0], [2.0]]), 1.0) == pytest.approx(2.0)

    def test_three_collinear(self):
        pts = np.array([[0.0], [1.0], [2.0]])
        assert estimate_bandwidth(pts, 1.0) == pytest.approx(5.0 / 3.0)

    def test_matches_exhaustive_sort_oracle(self):
        pts, _ = generate_blobs(np.array([[0.0, 0.0], [9.0, 9.0]]), [120, 80], 1.0, rng(2))
        n = len(pts)
        quantile = 0.3
        j = int(np.ceil(quantile * (n - 1)))
        expected = 0.0
        for i in range(n):
            dists = sorted(np.sqrt(np.sum((pts - pts[i]) ** 2, axis=1)))
            expected += dists[j]  # dists[0] is the self-distance
        expected /= n
        assert estimate_bandwidth(pts, quantile) == pytest.approx(expected, rel=1e-12)

    def test_identical_points_rejected(self):
        with pytest.raises(SkewbenchError, match="zero bandwidth"):
            estimate_bandwidth(np.ones((5, 2)), 0.5)

    def test_bad_quantile(self):
        with pytest.raises(SkewbenchError, match="quantile"):
            estimate_bandwidth(np.array([[0.0], [1.0]]), 0.0)


class TestMeanShift:
    def test_single_tight_blob(self):
        pts, _ = generate_blobs(np.array([[5.0, 5.0]]), [80], 0.05, rng(1))
        model = mean_shift(pts, bandwidth=1.0)
        assert model.n_clusters == 1
        assert np.allclose(model.centers[0], pts.mean(axis=0), atol=1e-3)
        assert np.all(model.assignment == 0)

    def test_two_distant_blobs(self):
        centers = np.array([[0.0, 0.0], [30.0, 0.0]])
        pts, truth = generate_blobs(centers, [60, 60], 0.3, rng(2))
        model = mean_shift(pts, bandwidth=3.0)
        assert model.n_clusters == 2
        # Assignment must match how the blobs were generated (up to relabeling).
        first = model.assignment[truth == 0]
        second = model.assignment[truth == 1]
        assert len(set(first.tolist())) == 1
        assert len(set(second.tolist())) == 1
        assert first[0] != second[0]

    def test_recovers_generated_subclusters(self):
        hits = 0
        for seed in range(20):
            spec = GenSpec(n_samples=480, class_ratio=(5, 1), seed=seed,
                           minority_subclusters=4, majority_subclusters=1,
                           sub_sigma=1.0, center_box=(0.0, 40.0),
                           min_center_separation=8.0)
            ds, _ = generate_imbalanced(spec)
            bandwidth = estimate_bandwidth(ds.points, 0.3)
            hits += int(mean_shift(ds.points, bandwidth).n_clusters == 5)
        assert hits >= 19  # >= 95% over 20 seeded runs

    def test_isolated_point_is_own_mode(self):
        pts = np.array([[0.0, 0.0], [0.1, 0.0], [50.0, 50.0]])
        model = mean_shift(pts, bandwidth=1.0)
        assert model.n_clusters == 2
        assert model.assignment.tolist() == [0, 0, 1] or model.assignment.tolist() == [1, 1, 0]

    def test_idempotent_on_returned_centers(self):
        pts, _ = generate_blobs(np.array([[0.0, 0.0], [12.0, 3.0]]), [70, 50], 0.8, rng(4))
        bandwidth = 2.5
        first = mean_shift(pts, bandwidth)
        second = mean_shift(pts, bandwidth, seeds=first.centers)
        assert second.n_clusters == first.n_clusters
        tol = 1e-4 * bandwidth
        gaps = np.sqrt(((first.centers[:, None, :] - second.centers[None, :, :]) ** 2).sum(-1))
        assert np.all(gaps.min(axis=1) <= tol * 2)

    def test_translation_equivariance(self):
        pts, _ = generate_blobs(np.array([[0.0, 0.0], [9.0, 0.0]]), [50, 40], 0.7, rng(5))
        shift = np.array([13.5, -4.25])
        a = mean_shift(pts, 2.0)
        b = mean_shift(pts + shift, 2.0)
        assert np.allclose(a.centers + shift, b.centers, atol=1e-9)
        assert np.array_equal(a.assignment, b.assignment)

    def test_assignment_contiguous_and_complete(self):
        pts, _ = generate_blobs(np.array([[0.0, 0.0], [8.0, 8.0], [0.0, 8.0]]),
                                [40, 40, 40], 0.6, rng(6))
        model = mean_shift(pts, 2.0)
        assert len(model.assignment) == len(pts)
        used = np.unique(model.assignment)
        assert used.tolist() == list(range(model.n_clusters))

    def test_merged_centers_respect_half_bandwidth(self):
        pts, _ = generate_blobs(np.array([[0.0, 0.0], [2.0, 0.0], [20.0, 0.0]]),
                                [50, 50, 50], 0.8, rng(7))
        bandwidth = 4.0
        model = mean_shift(pts, bandwidth)
        c = model.centers
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                assert np.sqrt(np.sum((c[i] - c[j]) ** 2)) >= bandwidth / 2.0

    def test_parameter_validation(self):
        pts = np.zeros((3, 2))
        with pytest.raises(SkewbenchError):
            mean_shift(pts, bandwidth=0.0)
        with pytest.raises(SkewbenchError):
            mean_shift(pts, bandwidth=1.0, max_iter=0)
        with pytest.raises(SkewbenchError):
            mean_shift(pts, bandwidth=1.0, tol=-1.0)
