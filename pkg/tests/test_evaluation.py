"""Discovery-evaluation protocol: datasets, curves, peaks, monotonicity, PCA."""

import csv
import json

import numpy as np
import pytest

from gradrec import (
    IntensityDatasets,
    KnnIndex,
    TrajectorySource,
    TraversalConfig,
    build_direction,
    discovery_trajectory_gradrec,
    discovery_trajectory_visual,
    generate_intensity_datasets,
    generate_synthetic,
    monotonicity_score,
    peak_order,
    project_2d,
    prompt_name,
    run_discovery_benchmark,
    SyntheticSpec,
    windowed_intersection,
    write_benchmark_artifacts,
)
from gradrec.errors import InsufficientCatalog, InvalidParameter
from gradrec.vectors import unit, unit_rows

NEG, NEU, POS = (prompt_name(0, lv) for lv in (-1.0, 0.0, 1.0))


def tiny_datasets(negative=(), neutral=(), positive=()):
    return IntensityDatasets(
        negative=tuple(negative),
        neutral=tuple(neutral),
        positive=tuple(positive),
        prompts=("n", "m", "p"),
    )


class TestIntensityDatasets:
    def test_sizes_and_purity(self, standard_synth, standard_index):
        _, bank, oracle = standard_synth
        ds = generate_intensity_datasets(standard_index, bank, NEG, NEU, POS, n=100)
        for label, level in (("negative", -1.0), ("neutral", 0.0), ("positive", 1.0)):
            ids = ds[label]
            assert len(ids) == 100
            assert len(set(ids)) == 100
            purity = np.mean([oracle.alpha(pid) == level for pid in ids])
            assert purity >= 0.9

    def test_identical_prompts(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        ds = generate_intensity_datasets(standard_index, bank, NEU, NEU, NEU, n=50)
        assert ds.negative == ds.neutral == ds.positive
        assert all(v == 1.0 for v in ds.pairwise_overlap().values())

    def test_insufficient_catalog(self, toy_index, toy_bank):
        with pytest.raises(InsufficientCatalog):
            generate_intensity_datasets(
                toy_index, toy_bank, "first axis", "second axis", "diagonal", n=100
            )


class TestTrajectories:
    def test_gradrec_single_step(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        d = build_direction(standard_index, bank, NEU, POS)
        seed = standard_index.catalog.ids[0]
        traj = discovery_trajectory_gradrec(
            seed, d, standard_index, TraversalConfig(max_steps=1, k_rec=10)
        )
        assert len(traj) <= 10

    def test_gradrec_deterministic(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        d = build_direction(standard_index, bank, NEG, POS)
        seed = standard_index.retrieve_by_prompt(bank, NEG, 1)[0].id
        cfg = TraversalConfig()
        t1 = discovery_trajectory_gradrec(seed, d, standard_index, cfg)
        t2 = discovery_trajectory_gradrec(seed, d, standard_index, cfg)
        assert t1 == t2

    def test_gradrec_covers_positive_dataset(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        ds = generate_intensity_datasets(standard_index, bank, NEG, NEU, POS, n=100)
        d = build_direction(standard_index, bank, NEG, POS)
        seed = standard_index.retrieve_by_prompt(bank, NEG, 1)[0].id
        traj = discovery_trajectory_gradrec(seed, d, standard_index, TraversalConfig(max_steps=40))
        coverage = len(set(ds.positive) & set(traj)) / len(ds.positive)
        assert coverage >= 0.8

    def test_two_leg_extension(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        up = build_direction(standard_index, bank, NEG, NEU)
        seed = standard_index.retrieve_by_prompt(bank, NEG, 1)[0].id
        cfg = TraversalConfig(max_steps=10)
        one = discovery_trajectory_gradrec(seed, up, standard_index, cfg)
        two = discovery_trajectory_gradrec(
            seed, up, standard_index, cfg,
            second_direction=build_direction(standard_index, bank, NEU, POS),
        )
        assert two[: len(one)] == one
        assert len(two) > len(one)
        assert len(set(two)) == len(two)

    def test_visual_single(self, standard_synth, standard_index):
        seed = standard_index.catalog.ids[0]
        traj = discovery_trajectory_visual(seed, standard_index, 1)
        nearest = standard_index.knn(
            standard_index.catalog.vector_of(seed), 1, exclude={seed}
        )
        assert traj == [nearest[0].id]

    def test_visual_is_knn_order(self, standard_synth, standard_index):
        seed = standard_index.catalog.ids[5]
        traj = discovery_trajectory_visual(seed, standard_index, 30)
        want = [
            nb.id
            for nb in standard_index.knn(
                standard_index.catalog.vector_of(seed), 30, exclude={seed}
            )
        ]
        assert traj == want

    def test_visual_concentrates_on_seed_level(self, standard_synth, standard_index):
        _, bank, oracle = standard_synth
        seed = standard_index.retrieve_by_prompt(bank, NEG, 1)[0].id
        level = oracle.alpha(seed)
        traj = discovery_trajectory_visual(seed, standard_index, 100)
        share = np.mean([oracle.alpha(pid) == level for pid in traj])
        assert share >= 0.7


class TestWindowedIntersection:
    def test_hand_enumeration(self):
        traj = ["a", "b", "c", "d", "e", "f"]
        ds = tiny_datasets(negative=("a", "b", "f"), neutral=("c",), positive=("z",))
        curves = windowed_intersection(traj, ds, window=3)
        assert curves.counts["negative"] == [2, 1, 0, 1]
        assert curves.counts["neutral"] == [1, 1, 1, 0]
        assert curves.counts["positive"] == [0, 0, 0, 0]
        assert not curves.window_exceeds_trajectory

    def test_constant_inside_one_dataset(self):
        traj = [f"x{i}" for i in range(60)]
        ds = tiny_datasets(negative=traj, neutral=("q",), positive=("r",))
        curves = windowed_intersection(traj, ds, window=50)
        assert curves.counts["negative"] == [50] * 11
        assert curves.counts["neutral"] == [0] * 11
        assert curves.counts["positive"] == [0] * 11

    def test_window_larger_than_trajectory(self):
        curves = windowed_intersection(["a", "b"], tiny_datasets(negative=("a",)), window=5)
        assert curves.window_exceeds_trajectory
        assert all(len(v) == 0 for v in curves.counts.values())

    def test_bounds_and_length(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        ds = generate_intensity_datasets(standard_index, bank, NEG, NEU, POS, n=100)
        d = build_direction(standard_index, bank, NEG, POS)
        seed = standard_index.retrieve_by_prompt(bank, NEG, 1)[0].id
        traj = discovery_trajectory_gradrec(seed, d, standard_index, TraversalConfig())
        curves = windowed_intersection(traj, ds, window=50)
        for series in curves.counts.values():
            assert len(series) == len(traj) - 50 + 1
            assert all(0 <= c <= 50 for c in series)

    def test_relabeling_invariance(self):
        traj = [f"p{i}" for i in range(30)]
        ds = tiny_datasets(negative=traj[:10], neutral=traj[10:20], positive=traj[20:])
        ref = windowed_intersection(traj, ds, window=7)
        rename = {pid: f"Q-{pid}" for pid in traj}
        ds2 = tiny_datasets(
            negative=[rename[p] for p in ds.negative],
            neutral=[rename[p] for p in ds.neutral],
            positive=[rename[p] for p in ds.positive],
        )
        got = windowed_intersection([rename[p] for p in traj], ds2, window=7)
        assert got.counts == ref.counts

    def test_window_validation(self):
        with pytest.raises(InvalidParameter):
            windowed_intersection(["a"], tiny_datasets(), window=0)


class TestPeakOrder:
    def test_single_dataset_trajectory_fails(self):
        traj = [f"x{i}" for i in range(60)]
        ds = tiny_datasets(negative=traj, neutral=("q",), positive=("r",))
        result = peak_order(windowed_intersection(traj, ds, window=50))
        assert not result.passed
        assert "neutral" in result.reason and "positive" in result.reason

    def test_empty_curves_fail(self):
        curves = windowed_intersection(["a"], tiny_datasets(negative=("a",)), window=5)
        result = peak_order(curves)
        assert not result.passed
        assert "empty" in result.reason

    def test_benchmark_pass_and_baseline_fail(self, standard_synth, standard_index):
        _, bank, oracle = standard_synth
        seed = standard_index.retrieve_by_prompt(bank, NEG, 1)[0].id
        result = run_discovery_benchmark(
            standard_index, bank, NEG, NEU, POS, seed, TraversalConfig(),
            alphas=oracle.alpha_map(),
        )
        assert result.gradrec_peaks.passed
        assert result.gradrec_peaks.order == ("negative", "neutral", "positive")
        assert not result.visual_peaks.passed
        assert "positive" in result.visual_peaks.reason

    def test_wrong_order_detected(self):
        # trajectory visits positive before neutral
        neg = [f"n{i}" for i in range(50)]
        pos = [f"p{i}" for i in range(50)]
        neu = [f"m{i}" for i in range(50)]
        traj = neg + pos + neu
        ds = tiny_datasets(negative=neg, neutral=neu, positive=pos)
        result = peak_order(windowed_intersection(traj, ds, window=50))
        assert not result.passed
        assert "order" in result.reason


class TestMonotonicity:
    def test_sorted_is_plus_one(self):
        ids = [f"p{i}" for i in range(50)]
        alphas = {pid: float(i) for i, pid in enumerate(ids)}
        assert monotonicity_score(ids, alphas) == pytest.approx(1.0)

    def test_reversed_is_minus_one(self):
        ids = [f"p{i}" for i in range(50)]
        alphas = {pid: float(i) for i, pid in enumerate(ids)}
        assert monotonicity_score(list(reversed(ids)), alphas) == pytest.approx(-1.0)

    def test_permutation_null(self):
        # |score| of a random permutation of 100 distinct values stays small
        ids = [f"p{i}" for i in range(100)]
        alphas = {pid: float(i) for i, pid in enumerate(ids)}
        rng = np.random.default_rng(0)
        inside = 0
        trials = 200
        for _ in range(trials):
            perm = [ids[i] for i in rng.permutation(100)]
            if abs(monotonicity_score(perm, alphas)) < 0.25:
                inside += 1
        assert inside / trials >= 0.95

    def test_degenerate_inputs(self):
        assert monotonicity_score(["a"], {"a": 1.0}) == 0.0
        assert monotonicity_score(["a", "b"], {"a": 1.0, "b": 1.0}) == 0.0

    def test_missing_id_raises(self):
        with pytest.raises(InvalidParameter):
            monotonicity_score(["a", "zzz"], {"a": 1.0})


class TestProject2d:
    def test_planar_data_preserves_distances(self):
        rng = np.random.default_rng(1)
        basis = np.linalg.qr(rng.standard_normal((16, 2)))[0].T  # 2 x 16
        coords = rng.standard_normal((40, 2)) * 3
        X = coords @ basis + rng.standard_normal(16)  # embedded plane + offset
        points, _ = project_2d(X)
        orig = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
        proj = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
        assert np.allclose(orig, proj, atol=1e-6)

    def test_repeated_point_degenerates_to_origin(self):
        X = np.tile(unit(np.r_[1.0, 2, 3, 4]), (7, 1))
        points, path = project_2d(X, path_positions=X[:2])
        assert np.allclose(points, 0.0)
        assert np.allclose(path, 0.0)

    def test_cluster_separation(self):
        spec = SyntheticSpec(dim=32, n_products=90, noise_sigma=0.0, seed=8)
        catalog, _, oracle = generate_synthetic(spec)
        points, _ = project_2d(catalog.vectors)
        levels = np.array([oracle.alpha(pid) for pid in catalog.ids])
        centroids = {lv: points[levels == lv].mean(axis=0) for lv in np.unique(levels)}
        spreads = [
            np.linalg.norm(points[levels == lv] - centroids[lv], axis=1).max()
            for lv in np.unique(levels)
        ]
        keys = sorted(centroids)
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                assert np.linalg.norm(centroids[a] - centroids[b]) > max(spreads)

    def test_sign_convention(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((30, 6))
        points1, _ = project_2d(X)
        points2, _ = project_2d(X)
        assert np.array_equal(points1, points2)
        # largest-magnitude loading positive means projecting the data twice
        # after negating it flips coordinates deterministically
        flipped, _ = project_2d(-X)
        assert np.allclose(np.abs(points1), np.abs(flipped), atol=1e-8)

    def test_path_positions_share_basis(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((20, 5))
        points, path = project_2d(X, path_positions=X[:4])
        assert np.allclose(points[:4], path, atol=1e-12)

    def test_validation(self):
        with pytest.raises(InvalidParameter):
            project_2d(np.zeros((0, 4)))
        with pytest.raises(InvalidParameter):
            project_2d(np.zeros((3, 1)))


@pytest.fixture(scope="module")
def bench(standard_synth, standard_index):
    _, bank, oracle = standard_synth
    seed = standard_index.retrieve_by_prompt(bank, NEG, 1)[0].id
    return run_discovery_benchmark(
        standard_index, bank, NEG, NEU, POS, seed, TraversalConfig(),
        alphas=oracle.alpha_map(),
    )


class TestArtifacts:
    def test_curves_csv_format(self, bench, standard_index, tmp_path):
        write_benchmark_artifacts(bench, standard_index, str(tmp_path))
        lines = (tmp_path / "curves.csv").read_text().splitlines()
        assert lines[0] == "source,dataset,window_start,count"
        reader = csv.DictReader(lines)
        rows = list(reader)
        assert {r["source"] for r in rows} == {"gradrec", "visual"}
        assert {r["dataset"] for r in rows} == {"negative", "neutral", "positive"}

    def test_trajectory_csv(self, bench, standard_index, tmp_path):
        write_benchmark_artifacts(bench, standard_index, str(tmp_path))
        lines = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "position,product_id,step,rank"
        assert len(lines) - 1 == len(bench.gradrec_trajectory)

    def test_projection_csv(self, bench, standard_index, tmp_path):
        write_benchmark_artifacts(bench, standard_index, str(tmp_path))
        lines = (tmp_path / "projection.csv").read_text().splitlines()
        assert lines[0] == "id_or_path_index,x,y,kind"
        kinds = {line.rsplit(",", 1)[1] for line in lines[1:]}
        assert kinds == {"negative", "neutral", "positive", "path"}
        n_path = sum(1 for line in lines[1:] if line.endswith(",path"))
        assert n_path == len(bench.gradrec_path.steps) + 1  # seed + per-step positions

    def test_summary_json(self, bench, standard_index, tmp_path):
        write_benchmark_artifacts(bench, standard_index, str(tmp_path))
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["gradrec"]["peak_order"]["passed"] is True
        assert summary["visual"]["peak_order"]["passed"] is False
        assert summary["window"] == 50
        assert summary["gradrec"]["monotonicity"] is not None

    def test_byte_identical_reruns(self, bench, standard_index, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        write_benchmark_artifacts(bench, standard_index, str(d1))
        write_benchmark_artifacts(bench, standard_index, str(d2))
        for name in ("curves.csv", "trajectory.csv", "projection.csv", "summary.json"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
