"""Product-discovery evaluation: intensity datasets, discovery trajectories,
sliding-window intersection curves, peak ordering, monotonicity scoring and
2-D projection export.

The protocol: retrieve three intensity datasets (negative / neutral /
positive) for an attribute, simulate discovery with a traversal started at a
product of one extreme, and count how many of each dataset's products fall
inside a window sliding along the discovery trajectory. A traversal that
follows the attribute produces three peaks in the correct order; a plain
visual-similarity walk around the seed does not.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .catalog import PromptBank
from .direction import DirectionVector, build_direction
from .errors import InsufficientCatalog, InvalidParameter, UnknownSeed
from .index import KnnIndex
from .traversal import TraversalConfig, TraversalPath, traverse, traverse_from_vector

DATASET_LABELS = ("negative", "neutral", "positive")
DEFAULT_WINDOW = 50
DEFAULT_MIN_PEAK = 10


class TrajectorySource(str, Enum):
    GRADREC = "gradrec"
    VISUAL = "visual"


@dataclass(frozen=True)
class IntensityDatasets:
    """Three retrieved product-id sets representing attribute extremes and
    the midpoint; evaluation ground truth."""

    negative: tuple[str, ...]
    neutral: tuple[str, ...]
    positive: tuple[str, ...]
    prompts: tuple[str, str, str]

    def __getitem__(self, label: str) -> tuple[str, ...]:
        if label not in DATASET_LABELS:
            raise KeyError(label)
        return getattr(self, label)

    def pairwise_overlap(self) -> dict[str, float]:
        """Fraction of shared ids per dataset pair (retrieval artifact report)."""
        out = {}
        for i, a in enumerate(DATASET_LABELS):
            for b in DATASET_LABELS[i + 1 :]:
                sa, sb = set(self[a]), set(self[b])
                smaller = min(len(sa), len(sb))
                out[f"{a}/{b}"] = len(sa & sb) / smaller if smaller else 0.0
        return out


@dataclass(frozen=True)
class DiscoveryCurves:
    """Windowed intersection counts per dataset along one trajectory."""

    counts: dict[str, list[int]]
    window_size: int
    source: TrajectorySource
    window_exceeds_trajectory: bool = False


@dataclass(frozen=True)
class PeakOrderResult:
    order: tuple[str, ...]  # dataset labels by ascending peak position
    peak_positions: dict[str, int]
    peak_values: dict[str, int]
    passed: bool
    reason: str | None = None

    def to_json(self) -> dict:
        return {
            "order": list(self.order),
            "peak_positions": self.peak_positions,
            "peak_values": self.peak_values,
            "passed": self.passed,
            "reason": self.reason,
        }


def generate_intensity_datasets(
    index: KnnIndex,
    bank: PromptBank,
    negative_prompt: str,
    neutral_prompt: str,
    positive_prompt: str,
    n: int = 100,
) -> IntensityDatasets:
    """Retrieve n products per intensity prompt."""
    if n < 1:
        raise InvalidParameter("dataset size n must be at least 1")
    if len(index.catalog) < n:
        raise InsufficientCatalog(f"catalog has {len(index.catalog)} products; need {n}")
    sets = [
        tuple(nb.id for nb in index.retrieve_by_prompt(bank, prompt, n))
        for prompt in (negative_prompt, neutral_prompt, positive_prompt)
    ]
    return IntensityDatasets(
        negative=sets[0],
        neutral=sets[1],
        positive=sets[2],
        prompts=(negative_prompt, neutral_prompt, positive_prompt),
    )


def discovery_trajectory_gradrec(
    seed_id: str,
    direction: DirectionVector,
    index: KnnIndex,
    cfg: TraversalConfig,
    second_direction: DirectionVector | None = None,
) -> list[str]:
    """Discovery order simulated by a traversal: per-step recommendations
    concatenated in step order then rank order (duplicate-free).

    ``second_direction`` runs an optional second traversal leg from the
    first leg's final position (carrying the seen set over), for two-stage
    walks across an attribute's range.
    """
    path = traverse(seed_id, direction, index, cfg)
    ids = path.discovered()
    if second_direction is not None and path.steps:
        leg2 = traverse_from_vector(
            path.steps[-1].position,
            second_direction,
            index,
            cfg,
            seed_label=seed_id,
            exclude={seed_id, *ids},
        )
        ids.extend(leg2.discovered())
    return ids


def discovery_trajectory_visual(seed_id: str, index: KnnIndex, length: int) -> list[str]:
    """Baseline discovery order: the seed's nearest neighbors by increasing
    cosine distance, seed excluded."""
    if length < 1:
        raise InvalidParameter("trajectory length must be at least 1")
    if seed_id not in index.catalog:
        raise UnknownSeed(f"seed product {seed_id!r} not in catalog")
    seed_vec = index.catalog.vector_of(seed_id)
    return [nb.id for nb in index.knn(seed_vec, length, exclude={seed_id})]


def windowed_intersection(
    trajectory: Sequence[str],
    datasets: IntensityDatasets,
    window: int = DEFAULT_WINDOW,
    source: TrajectorySource = TrajectorySource.GRADREC,
) -> DiscoveryCurves:
    """Count per dataset how many of the ids in each length-``window`` slice
    of the trajectory belong to it; the window slides by one product.

    A trajectory shorter than the window yields empty curves with the
    ``window_exceeds_trajectory`` flag set (not an error).
    """
    if window < 1:
        raise InvalidParameter("window must be at least 1")
    length = len(trajectory)
    if length < window:
        return DiscoveryCurves(
            counts={label: [] for label in DATASET_LABELS},
            window_size=window,
            source=source,
            window_exceeds_trajectory=True,
        )
    members = {label: set(datasets[label]) for label in DATASET_LABELS}
    counts: dict[str, list[int]] = {label: [] for label in DATASET_LABELS}
    current = {label: sum(1 for pid in trajectory[:window] if pid in members[label])
               for label in DATASET_LABELS}
    for label in DATASET_LABELS:
        counts[label].append(current[label])
    for start in range(1, length - window + 1):
        left, right = trajectory[start - 1], trajectory[start + window - 1]
        for label in DATASET_LABELS:
            current[label] += (right in members[label]) - (left in members[label])
            counts[label].append(current[label])
    return DiscoveryCurves(counts=counts, window_size=window, source=source)


def peak_order(
    curves: DiscoveryCurves,
    expected_order: Sequence[str] = DATASET_LABELS,
    min_peak: int = DEFAULT_MIN_PEAK,
) -> PeakOrderResult:
    """Locate each dataset's peak window and check both presence and order.

    Passes iff every dataset's curve reaches at least ``min_peak`` somewhere
    and the peaks, ordered by window position, appear in ``expected_order``
    (seed's own level first, far level last). Peak position is the first
    window achieving the maximum; positional ties fall back to canonical
    label order.
    """
    if any(len(curves.counts[label]) == 0 for label in DATASET_LABELS):
        return PeakOrderResult(
            order=(),
            peak_positions={},
            peak_values={},
            passed=False,
            reason="empty curves (trajectory shorter than window)",
        )
    positions: dict[str, int] = {}
    values: dict[str, int] = {}
    for label in DATASET_LABELS:
        series = curves.counts[label]
        best = max(series)
        positions[label] = series.index(best)
        values[label] = best
    missing = [label for label in DATASET_LABELS if values[label] < min_peak]
    order = tuple(
        sorted(DATASET_LABELS, key=lambda l: (positions[l], DATASET_LABELS.index(l)))
    )
    if missing:
        return PeakOrderResult(
            order=order,
            peak_positions=positions,
            peak_values=values,
            passed=False,
            reason=f"peaks below {min_peak}: {', '.join(missing)}",
        )
    if order != tuple(expected_order):
        return PeakOrderResult(
            order=order,
            peak_positions=positions,
            peak_values=values,
            passed=False,
            reason=f"peak order {'>'.join(order)} != expected {'>'.join(expected_order)}",
        )
    return PeakOrderResult(order=order, peak_positions=positions, peak_values=values, passed=True)


def monotonicity_score(trajectory: Sequence[str], alphas: Mapping[str, float]) -> float:
    """Spearman rank correlation between discovery position and planted
    intensity; +1 when discovery order tracks the attribute exactly, -1 when
    it reverses it. Returns 0.0 for degenerate (constant or too-short) input."""
    missing = [pid for pid in trajectory if pid not in alphas]
    if missing:
        raise InvalidParameter(f"no planted intensity for ids: {missing[:3]}")
    if len(trajectory) < 2:
        return 0.0
    values = [alphas[pid] for pid in trajectory]
    if len(set(values)) < 2:
        return 0.0
    rho = stats.spearmanr(np.arange(len(values)), values).statistic
    return float(rho) if np.isfinite(rho) else 0.0


def project_2d(
    vectors: Sequence[np.ndarray] | np.ndarray,
    path_positions: Sequence[np.ndarray] | np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Top-2 principal-component coordinates of ``vectors`` (centered), with
    ``path_positions`` mapped through the same basis.

    Sign convention: each component's largest-magnitude loading is positive,
    so output is deterministic. Degenerate input (all points identical)
    projects everything to the origin.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise InvalidParameter("need a non-empty 2-D stack of vectors")
    if X.shape[1] < 2:
        raise InvalidParameter("need dim >= 2 to project to the plane")
    mean = X.mean(axis=0)
    Xc = X - mean
    path = None
    if path_positions is not None:
        path = np.asarray(path_positions, dtype=np.float64)
        if path.ndim != 2 or path.shape[1] != X.shape[1]:
            raise InvalidParameter("path positions must match the vectors' dim")
    if float(np.abs(Xc).max(initial=0.0)) < 1e-12:
        points = np.zeros((X.shape[0], 2))
        path_pts = np.zeros((path.shape[0], 2)) if path is not None else None
        return points, path_pts
    _, _, vt = np.linalg.svd(Xc, full_matrices=False)
    comps = np.zeros((2, X.shape[1]))
    comps[: min(2, vt.shape[0])] = vt[:2]
    for i in range(2):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    points = Xc @ comps.T
    path_pts = (path - mean) @ comps.T if path is not None else None
    return points, path_pts


# ---------------------------------------------------------------------------
# Benchmark orchestration and artifact export
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkResult:
    datasets: IntensityDatasets
    direction: DirectionVector
    seed_id: str
    gradrec_path: TraversalPath
    gradrec_trajectory: list[str]
    visual_trajectory: list[str]
    gradrec_curves: DiscoveryCurves
    visual_curves: DiscoveryCurves
    gradrec_peaks: PeakOrderResult
    visual_peaks: PeakOrderResult
    gradrec_monotonicity: float | None
    visual_monotonicity: float | None

    def summary(self) -> dict:
        drift = [s.drift for s in self.gradrec_path.steps]
        return {
            "seed_id": self.seed_id,
            "prompts": list(self.datasets.prompts),
            "dataset_overlap": self.datasets.pairwise_overlap(),
            "window": self.gradrec_curves.window_size,
            "gradrec": {
                "trajectory_length": len(self.gradrec_trajectory),
                "stop_reason": self.gradrec_path.stop_reason.value,
                "peak_order": self.gradrec_peaks.to_json(),
                "monotonicity": self.gradrec_monotonicity,
                "drift_first": drift[0] if drift else None,
                "drift_last": drift[-1] if drift else None,
            },
            "visual": {
                "trajectory_length": len(self.visual_trajectory),
                "peak_order": self.visual_peaks.to_json(),
                "monotonicity": self.visual_monotonicity,
            },
        }


def run_discovery_benchmark(
    index: KnnIndex,
    bank: PromptBank,
    negative_prompt: str,
    neutral_prompt: str,
    positive_prompt: str,
    seed_id: str,
    cfg: TraversalConfig,
    window: int = DEFAULT_WINDOW,
    class_m: int = 100,
    class_n: int = 100,
    intensity_n: int = 100,
    epsilon: float = 1e-6,
    min_peak: int = DEFAULT_MIN_PEAK,
    alphas: Mapping[str, float] | None = None,
) -> BenchmarkResult:
    """Full protocol for one attribute: datasets, direction (negative prompt
    as the neutral class, neutral prompt as the exemplar, so the walk moves
    up the intensity axis), both trajectories, curves and peak checks. The
    visual baseline gets the same trajectory length as the traversal for
    like-for-like curves."""
    if seed_id not in index.catalog:
        raise UnknownSeed(f"seed product {seed_id!r} not in catalog")
    datasets = generate_intensity_datasets(
        index, bank, negative_prompt, neutral_prompt, positive_prompt, n=intensity_n
    )
    direction = build_direction(
        index,
        bank,
        neutral_prompt=negative_prompt,
        exemplar_prompt=neutral_prompt,
        m=class_m,
        n=class_n,
        epsilon=epsilon,
    )
    path = traverse(seed_id, direction, index, cfg)
    gr_traj = path.discovered()
    vis_traj = discovery_trajectory_visual(seed_id, index, length=max(1, len(gr_traj)))
    gr_curves = windowed_intersection(gr_traj, datasets, window, TrajectorySource.GRADREC)
    vis_curves = windowed_intersection(vis_traj, datasets, window, TrajectorySource.VISUAL)
    gr_peaks = peak_order(gr_curves, min_peak=min_peak)
    vis_peaks = peak_order(vis_curves, min_peak=min_peak)
    gr_mono = monotonicity_score(gr_traj, alphas) if alphas is not None else None
    vis_mono = monotonicity_score(vis_traj, alphas) if alphas is not None else None
    return BenchmarkResult(
        datasets=datasets,
        direction=direction,
        seed_id=seed_id,
        gradrec_path=path,
        gradrec_trajectory=gr_traj,
        visual_trajectory=vis_traj,
        gradrec_curves=gr_curves,
        visual_curves=vis_curves,
        gradrec_peaks=gr_peaks,
        visual_peaks=vis_peaks,
        gradrec_monotonicity=gr_mono,
        visual_monotonicity=vis_mono,
    )


def _csv_bytes(header: list[str], rows: list[list]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def write_benchmark_artifacts(result: BenchmarkResult, index: KnnIndex, out_dir: str) -> list[str]:
    """Write curves.csv, trajectory.csv, projection.csv and summary.json.

    Output is deterministic byte for byte given identical inputs.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    rows = []
    for source, curves in (
        (TrajectorySource.GRADREC, result.gradrec_curves),
        (TrajectorySource.VISUAL, result.visual_curves),
    ):
        for label in DATASET_LABELS:
            for start, count in enumerate(curves.counts[label]):
                rows.append([source.value, label, start, count])
    path = os.path.join(out_dir, "curves.csv")
    with open(path, "wb") as fh:
        fh.write(_csv_bytes(["source", "dataset", "window_start", "count"], rows))
    written.append(path)

    rows = []
    position = 0
    for step_idx, step in enumerate(result.gradrec_path.steps):
        for rank, nb in enumerate(step.recommendations):
            rows.append([position, nb.id, step_idx, rank])
            position += 1
    path = os.path.join(out_dir, "trajectory.csv")
    with open(path, "wb") as fh:
        fh.write(_csv_bytes(["position", "product_id", "step", "rank"], rows))
    written.append(path)

    # Cluster points: union of the three datasets (first label wins on
    # overlap), plus the traversed positions, all in one plane.
    kind_of: dict[str, str] = {}
    ordered_ids: list[str] = []
    for label in DATASET_LABELS:
        for pid in result.datasets[label]:
            if pid not in kind_of:
                kind_of[pid] = label
                ordered_ids.append(pid)
    cluster_vecs = np.stack([index.catalog.vector_of(pid) for pid in ordered_ids])
    positions = [index.catalog.vector_of(result.seed_id)]
    positions.extend(s.position for s in result.gradrec_path.steps)
    points, path_pts = project_2d(cluster_vecs, np.stack(positions))
    rows = []
    for pid, (x, y) in zip(ordered_ids, points):
        rows.append([pid, repr(float(x)), repr(float(y)), kind_of[pid]])
    for i, (x, y) in enumerate(path_pts):
        rows.append([i, repr(float(x)), repr(float(y)), "path"])
    path = os.path.join(out_dir, "projection.csv")
    with open(path, "wb") as fh:
        fh.write(_csv_bytes(["id_or_path_index", "x", "y", "kind"], rows))
    written.append(path)

    path = os.path.join(out_dir, "summary.json")
    with open(path, "wb") as fh:
        fh.write(json.dumps(result.summary(), indent=2, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
    written.append(path)
    return written
