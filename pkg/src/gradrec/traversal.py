"""Iterated latent-space traversal with per-step discovery logging.

One update moves the current point by a scaled unit attribute direction and
pulls it toward the normalized mean of its nearest catalog neighbors, the
two contributions convexly weighted:

    v' = v + (1 - reg_weight) * step_scale * unit(direction)
           + reg_weight * knn_mean(v, k_reg)

and, by default, v' is re-normalized so cosine retrieval stays on unit
scale. Arithmetic convention (shared with every oracle): vectors are
float32, scalar coefficients are rounded to float32 before multiplying,
norms are taken in float64; the direction term is accumulated before the
regularizer term.

Iterating the update and logging the top unseen neighbors after each move
discovers products of monotonically shifting attribute intensity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .direction import DirectionProvenance, DirectionVector
from .errors import DegenerateStep, DimMismatch, InvalidParameter, UnknownSeed
from .index import KnnIndex, Neighbor, neighbors_payload
from .vectors import unit


@dataclass(frozen=True)
class TraversalConfig:
    """Traversal parameters; defaults come from the central defaults layer.

    JSON field names (``lambda``, ``rho``) are the external contract for the
    step scale and regularizer weight.
    """

    step_scale: float = 0.1
    reg_weight: float = 0.3
    k_reg: int = 10
    k_rec: int = 10
    max_steps: int = 40
    renormalize: bool = True
    stop_stale_steps: int = 5
    snap_to_product: bool = False

    def __post_init__(self):
        if not self.step_scale > 0:
            raise InvalidParameter("step scale (lambda) must be positive")
        if not (0.0 <= self.reg_weight < 1.0):
            raise InvalidParameter("regularizer weight (rho) must lie in [0, 1)")
        for name in ("k_reg", "k_rec", "max_steps", "stop_stale_steps"):
            if getattr(self, name) < 1:
                raise InvalidParameter(f"{name} must be at least 1")

    def with_overrides(self, **overrides) -> "TraversalConfig":
        """Copy with the non-None overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self

    def to_json(self) -> dict:
        return {
            "lambda": self.step_scale,
            "rho": self.reg_weight,
            "k_reg": self.k_reg,
            "k_rec": self.k_rec,
            "max_steps": self.max_steps,
            "renormalize": self.renormalize,
            "stop_stale_steps": self.stop_stale_steps,
            "snap_to_product": self.snap_to_product,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TraversalConfig":
        return cls(
            step_scale=float(obj["lambda"]),
            reg_weight=float(obj["rho"]),
            k_reg=int(obj["k_reg"]),
            k_rec=int(obj["k_rec"]),
            max_steps=int(obj["max_steps"]),
            renormalize=bool(obj["renormalize"]),
            stop_stale_steps=int(obj["stop_stale_steps"]),
            snap_to_product=bool(obj.get("snap_to_product", False)),
        )


class StopReason(str, Enum):
    MAX_STEPS = "max_steps"
    STALE = "stale"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class TraversalStep:
    position: np.ndarray
    recommendations: tuple[Neighbor, ...]
    drift: float  # mean cosine distance from position to the whole catalog


@dataclass(frozen=True)
class StepOutcome:
    """Result of one stateless update: new position, the unseen products
    found there, the drift reading, and whether the catalog is used up."""

    position: np.ndarray
    recommendations: tuple[Neighbor, ...]
    drift: float
    exhausted: bool


@dataclass(frozen=True)
class TraversalPath:
    seed_id: str
    provenance: DirectionProvenance
    config: TraversalConfig
    steps: tuple[TraversalStep, ...]
    stop_reason: StopReason

    def discovered(self) -> list[str]:
        """All recommended ids in step order then rank order; duplicate-free."""
        return [nb.id for s in self.steps for nb in s.recommendations]

    def to_json(self, include_positions: bool = False) -> dict:
        steps = []
        for s in self.steps:
            entry: dict = {
                "recommendations": neighbors_payload(list(s.recommendations)),
                "drift": s.drift,
            }
            if include_positions:
                entry["position"] = [float(x) for x in s.position]
            steps.append(entry)
        return {
            "seed_id": self.seed_id,
            "config": self.config.to_json(),
            "direction_provenance": self.provenance.to_json(),
            "stop_reason": self.stop_reason.value,
            "steps": steps,
        }


def step(position, direction_vector, index: KnnIndex | None, cfg: TraversalConfig) -> np.ndarray:
    """Apply the traversal update once; see the module docstring for the
    formula and arithmetic convention. ``index`` may be None only when
    reg_weight is 0 (the regularizer is then skipped entirely)."""
    v = np.asarray(position, dtype=np.float32)
    d = np.asarray(direction_vector, dtype=np.float32)
    if v.shape != d.shape or v.ndim != 1:
        raise DimMismatch(f"position {v.shape} vs direction {d.shape}")
    d_hat = unit(d)
    out = v + np.float32((1.0 - cfg.reg_weight) * cfg.step_scale) * d_hat
    if cfg.reg_weight > 0.0:
        if index is None:
            raise InvalidParameter("an index is required when reg_weight > 0")
        reg = index.knn_mean(v, cfg.k_reg)
        out = out + np.float32(cfg.reg_weight) * reg
    norm = float(np.linalg.norm(out.astype(np.float64)))
    if norm < 1e-8:
        raise DegenerateStep(f"update produced norm {norm:.2e}")
    if cfg.renormalize:
        out = (out.astype(np.float64) / norm).astype(np.float32)
    return out


def step_once(
    position,
    direction: DirectionVector,
    index: KnnIndex,
    cfg: TraversalConfig,
    exclude: set[str] | frozenset[str],
) -> StepOutcome:
    """One stateless traversal move with caller-supplied seen set.

    A server-side traversal is exactly a fold of this function over a
    growing exclude set, so clients replaying it step by step reproduce the
    same path bit for bit.
    """
    new_pos = step(position, direction.vector, index, cfg)
    if cfg.snap_to_product:
        nearest = index.knn(new_pos, 1)
        new_pos = index.catalog.vector_of(nearest[0].id)
    recs = tuple(index.knn(new_pos, cfg.k_rec, exclude=exclude))
    drift = index.mean_cosine_distance(new_pos)
    seen_in_catalog = sum(1 for pid in exclude if pid in index.catalog)
    exhausted = seen_in_catalog + len(recs) >= len(index.catalog)
    return StepOutcome(position=new_pos, recommendations=recs, drift=drift, exhausted=exhausted)


def _run(
    seed_label: str,
    v0: np.ndarray,
    initial_seen: set[str],
    direction: DirectionVector,
    index: KnnIndex,
    cfg: TraversalConfig,
) -> TraversalPath:
    seen = set(initial_seen)
    steps: list[TraversalStep] = []
    stale = 0
    reason = StopReason.MAX_STEPS
    pos = v0
    for _ in range(cfg.max_steps):
        outcome = step_once(pos, direction, index, cfg, seen)
        pos = outcome.position
        seen.update(nb.id for nb in outcome.recommendations)
        steps.append(
            TraversalStep(
                position=outcome.position,
                recommendations=outcome.recommendations,
                drift=outcome.drift,
            )
        )
        if outcome.exhausted:
            reason = StopReason.EXHAUSTED
            break
        if outcome.recommendations:
            stale = 0
        else:
            stale += 1
            if stale >= cfg.stop_stale_steps:
                reason = StopReason.STALE
                break
    return TraversalPath(
        seed_id=seed_label,
        provenance=direction.provenance,
        config=cfg,
        steps=tuple(steps),
        stop_reason=reason,
    )


def traverse(
    seed_id: str,
    direction: DirectionVector,
    index: KnnIndex,
    cfg: TraversalConfig,
) -> TraversalPath:
    """Traverse from a catalog product's image vector, logging the top
    ``k_rec`` unseen products after every step. The seed and everything
    recommended earlier are excluded from later recommendations. Stops at
    ``max_steps``, after ``stop_stale_steps`` consecutive empty steps, or
    when every product has been seen."""
    if seed_id not in index.catalog:
        raise UnknownSeed(f"seed product {seed_id!r} not in catalog")
    v0 = index.catalog.vector_of(seed_id)
    return _run(seed_id, v0, {seed_id}, direction, index, cfg)


def traverse_from_vector(
    seed_vector,
    direction: DirectionVector,
    index: KnnIndex,
    cfg: TraversalConfig,
    seed_label: str = "<vector>",
    exclude: set[str] | frozenset[str] = frozenset(),
) -> TraversalPath:
    """Traverse from an arbitrary vector (e.g. a prompt embedding) instead of
    a product. No product is implicitly excluded; pass ``exclude`` to carry
    over an existing seen set."""
    v0 = np.asarray(seed_vector, dtype=np.float32)
    if v0.shape != (index.dim,):
        raise DimMismatch(f"seed vector shape {v0.shape} does not match dim {index.dim}")
    return _run(seed_label, v0, set(exclude), direction, index, cfg)


def drift_series(path: TraversalPath) -> list[float]:
    """Per-step mean cosine distance to the catalog; rising values mean the
    walk is leaving the populated region of the space."""
    return [s.drift for s in path.steps]
