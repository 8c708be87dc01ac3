"""Construction of attribute direction vectors from retrieved class sets.

A comparative attribute ("darker") is pinned down by a pair of prompts: a
neutral one ("blue shirt") and an exemplar one ("dark blue shirt"). Zero-shot
retrieval turns each prompt into a small set of product image vectors; the
direction is the unit-normalized vector of per-channel signal-to-noise
ratios between the two sets, keeping each channel's sign:

    snr[j] = (mean_exemplar[j] - mean_neutral[j]) / (std_exemplar[j] + epsilon)

High-magnitude channels are the ones that distinguish the exemplar class
from the neutral class, so the normalized SNR vector points from neutral
toward exemplar in embedding space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .catalog import PromptBank
from .errors import DimMismatch, InsufficientCatalog, InvalidParameter, ZeroSignal
from .index import KnnIndex

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-6

# Retrieved class sets sharing at least this fraction of products signal a
# retrieval-quality problem (the prompts barely separate the classes).
OVERLAP_WARN_FRACTION = 0.5


@dataclass(frozen=True)
class ClassSets:
    """Image-vector sets retrieved for the neutral and exemplar prompts."""

    neutral: np.ndarray  # (M, dim) float32
    exemplar: np.ndarray  # (N, dim) float32
    neutral_ids: tuple[str, ...]
    exemplar_ids: tuple[str, ...]
    neutral_prompt: str
    exemplar_prompt: str

    def __post_init__(self):
        if self.neutral.ndim != 2 or self.exemplar.ndim != 2:
            raise DimMismatch("class sets must be 2-D vector stacks")
        if self.neutral.shape[0] < 2 or self.exemplar.shape[0] < 2:
            raise InvalidParameter("class sets need at least 2 members each")
        if self.neutral.shape[1] != self.exemplar.shape[1]:
            raise DimMismatch(
                f"class-set dims differ: {self.neutral.shape[1]} vs {self.exemplar.shape[1]}"
            )

    @property
    def overlap_count(self) -> int:
        return len(set(self.neutral_ids) & set(self.exemplar_ids))

    @property
    def overlap_fraction(self) -> float:
        smaller = min(len(self.neutral_ids), len(self.exemplar_ids))
        return self.overlap_count / smaller if smaller else 0.0


@dataclass(frozen=True)
class DirectionProvenance:
    """How a direction vector was built; travels with it through every API."""

    neutral_prompt: str
    exemplar_prompt: str
    neutral_size: int
    exemplar_size: int
    overlap_count: int
    overlap_fraction: float
    epsilon: float
    noise_mode: str
    inverted: bool = False

    def to_json(self) -> dict:
        return {
            "neutral_prompt": self.neutral_prompt,
            "exemplar_prompt": self.exemplar_prompt,
            "neutral_size": self.neutral_size,
            "exemplar_size": self.exemplar_size,
            "overlap_count": self.overlap_count,
            "overlap_fraction": self.overlap_fraction,
            "epsilon": self.epsilon,
            "noise_mode": self.noise_mode,
            "inverted": self.inverted,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DirectionProvenance":
        return cls(
            neutral_prompt=obj["neutral_prompt"],
            exemplar_prompt=obj["exemplar_prompt"],
            neutral_size=int(obj["neutral_size"]),
            exemplar_size=int(obj["exemplar_size"]),
            overlap_count=int(obj["overlap_count"]),
            overlap_fraction=float(obj["overlap_fraction"]),
            epsilon=float(obj["epsilon"]),
            noise_mode=str(obj["noise_mode"]),
            inverted=bool(obj.get("inverted", False)),
        )


@dataclass(frozen=True, eq=False)
class DirectionVector:
    """Unit direction for one comparative attribute, plus raw SNR channels."""

    vector: np.ndarray  # float32, unit norm, parallel to snr_raw
    snr_raw: np.ndarray  # float64, pre-normalization channel SNRs
    provenance: DirectionProvenance

    def invert(self) -> "DirectionVector":
        """Direction for the opposite sense of the attribute ("lighter"
        from a "darker" build); an involution."""
        return DirectionVector(
            vector=-self.vector,
            snr_raw=-self.snr_raw,
            provenance=replace(self.provenance, inverted=not self.provenance.inverted),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirectionVector):
            return NotImplemented
        return (
            np.array_equal(self.vector, other.vector)
            and np.array_equal(self.snr_raw, other.snr_raw)
            and self.provenance == other.provenance
        )

    def to_json(self) -> dict:
        return {
            "v_c": [float(x) for x in self.vector],
            "snr_raw": [float(x) for x in self.snr_raw],
            "provenance": self.provenance.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DirectionVector":
        return cls(
            vector=np.asarray(obj["v_c"], dtype=np.float32),
            snr_raw=np.asarray(obj["snr_raw"], dtype=np.float64),
            provenance=DirectionProvenance.from_json(obj["provenance"]),
        )


def build_class_sets(
    index: KnnIndex,
    bank: PromptBank,
    neutral_prompt: str,
    exemplar_prompt: str,
    m: int,
    n: int,
) -> ClassSets:
    """Retrieve the neutral (size m) and exemplar (size n) class sets.

    Overlap between the sets is allowed but reported; heavy overlap logs a
    warning because it degrades the extracted direction.
    """
    if m < 2 or n < 2:
        raise InvalidParameter("class-set sizes m and n must be at least 2")
    if len(index.catalog) < max(m, n):
        raise InsufficientCatalog(
            f"catalog has {len(index.catalog)} products; need {max(m, n)}"
        )
    neutral_nb = index.retrieve_by_prompt(bank, neutral_prompt, m)
    exemplar_nb = index.retrieve_by_prompt(bank, exemplar_prompt, n)
    catalog = index.catalog
    sets = ClassSets(
        neutral=np.stack([catalog.vector_of(nb.id) for nb in neutral_nb]),
        exemplar=np.stack([catalog.vector_of(nb.id) for nb in exemplar_nb]),
        neutral_ids=tuple(nb.id for nb in neutral_nb),
        exemplar_ids=tuple(nb.id for nb in exemplar_nb),
        neutral_prompt=neutral_prompt,
        exemplar_prompt=exemplar_prompt,
    )
    if sets.overlap_fraction >= OVERLAP_WARN_FRACTION:
        log.warning(
            "class sets for %r / %r overlap by %.0f%%; the prompts barely "
            "separate the classes",
            neutral_prompt,
            exemplar_prompt,
            100 * sets.overlap_fraction,
        )
    return sets


def snr_direction(
    sets: ClassSets,
    epsilon: float = DEFAULT_EPSILON,
    noise_mode: str = "exemplar",
    top_q: int | None = None,
) -> DirectionVector:
    """Signed channel-wise SNR between the class sets, unit-normalized.

    ``noise_mode`` picks the denominator: the exemplar set's per-channel
    population std ("exemplar", default) or the pooled within-set std of
    both sets ("pooled"). ``top_q`` optionally keeps only the q channels of
    largest |SNR| and zeroes the rest (off by default).
    """
    if epsilon <= 0:
        raise InvalidParameter("epsilon must be positive")
    if noise_mode not in ("exemplar", "pooled"):
        raise InvalidParameter(f"unknown noise_mode {noise_mode!r}")
    exemplar = sets.exemplar.astype(np.float64)
    neutral = sets.neutral.astype(np.float64)
    signal = exemplar.mean(axis=0) - neutral.mean(axis=0)
    if noise_mode == "exemplar":
        noise = exemplar.std(axis=0)  # population std; deterministic for N=2
    else:
        n_e, n_n = exemplar.shape[0], neutral.shape[0]
        pooled_var = (exemplar.var(axis=0) * n_e + neutral.var(axis=0) * n_n) / (n_e + n_n)
        noise = np.sqrt(pooled_var)
    snr = signal / (noise + epsilon)
    if top_q is not None:
        if top_q < 1:
            raise InvalidParameter("top_q must be at least 1")
        if top_q < snr.shape[0]:
            keep = np.argsort(-np.abs(snr), kind="stable")[:top_q]
            mask = np.zeros_like(snr)
            mask[keep] = 1.0
            snr = snr * mask
    norm = float(np.linalg.norm(snr))
    if norm < 1e-10:
        raise ZeroSignal("class sets are indistinguishable (zero channel-wise SNR)")
    provenance = DirectionProvenance(
        neutral_prompt=sets.neutral_prompt,
        exemplar_prompt=sets.exemplar_prompt,
        neutral_size=sets.neutral.shape[0],
        exemplar_size=sets.exemplar.shape[0],
        overlap_count=sets.overlap_count,
        overlap_fraction=sets.overlap_fraction,
        epsilon=epsilon,
        noise_mode=noise_mode,
    )
    return DirectionVector(
        vector=(snr / norm).astype(np.float32), snr_raw=snr, provenance=provenance
    )


def build_direction(
    index: KnnIndex,
    bank: PromptBank,
    neutral_prompt: str,
    exemplar_prompt: str,
    m: int = 100,
    n: int = 100,
    epsilon: float = DEFAULT_EPSILON,
    noise_mode: str = "exemplar",
    top_q: int | None = None,
) -> DirectionVector:
    """Retrieve class sets for the prompt pair and extract their direction."""
    sets = build_class_sets(index, bank, neutral_prompt, exemplar_prompt, m, n)
    return snr_direction(sets, epsilon=epsilon, noise_mode=noise_mode, top_q=top_q)
