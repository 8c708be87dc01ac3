"""Product catalog data model, bundle file I/O and synthetic generation.

A catalog bundle is a pair of files sharing a base path:

``<base>.grvec``
    binary block: magic ``b"GREC"``, format version (u32 LE), product count
    (u64 LE), embedding dim (u32 LE), then the row-major float32 LE matrix.
``<base>.grmeta.jsonl``
    one JSON object per matrix row, in row order, with keys ``id``,
    ``attributes`` and optionally ``display_ref``.

Prompt banks live in ``<base>.grprompt.jsonl`` (objects with ``prompt`` and
``vector``); synthetic ground truth in ``<base>.oracle.json``.

All stored vectors are unit-length float32. Loading accepts norm drift up to
``RENORM_ATOL`` (repaired by re-normalizing) and rejects anything worse.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    DimMismatch,
    DuplicateId,
    DuplicatePrompt,
    EmptyCatalog,
    InvalidSpec,
    IoFailure,
    MalformedHeader,
    NonFiniteVector,
    NonUnitVector,
    UnknownPrompt,
)
from .vectors import NORM_ATOL, RENORM_ATOL, unit, unit_rows

MAGIC = b"GREC"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQI")  # magic, version, product count, dim

VEC_SUFFIX = ".grvec"
META_SUFFIX = ".grmeta.jsonl"
PROMPT_SUFFIX = ".grprompt.jsonl"
ORACLE_SUFFIX = ".oracle.json"

# Norm of the shared style component in synthetic catalogs, relative to the
# unit-scale attribute offsets. Sets the angular gap between level clusters:
# smaller values widen gaps until the regularized walk can no longer cross
# them, larger values narrow gaps until discovery order smears at cluster
# boundaries. 1.8 sits in the middle of the pocket mapped by
# scripts/sweep_defaults.py where the default walk both crosses all levels
# and discovers them in clean order.
STYLE_NORM = 1.8


@dataclass(frozen=True, eq=False)
class ProductRecord:
    """One product: id, unit image embedding and free-form metadata."""

    id: str
    image_vec: np.ndarray
    attributes: dict[str, str]
    display_ref: str | None = None


class Catalog:
    """Immutable aligned store of product ids, metadata and unit embeddings.

    Row order is canonical: it defines tie-breaking for all retrieval
    operations. Instances validate their invariants on construction and are
    safe for concurrent readers. The constructor takes ownership of the
    vector matrix and marks it read-only (no copy is made when the input is
    already a contiguous float32 array).
    """

    def __init__(
        self,
        ids: list[str],
        vectors: np.ndarray,
        attributes: list[dict[str, str]] | None = None,
        display_refs: list[str | None] | None = None,
    ):
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise DimMismatch(f"expected a 2-D embedding matrix, got shape {vectors.shape}")
        n, dim = vectors.shape
        if n == 0:
            raise EmptyCatalog("catalog must contain at least one product")
        if len(ids) != n:
            raise DimMismatch(f"{len(ids)} ids for {n} embedding rows")
        if attributes is None:
            attributes = [{} for _ in range(n)]
        if display_refs is None:
            display_refs = [None] * n
        if len(attributes) != n or len(display_refs) != n:
            raise DimMismatch("metadata columns must match the number of products")
        if not np.all(np.isfinite(vectors)):
            bad = int(np.argwhere(~np.isfinite(vectors).all(axis=1))[0][0])
            raise NonFiniteVector(f"row {bad} contains NaN or Inf")
        norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
        worst = int(np.argmax(np.abs(norms - 1.0)))
        if abs(norms[worst] - 1.0) > NORM_ATOL:
            raise NonUnitVector(
                f"row {worst} has norm {norms[worst]:.6f}; expected 1 within {NORM_ATOL}"
            )
        self.ids: list[str] = list(ids)
        self.vectors: np.ndarray = vectors
        self.vectors.setflags(write=False)
        self.attributes: list[dict[str, str]] = list(attributes)
        self.display_refs: list[str | None] = list(display_refs)
        self._rows: dict[str, int] = {}
        for row, pid in enumerate(self.ids):
            if pid in self._rows:
                raise DuplicateId(f"product id {pid!r} appears more than once")
            self._rows[pid] = row

    @classmethod
    def from_records(cls, records: Iterable[ProductRecord]) -> "Catalog":
        records = list(records)
        if not records:
            raise EmptyCatalog("catalog must contain at least one product")
        vectors = np.stack([r.image_vec for r in records]).astype(np.float32)
        return cls(
            ids=[r.id for r in records],
            vectors=vectors,
            attributes=[dict(r.attributes) for r in records],
            display_refs=[r.display_ref for r in records],
        )

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, pid: str) -> bool:
        return pid in self._rows

    def row_of(self, pid: str) -> int:
        if pid not in self._rows:
            raise KeyError(pid)
        return self._rows[pid]

    def vector_of(self, pid: str) -> np.ndarray:
        return self.vectors[self.row_of(pid)]

    def record(self, row: int) -> ProductRecord:
        return ProductRecord(
            id=self.ids[row],
            image_vec=self.vectors[row],
            attributes=self.attributes[row],
            display_ref=self.display_refs[row],
        )

    def records(self) -> Iterator[ProductRecord]:
        for row in range(len(self)):
            yield self.record(row)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Catalog):
            return NotImplemented
        return (
            self.ids == other.ids
            and self.attributes == other.attributes
            and self.display_refs == other.display_refs
            and self.vectors.tobytes() == other.vectors.tobytes()
        )


class PromptBank:
    """Precomputed text-encoder outputs, one unit vector per prompt string."""

    def __init__(self, entries: dict[str, np.ndarray], dim: int | None = None):
        self.entries: dict[str, np.ndarray] = {}
        self._dim = dim
        for prompt, vec in entries.items():
            vec = np.asarray(vec, dtype=np.float32)
            if vec.ndim != 1:
                raise DimMismatch(f"prompt {prompt!r}: expected a 1-D vector")
            if self._dim is None:
                self._dim = vec.shape[0]
            if vec.shape[0] != self._dim:
                raise DimMismatch(
                    f"prompt {prompt!r}: dim {vec.shape[0]} != bank dim {self._dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise NonFiniteVector(f"prompt {prompt!r} vector contains NaN or Inf")
            norm = float(np.linalg.norm(vec.astype(np.float64)))
            if abs(norm - 1.0) > RENORM_ATOL:
                raise NonUnitVector(f"prompt {prompt!r} has norm {norm:.6f}")
            if abs(norm - 1.0) > NORM_ATOL:
                vec = unit(vec)
            vec.setflags(write=False)
            self.entries[prompt] = vec

    @property
    def dim(self) -> int | None:
        return self._dim

    def vector(self, prompt: str) -> np.ndarray:
        if prompt not in self.entries:
            raise UnknownPrompt(f"prompt {prompt!r} not in bank")
        return self.entries[prompt]

    def prompts(self) -> list[str]:
        return list(self.entries)

    def __contains__(self, prompt: str) -> bool:
        return prompt in self.entries

    def __len__(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# Bundle I/O
# ---------------------------------------------------------------------------


def bundle_base(path: str | os.PathLike) -> str:
    """Strip a known bundle suffix so callers may pass any bundle file."""
    p = str(path)
    for suffix in (VEC_SUFFIX, META_SUFFIX, PROMPT_SUFFIX, ORACLE_SUFFIX):
        if p.endswith(suffix):
            return p[: -len(suffix)]
    return p


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def save_catalog(catalog: Catalog, path: str | os.PathLike) -> None:
    """Write the two bundle files; loading them reproduces the catalog bit-exactly."""
    base = bundle_base(path)
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, len(catalog), catalog.dim)
    _atomic_write(base + VEC_SUFFIX, header + catalog.vectors.tobytes())
    lines = []
    for row in range(len(catalog)):
        obj: dict = {"id": catalog.ids[row], "attributes": catalog.attributes[row]}
        if catalog.display_refs[row] is not None:
            obj["display_ref"] = catalog.display_refs[row]
        lines.append(json.dumps(obj, ensure_ascii=False, sort_keys=True))
    _atomic_write(base + META_SUFFIX, ("\n".join(lines) + "\n").encode("utf-8"))


def load_catalog(path: str | os.PathLike) -> Catalog:
    """Load and validate a catalog bundle.

    Vectors whose stored norm drifts from 1 by more than ``NORM_ATOL`` but at
    most ``RENORM_ATOL`` are re-normalized; larger drift raises NonUnitVector.
    """
    base = bundle_base(path)
    vec_path = base + VEC_SUFFIX
    meta_path = base + META_SUFFIX
    try:
        with open(vec_path, "rb") as fh:
            blob = fh.read()
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta_lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read catalog bundle {base!r}: {exc}") from exc

    if len(blob) < _HEADER.size:
        raise MalformedHeader(f"{vec_path}: truncated header")
    magic, version, count, dim = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise MalformedHeader(f"{vec_path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise MalformedHeader(f"{vec_path}: unsupported format version {version}")
    if count == 0:
        raise EmptyCatalog(f"{vec_path}: zero products")
    if dim == 0:
        raise MalformedHeader(f"{vec_path}: zero dim")
    payload = blob[_HEADER.size :]
    if len(payload) != count * dim * 4:
        raise DimMismatch(
            f"{vec_path}: payload holds {len(payload) // 4} floats, "
            f"header promises {count} x {dim}"
        )
    vectors = np.frombuffer(payload, dtype="<f4").reshape(count, dim).copy()
    if not np.all(np.isfinite(vectors)):
        bad = int(np.argwhere(~np.isfinite(vectors).all(axis=1))[0][0])
        raise NonFiniteVector(f"{vec_path}: row {bad} contains NaN or Inf")
    norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
    deviation = np.abs(norms - 1.0)
    if np.any(deviation > RENORM_ATOL):
        bad = int(np.argmax(deviation))
        raise NonUnitVector(f"{vec_path}: row {bad} has norm {norms[bad]:.6f}")
    repair = deviation > NORM_ATOL
    if np.any(repair):
        vectors[repair] = unit_rows(vectors[repair])

    if len(meta_lines) != count:
        raise MalformedHeader(
            f"{meta_path}: {len(meta_lines)} metadata rows for {count} products"
        )
    ids: list[str] = []
    attributes: list[dict[str, str]] = []
    display_refs: list[str | None] = []
    for lineno, line in enumerate(meta_lines):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedHeader(f"{meta_path}: line {lineno} is not JSON: {exc}") from exc
        if not isinstance(obj, dict) or "id" not in obj or "attributes" not in obj:
            raise MalformedHeader(f"{meta_path}: line {lineno} lacks id/attributes")
        ids.append(str(obj["id"]))
        attributes.append({str(k): str(v) for k, v in obj["attributes"].items()})
        display_refs.append(obj.get("display_ref"))
    return Catalog(ids=ids, vectors=vectors, attributes=attributes, display_refs=display_refs)


def save_prompt_bank(bank: PromptBank, path: str | os.PathLike) -> None:
    base = bundle_base(path)
    lines = [
        json.dumps(
            {"prompt": prompt, "vector": [float(x) for x in vec]}, ensure_ascii=False
        )
        for prompt, vec in bank.entries.items()
    ]
    payload = ("\n".join(lines) + "\n") if lines else ""
    _atomic_write(base + PROMPT_SUFFIX, payload.encode("utf-8"))


def load_prompt_bank(path: str | os.PathLike, dim: int | None = None) -> PromptBank:
    base = bundle_base(path)
    prompt_path = base + PROMPT_SUFFIX
    try:
        with open(prompt_path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read prompt bank {prompt_path!r}: {exc}") from exc
    entries: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedHeader(f"{prompt_path}: line {lineno} is not JSON: {exc}") from exc
        if not isinstance(obj, dict) or "prompt" not in obj or "vector" not in obj:
            raise MalformedHeader(f"{prompt_path}: line {lineno} lacks prompt/vector")
        prompt = str(obj["prompt"])
        if prompt in entries:
            raise DuplicatePrompt(f"{prompt_path}: prompt {prompt!r} appears twice")
        entries[prompt] = np.asarray(obj["vector"], dtype=np.float32)
    return PromptBank(entries, dim=dim)


# ---------------------------------------------------------------------------
# Synthetic catalogs with planted attribute directions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for a synthetic catalog with known attribute structure."""

    dim: int
    n_products: int
    n_attributes: int = 1
    intensity_levels: int = 3
    noise_sigma: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidSpec("dim must be at least 2")
        if self.n_products < 1:
            raise InvalidSpec("n_products must be positive")
        if not (1 <= self.n_attributes < self.dim):
            raise InvalidSpec("need 1 <= n_attributes < dim")
        if self.intensity_levels < 3:
            raise InvalidSpec("intensity_levels must be at least 3")
        if self.noise_sigma < 0:
            raise InvalidSpec("noise_sigma must be non-negative")

    @property
    def levels(self) -> np.ndarray:
        """Evenly spaced intensity values on [-1, +1]."""
        return np.linspace(-1.0, 1.0, self.intensity_levels)


def prompt_name(attribute: int, level: float) -> str:
    """Canonical prompt string for one (attribute, intensity level) pair."""
    return f"attr{attribute} level {level:+g}"


@dataclass
class SyntheticOracle:
    """Ground truth planted by the generator: per-product intensities and
    the exact attribute directions, for verifying recovered structure."""

    levels: list[float]
    alphas: dict[str, list[float]]
    directions: np.ndarray  # (n_attributes, dim) float64, orthonormal rows
    style_base: np.ndarray  # (dim,) float64

    def alpha(self, pid: str, attribute: int = 0) -> float:
        return self.alphas[pid][attribute]

    def alpha_map(self, attribute: int = 0) -> dict[str, float]:
        return {pid: values[attribute] for pid, values in self.alphas.items()}

    def to_json(self) -> dict:
        return {
            "levels": [float(x) for x in self.levels],
            "alphas": {pid: [float(a) for a in row] for pid, row in self.alphas.items()},
            "directions": [[float(x) for x in row] for row in self.directions],
            "style_base": [float(x) for x in self.style_base],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SyntheticOracle":
        return cls(
            levels=[float(x) for x in obj["levels"]],
            alphas={str(k): [float(a) for a in v] for k, v in obj["alphas"].items()},
            directions=np.asarray(obj["directions"], dtype=np.float64),
            style_base=np.asarray(obj["style_base"], dtype=np.float64),
        )


def save_oracle(oracle: SyntheticOracle, path: str | os.PathLike) -> None:
    base = bundle_base(path)
    payload = json.dumps(oracle.to_json(), sort_keys=True).encode("utf-8")
    _atomic_write(base + ORACLE_SUFFIX, payload)


def load_oracle(path: str | os.PathLike) -> SyntheticOracle:
    base = bundle_base(path)
    try:
        with open(base + ORACLE_SUFFIX, "r", encoding="utf-8") as fh:
            return SyntheticOracle.from_json(json.load(fh))
    except OSError as exc:
        raise IoFailure(f"cannot read oracle {base + ORACLE_SUFFIX!r}: {exc}") from exc


def _orthonormal_rows(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Random orthonormal rows via modified Gram-Schmidt (BLAS-independent)."""
    basis = np.empty((count, dim), dtype=np.float64)
    for i in range(count):
        while True:
            v = rng.standard_normal(dim)
            for j in range(i):
                v -= np.dot(v, basis[j]) * basis[j]
            norm = np.linalg.norm(v)
            if norm > 1e-6:
                basis[i] = v / norm
                break
    return basis


def generate_synthetic(spec: SyntheticSpec) -> tuple[Catalog, PromptBank, SyntheticOracle]:
    """Build a catalog whose vectors vary along planted orthonormal directions.

    Every product is ``normalize(style_base + sum_a alpha_a * d_a + noise)``
    where the per-attribute intensity ``alpha_a`` is drawn from the evenly
    spaced level grid (balanced counts, seeded shuffle) and the noise is
    isotropic Gaussian with std ``noise_sigma``. The prompt bank holds one
    entry per (attribute, level): the noise-free center of that level's
    cluster. Deterministic given the parameters.
    """
    rng = np.random.default_rng(spec.seed)
    basis = _orthonormal_rows(rng, spec.n_attributes + 1, spec.dim)
    style_base = STYLE_NORM * basis[0]
    directions = basis[1:]

    levels = spec.levels
    alphas = np.empty((spec.n_products, spec.n_attributes), dtype=np.float64)
    for a in range(spec.n_attributes):
        alphas[:, a] = rng.permutation(np.resize(levels, spec.n_products))
    noise = rng.standard_normal((spec.n_products, spec.dim)) * spec.noise_sigma

    raw = style_base[None, :] + alphas @ directions + noise
    vectors = unit_rows(raw)

    width = max(5, len(str(spec.n_products - 1)))
    ids = [f"p{i:0{width}d}" for i in range(spec.n_products)]
    attributes = [
        {f"attr{a}_level": f"{alphas[i, a]:+g}" for a in range(spec.n_attributes)}
        for i in range(spec.n_products)
    ]
    catalog = Catalog(ids=ids, vectors=vectors, attributes=attributes)

    entries: dict[str, np.ndarray] = {}
    for a in range(spec.n_attributes):
        for level in levels:
            entries[prompt_name(a, float(level))] = unit(
                style_base + float(level) * directions[a]
            )
    bank = PromptBank(entries, dim=spec.dim)

    oracle = SyntheticOracle(
        levels=[float(x) for x in levels],
        alphas={ids[i]: [float(a) for a in alphas[i]] for i in range(spec.n_products)},
        directions=directions,
        style_base=style_base,
    )
    return catalog, bank, oracle


def save_synthetic_bundle(
    catalog: Catalog,
    bank: PromptBank,
    oracle: SyntheticOracle,
    path: str | os.PathLike,
) -> list[str]:
    """Write catalog, prompt bank and oracle files; returns the paths written."""
    base = bundle_base(path)
    save_catalog(catalog, base)
    save_prompt_bank(bank, base)
    save_oracle(oracle, base)
    return [base + VEC_SUFFIX, base + META_SUFFIX, base + PROMPT_SUFFIX, base + ORACLE_SUFFIX]
