"""Exact cosine-similarity k-nearest-neighbor search over a catalog.

Scores are computed in float64 against the full catalog (no approximation),
sorted descending with ties broken by ascending catalog row index, so every
query is deterministic and identical to a brute-force scan.
"""

from __future__ import annotations

import numpy as np

from .catalog import Catalog, PromptBank
from .errors import DegenerateMean, DimMismatch, EmptyCatalog, InvalidParameter
from dataclasses import dataclass


@dataclass(frozen=True)
class Neighbor:
    id: str
    similarity: float


class KnnIndex:
    """Query layer over an immutable catalog; safe for concurrent readers."""

    def __init__(self, catalog: Catalog):
        if len(catalog) == 0:
            raise EmptyCatalog("cannot index an empty catalog")
        self.catalog = catalog
        # float64 copy so scores match a float64 brute-force oracle exactly.
        self._mat = catalog.vectors.astype(np.float64)

    @property
    def dim(self) -> int:
        return self.catalog.dim

    def _scores(self, query) -> np.ndarray:
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.dim,):
            raise DimMismatch(f"query shape {q.shape} does not match dim {self.dim}")
        if not np.all(np.isfinite(q)):
            raise InvalidParameter("query contains NaN or Inf")
        return self._mat @ q

    def knn(self, query, k: int, exclude: set[str] | frozenset[str] = frozenset()) -> list[Neighbor]:
        """The k catalog items most cosine-similar to ``query``.

        Excluded ids are skipped entirely; the result holds
        ``min(k, len(catalog) - len(exclude & catalog))`` neighbors.
        """
        if k < 1:
            raise InvalidParameter("k must be at least 1")
        scores = self._scores(query)
        n_excluded = 0
        if exclude:
            rows = [self.catalog.row_of(pid) for pid in exclude if pid in self.catalog]
            n_excluded = len(rows)
            if rows:
                scores = scores.copy()
                scores[rows] = -np.inf
        take = min(k, len(self.catalog) - n_excluded)
        if take <= 0:
            return []
        order = _top_rows(scores, take)
        ids = self.catalog.ids
        return [Neighbor(id=ids[row], similarity=float(scores[row])) for row in order]

    def knn_mean(self, point, k: int, normalize: bool = True) -> np.ndarray:
        """Mean of the k nearest catalog vectors to ``point``.

        Seen-product exclusions never apply here: the term models local
        catalog density around the point, not the discovery log. The mean is
        unit-normalized unless ``normalize`` is False.
        """
        if k < 1:
            raise InvalidParameter("k must be at least 1")
        scores = self._scores(point)
        take = min(k, len(self.catalog))
        rows = _top_rows(scores, take)
        mean = self._mat[rows].mean(axis=0)
        norm = float(np.linalg.norm(mean))
        if norm < 1e-8:
            raise DegenerateMean(f"neighbor mean has norm {norm:.2e}")
        if normalize:
            mean = mean / norm
        return mean.astype(np.float32)

    def retrieve_by_prompt(self, bank: PromptBank, prompt: str, n: int) -> list[Neighbor]:
        """Zero-shot retrieval: rank products by similarity to a prompt vector."""
        return self.knn(bank.vector(prompt), n)

    def mean_cosine_distance(self, point) -> float:
        """Mean of ``1 - cos(point, p)`` over the whole catalog (drift signal)."""
        q = np.asarray(point, dtype=np.float64)
        norm = float(np.linalg.norm(q))
        if norm < 1e-12:
            raise InvalidParameter("cannot measure drift of a zero vector")
        scores = self._scores(q / norm)
        return float(np.mean(1.0 - scores))


def _top_rows(scores: np.ndarray, take: int) -> np.ndarray:
    """Indices of the ``take`` largest scores, ordered by (score desc, row asc).

    Equivalent to ``np.argsort(-scores, kind="stable")[:take]`` but avoids a
    full sort on large catalogs: partition to the take-th value, keep every
    row tied with it so the row-index tie-break stays exact, then stable-sort
    only the candidates.
    """
    n = scores.shape[0]
    if take >= n:
        return np.argsort(-scores, kind="stable")
    kth = np.partition(scores, n - take)[n - take]
    candidates = np.flatnonzero(scores >= kth)  # ascending rows, ties included
    order = np.argsort(-scores[candidates], kind="stable")
    return candidates[order[:take]]


def neighbors_payload(neighbors: list[Neighbor]) -> list[dict]:
    """JSON-ready form of a neighbor list."""
    return [{"id": nb.id, "similarity": nb.similarity} for nb in neighbors]


def retrieve_payload(catalog: Catalog, neighbors: list[Neighbor]) -> list[dict]:
    """Neighbor list enriched with display references, for UI transport."""
    return [
        {
            "id": nb.id,
            "similarity": nb.similarity,
            "display_ref": catalog.display_refs[catalog.row_of(nb.id)],
        }
        for nb in neighbors
    ]
