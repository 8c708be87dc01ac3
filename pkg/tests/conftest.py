"""Shared fixtures: a hand-built toy catalog and the standard synthetic setup."""

import numpy as np
import pytest

from gradrec import Catalog, KnnIndex, PromptBank, SyntheticSpec, generate_synthetic
from gradrec.vectors import unit

# Standard synthetic setup used across traversal/eval tests.
STANDARD_SPEC = dict(dim=64, n_products=600, n_attributes=1, intensity_levels=3, noise_sigma=0.05)


def make_unit(seed: int = 0, dim: int = 4) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return unit(rng.standard_normal(dim))


@pytest.fixture
def toy_catalog() -> Catalog:
    """Five dim-4 products with known geometry (no accidental ties)."""
    e = np.eye(4, dtype=np.float32)
    vectors = np.stack(
        [e[0], e[1], e[2], unit(e[0] + e[1]), unit(e[0] + e[1] + e[2] + e[3])]
    )
    return Catalog(
        ids=[f"t{i}" for i in range(5)],
        vectors=vectors,
        attributes=[{"row": str(i)} for i in range(5)],
        display_refs=[None, None, "img://t2", None, None],
    )


@pytest.fixture
def toy_index(toy_catalog) -> KnnIndex:
    return KnnIndex(toy_catalog)


@pytest.fixture
def toy_bank(toy_catalog) -> PromptBank:
    e = np.eye(4, dtype=np.float32)
    return PromptBank(
        {
            "first axis": e[0],
            "second axis": e[1],
            "diagonal": unit(e[0] + e[1]),
        }
    )


@pytest.fixture(scope="session")
def standard_synth():
    """Standard synthetic setup, seed 0: (catalog, bank, oracle)."""
    return generate_synthetic(SyntheticSpec(seed=0, **STANDARD_SPEC))


@pytest.fixture(scope="session")
def standard_index(standard_synth) -> KnnIndex:
    return KnnIndex(standard_synth[0])
