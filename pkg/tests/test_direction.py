"""Direction construction: SNR formula, sign handling, recovery of planted axes."""

import numpy as np
import pytest

from gradrec import (
    ClassSets,
    DirectionVector,
    KnnIndex,
    SyntheticSpec,
    build_class_sets,
    build_direction,
    generate_synthetic,
    prompt_name,
    snr_direction,
)
from gradrec.errors import InsufficientCatalog, InvalidParameter, UnknownPrompt, ZeroSignal
from gradrec.vectors import cosine, unit


def sets_from_arrays(neutral, exemplar, n_prompt="n", e_prompt="e"):
    neutral = np.asarray(neutral, dtype=np.float32)
    exemplar = np.asarray(exemplar, dtype=np.float32)
    return ClassSets(
        neutral=neutral,
        exemplar=exemplar,
        neutral_ids=tuple(f"n{i}" for i in range(len(neutral))),
        exemplar_ids=tuple(f"e{i}" for i in range(len(exemplar))),
        neutral_prompt=n_prompt,
        exemplar_prompt=e_prompt,
    )


class TestSnrFormula:
    def test_zero_noise_closed_form(self):
        # all neutral vectors identical (e1), all exemplar identical: per-channel
        # noise is 0, so snr = signal/epsilon and the direction is the unit
        # class-mean difference.
        e1 = np.r_[1.0, 0, 0, 0]
        ex = unit(np.r_[1.0, 0.2, 0, 0])
        sets = sets_from_arrays([e1, e1, e1], [ex, ex], "base", "shifted")
        d = snr_direction(sets, epsilon=1e-6)
        signal = ex.astype(np.float64) - e1
        expect = signal / np.linalg.norm(signal)
        assert np.allclose(d.vector, expect, atol=1e-6)
        assert d.vector[1] > 0.9  # dominated by the shifted channel, positive
        assert d.vector[0] < 0

    def test_identical_sets_zero_signal(self):
        v = unit(np.r_[1.0, 2, 3, 4])
        sets = sets_from_arrays([v, v], [v, v])
        with pytest.raises(ZeroSignal):
            snr_direction(sets)

    def test_sign_preservation(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            neutral = rng.standard_normal((8, 16))
            exemplar = rng.standard_normal((8, 16))
            sets = sets_from_arrays(
                neutral / np.linalg.norm(neutral, axis=1, keepdims=True),
                exemplar / np.linalg.norm(exemplar, axis=1, keepdims=True),
            )
            d = snr_direction(sets)
            signal = sets.exemplar.astype(np.float64).mean(0) - sets.neutral.astype(
                np.float64
            ).mean(0)
            nz = np.abs(d.snr_raw) > 0
            assert np.all(np.sign(d.vector[nz]) == np.sign(signal[nz]))

    def test_scale_invariance_of_normalization(self):
        rng = np.random.default_rng(1)
        sets = sets_from_arrays(
            rng.standard_normal((5, 8)) * 0.1 + unit(np.arange(1.0, 9.0)),
            rng.standard_normal((5, 8)) * 0.1 + unit(np.arange(8.0, 0.0, -1)),
        )
        d = snr_direction(sets)
        for c in (0.25, 3.0, 1e6):
            scaled = c * d.snr_raw
            assert np.allclose(scaled / np.linalg.norm(scaled), d.vector, atol=1e-6)

    def test_epsilon_validation(self):
        v = unit(np.r_[1.0, 0, 0, 0])
        w = unit(np.r_[0.0, 1, 0, 0])
        sets = sets_from_arrays([v, v], [w, w])
        with pytest.raises(InvalidParameter):
            snr_direction(sets, epsilon=0.0)
        with pytest.raises(InvalidParameter):
            snr_direction(sets, noise_mode="bogus")

    def test_pooled_noise_mode(self):
        rng = np.random.default_rng(2)
        neutral = rng.standard_normal((20, 8)) * 0.3 + np.r_[1.0, 0, 0, 0, 0, 0, 0, 0]
        exemplar = rng.standard_normal((20, 8)) * 0.3 + np.r_[0.0, 1, 0, 0, 0, 0, 0, 0]
        neutral /= np.linalg.norm(neutral, axis=1, keepdims=True)
        exemplar /= np.linalg.norm(exemplar, axis=1, keepdims=True)
        sets = sets_from_arrays(neutral, exemplar)
        d_ex = snr_direction(sets, noise_mode="exemplar")
        d_pool = snr_direction(sets, noise_mode="pooled")
        assert d_pool.provenance.noise_mode == "pooled"
        # same signal, different weighting: directions close but not identical
        assert cosine(d_ex.vector, d_pool.vector) > 0.9
        assert not np.array_equal(d_ex.vector, d_pool.vector)

    def test_top_q_mask(self):
        rng = np.random.default_rng(3)
        sets = sets_from_arrays(
            rng.standard_normal((10, 16)) * 0.05 + unit(np.ones(16)),
            rng.standard_normal((10, 16)) * 0.05 + unit(np.r_[np.ones(8) * 2, np.ones(8)]),
        )
        d = snr_direction(sets, top_q=4)
        assert np.count_nonzero(d.snr_raw) == 4
        assert np.count_nonzero(d.vector) == 4
        with pytest.raises(InvalidParameter):
            snr_direction(sets, top_q=0)


class TestClassSets:
    def test_member_minimum(self):
        v = unit(np.r_[1.0, 0, 0, 0])
        with pytest.raises(InvalidParameter):
            sets_from_arrays([v], [v, v])

    def test_build_class_sets_sizes_and_overlap(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        sets = build_class_sets(
            standard_index, bank, prompt_name(0, 0.0), prompt_name(0, 1.0), m=100, n=100
        )
        assert sets.neutral.shape == (100, 64)
        assert sets.exemplar.shape == (100, 64)
        # pure retrieval at low noise: disjoint level clusters
        assert sets.overlap_fraction < 0.5

    def test_identical_prompts_full_overlap(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        p = prompt_name(0, 0.0)
        sets = build_class_sets(standard_index, bank, p, p, m=50, n=50)
        assert sets.overlap_fraction == 1.0
        assert sets.neutral_ids == sets.exemplar_ids

    def test_m_too_small(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        with pytest.raises(InvalidParameter):
            build_class_sets(
                standard_index, bank, prompt_name(0, 0.0), prompt_name(0, 1.0), m=1, n=10
            )

    def test_insufficient_catalog(self, toy_index, toy_bank):
        with pytest.raises(InsufficientCatalog):
            build_class_sets(toy_index, toy_bank, "first axis", "second axis", m=10, n=10)

    def test_unknown_prompt(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        with pytest.raises(UnknownPrompt):
            build_class_sets(standard_index, bank, "nope", prompt_name(0, 1.0), m=5, n=5)

    def test_majority_labels_differ(self, standard_synth, standard_index):
        _, bank, oracle = standard_synth
        sets = build_class_sets(
            standard_index, bank, prompt_name(0, 0.0), prompt_name(0, 1.0), m=100, n=100
        )
        maj = lambda ids: np.sign(np.mean([oracle.alpha(pid) for pid in ids]))
        assert maj(sets.neutral_ids) != maj(sets.exemplar_ids)


class TestDirectionRecovery:
    def test_recovers_planted_direction(self, standard_synth, standard_index):
        _, bank, oracle = standard_synth
        d = build_direction(
            standard_index, bank, prompt_name(0, 0.0), prompt_name(0, 1.0), m=100, n=100
        )
        assert cosine(d.vector, oracle.directions[0]) >= 0.9

    def test_composition_identity(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        neutral, exemplar = prompt_name(0, 0.0), prompt_name(0, 1.0)
        composed = snr_direction(
            build_class_sets(standard_index, bank, neutral, exemplar, 100, 100)
        )
        direct = build_direction(standard_index, bank, neutral, exemplar, 100, 100)
        assert direct == composed

    def test_provenance_records_sizes(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        d = build_direction(
            standard_index, bank, prompt_name(0, -1.0), prompt_name(0, 0.0), m=100, n=100
        )
        assert (d.provenance.neutral_size, d.provenance.exemplar_size) == (100, 100)

    def test_antisymmetry_exact_at_zero_noise(self):
        spec = SyntheticSpec(dim=32, n_products=120, noise_sigma=0.0, seed=6)
        catalog, bank, _ = generate_synthetic(spec)
        index = KnnIndex(catalog)
        a, b = prompt_name(0, 0.0), prompt_name(0, 1.0)
        fwd = build_direction(index, bank, a, b, m=20, n=20)
        swapped = build_direction(index, bank, b, a, m=20, n=20)
        assert cosine(fwd.vector, swapped.vector) <= -1.0 + 1e-6


class TestInvert:
    def test_involution(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        d = build_direction(standard_index, bank, prompt_name(0, 0.0), prompt_name(0, 1.0))
        assert d.invert().invert() == d

    def test_cosine_minus_one(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        d = build_direction(standard_index, bank, prompt_name(0, 0.0), prompt_name(0, 1.0))
        assert cosine(d.invert().vector, d.vector) == pytest.approx(-1.0)

    def test_provenance_flag(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        d = build_direction(standard_index, bank, prompt_name(0, 0.0), prompt_name(0, 1.0))
        assert not d.provenance.inverted
        assert d.invert().provenance.inverted


class TestSerialization:
    def test_json_roundtrip(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        d = build_direction(standard_index, bank, prompt_name(0, 0.0), prompt_name(0, 1.0))
        assert DirectionVector.from_json(d.to_json()) == d

    def test_unit_norm_and_parallel(self, standard_synth, standard_index):
        _, bank, _ = standard_synth
        d = build_direction(standard_index, bank, prompt_name(0, -1.0), prompt_name(0, 1.0))
        assert abs(np.linalg.norm(d.vector.astype(np.float64)) - 1.0) <= 1e-4
        assert cosine(d.vector, d.snr_raw) == pytest.approx(1.0, abs=1e-6)
