"""Discrete and interpolation mixing of frames with aligned tokens."""

import numpy as np
import pytest

from alignkit import (
    DimensionMismatch,
    EmbeddingSequence,
    MixupConfig,
    PathMismatch,
    align,
    discrete_mixup,
    interpolation_mixup,
)
from conftest import make_pair


def planted_inputs(rng, n_frames=12, n_tokens=4, dim=8):
    frames, tokens = make_pair(rng, n_frames=n_frames, n_tokens=n_tokens, dim=dim)
    path = align(frames, tokens)
    return frames, tokens, path


class TestDiscrete:
    def test_p_zero_returns_frames_bitwise(self):
        rng = np.random.default_rng(0)
        frames, tokens, path = planted_inputs(rng)
        mixed = discrete_mixup(frames, tokens, path, MixupConfig(p_star=0.0, rng_seed=7))
        assert np.array_equal(mixed.data, frames.data)

    def test_p_one_returns_aligned_tokens(self):
        rng = np.random.default_rng(1)
        frames, tokens, path = planted_inputs(rng)
        mixed = discrete_mixup(frames, tokens, path, MixupConfig(p_star=1.0, rng_seed=7))
        assert np.array_equal(mixed.data, tokens.data[path.assignment])

    def test_replacement_fraction_near_p(self):
        rng = np.random.default_rng(2)
        n = 100_000
        frames = EmbeddingSequence(np.ones((n, 2), dtype=np.float32))
        tokens = EmbeddingSequence(np.zeros((1, 2), dtype=np.float32) + 2.0)
        assignment = np.zeros(n, dtype=np.int64)
        mixed = discrete_mixup(
            frames, tokens, assignment, MixupConfig(p_star=0.2, rng_seed=123)
        )
        fraction = float((mixed.data[:, 0] == 2.0).mean())
        assert abs(fraction - 0.2) <= 0.01

    def test_seed_reproducible_bitwise(self):
        rng = np.random.default_rng(3)
        frames, tokens, path = planted_inputs(rng, n_frames=64)
        config = MixupConfig(p_star=0.5, rng_seed=99)
        first = discrete_mixup(frames, tokens, path, config)
        second = discrete_mixup(frames, tokens, path, config)
        assert np.array_equal(first.data, second.data)

    def test_different_seeds_differ(self):
        rng = np.random.default_rng(4)
        frames, tokens, path = planted_inputs(rng, n_frames=64)
        a = discrete_mixup(frames, tokens, path, MixupConfig(p_star=0.5, rng_seed=1))
        b = discrete_mixup(frames, tokens, path, MixupConfig(p_star=0.5, rng_seed=2))
        assert not np.array_equal(a.data, b.data)


class TestInterpolation:
    def test_endpoints_exact(self):
        rng = np.random.default_rng(5)
        frames, tokens, path = planted_inputs(rng)
        assert np.array_equal(
            interpolation_mixup(frames, tokens, path, 0.0).data, frames.data
        )
        assert np.array_equal(
            interpolation_mixup(frames, tokens, path, 1.0).data,
            tokens.data[path.assignment],
        )

    def test_hand_example(self):
        frames = EmbeddingSequence(np.array([[1.0, 0.0]], dtype=np.float32))
        tokens = EmbeddingSequence(np.array([[0.0, 1.0]], dtype=np.float32))
        mixed = interpolation_mixup(frames, tokens, np.array([0]), 0.2)
        assert mixed.data[0].tolist() == pytest.approx([0.8, 0.2], abs=1e-6)

    def test_linearity(self):
        rng = np.random.default_rng(6)
        frames, tokens, path = planted_inputs(rng)
        p1, p2 = 0.3, 0.7
        left = (
            interpolation_mixup(frames, tokens, path, p1).data.astype(np.float64)
            + interpolation_mixup(frames, tokens, path, p2).data.astype(np.float64)
        )
        mid = 2.0 * interpolation_mixup(frames, tokens, path, (p1 + p2) / 2).data.astype(
            np.float64
        )
        assert np.abs(left - mid).max() < 1e-6

    def test_output_on_segment(self):
        rng = np.random.default_rng(7)
        frames, tokens, path = planted_inputs(rng)
        mixed = interpolation_mixup(frames, tokens, path, 0.35).data.astype(np.float64)
        f = frames.data.astype(np.float64)
        e = tokens.data.astype(np.float64)[path.assignment]
        lhs = np.linalg.norm(mixed - f, axis=1) + np.linalg.norm(mixed - e, axis=1)
        rhs = np.linalg.norm(f - e, axis=1)
        assert np.abs(lhs - rhs).max() < 1e-5

    def test_only_aligned_token_used(self):
        # With orthonormal tokens, projecting the mixed frame onto any token
        # other than the aligned one must recover the frame's own component.
        basis = np.eye(6, dtype=np.float32)
        tokens = EmbeddingSequence(basis[:3])
        plant = [0, 0, 1, 2, 2]
        frames = EmbeddingSequence(basis[3:4].repeat(5, axis=0))
        mixed = interpolation_mixup(frames, tokens, np.array(plant), 0.4).data
        for i, token_idx in enumerate(plant):
            for other in range(3):
                expected = 0.4 if other == token_idx else 0.0
                assert mixed[i] @ basis[other] == pytest.approx(expected, abs=1e-7)


class TestValidation:
    def test_wrong_length_rejected(self):
        rng = np.random.default_rng(8)
        frames, tokens, _ = planted_inputs(rng, n_frames=10)
        with pytest.raises(PathMismatch):
            discrete_mixup(frames, tokens, np.zeros(9, dtype=np.int64),
                           MixupConfig(p_star=0.5))

    def test_out_of_range_index_rejected(self):
        rng = np.random.default_rng(9)
        frames, tokens, path = planted_inputs(rng, n_frames=10, n_tokens=4)
        bad = path.assignment.copy()
        bad[-1] = 4
        with pytest.raises(PathMismatch):
            interpolation_mixup(frames, tokens, bad, 0.5)

    def test_dim_mismatch_rejected(self):
        rng = np.random.default_rng(10)
        frames, _, path = planted_inputs(rng, n_frames=10, n_tokens=4, dim=8)
        other = EmbeddingSequence(rng.standard_normal((4, 5)).astype(np.float32))
        with pytest.raises(DimensionMismatch):
            interpolation_mixup(frames, other, path, 0.5)

    def test_config_bounds(self):
        with pytest.raises(ValueError):
            MixupConfig(p_star=1.5)
        with pytest.raises(ValueError):
            MixupConfig(p_star=0.5, mode="blend")
        with pytest.raises(ValueError):
            interpolation_mixup(
                EmbeddingSequence(np.ones((1, 2), dtype=np.float32)),
                EmbeddingSequence(np.ones((1, 2), dtype=np.float32)),
                np.array([0]),
                -0.1,
            )
