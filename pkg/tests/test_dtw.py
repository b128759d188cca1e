"""Trellis construction, backtracking, batching, and the enumeration oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alignkit import (
    AlignmentPath,
    BatchItemError,
    BudgetExceeded,
    EmbeddingSequence,
    EmptyInput,
    SimilarityMatrix,
    TooFewFrames,
    align,
    align_batch,
    backtrack,
    brute_force_align,
    build_trellis,
    validate_path,
)
from alignkit.dtw import _iter_transition_sets
from conftest import comparator_reads, make_pair, make_similarity

INF = np.inf


def sim(rows):
    return SimilarityMatrix(np.asarray(rows, dtype=np.float32))


class TestBuildTrellis:
    def test_single_cell(self):
        trellis = build_trellis(sim([[0.7]]))
        assert trellis.values.tolist() == [[pytest.approx(0.7)]]

    def test_two_by_two(self):
        a, b, c, d = 0.3, 0.2, 0.4, 0.5
        trellis = build_trellis(sim([[a, b], [c, d]])).values
        assert trellis[0, 0] == np.float32(a)
        assert trellis[0, 1] == -INF
        # One frame left with one token still uncovered: staying on token 0
        # at the last frame is infeasible.
        assert trellis[1, 0] == INF
        assert trellis[1, 1] == pytest.approx(a + d, abs=1e-7)

    def test_first_column_accumulates_until_slack(self):
        s = np.arange(8, dtype=np.float32).reshape(4, 2)
        trellis = build_trellis(SimilarityMatrix(s)).values
        # slack = N - M = 2: rows 0..2 accumulate, row 3 is stamped +inf
        assert trellis[1, 0] == pytest.approx(s[0, 0] + s[1, 0])
        assert trellis[2, 0] == pytest.approx(s[0, 0] + s[1, 0] + s[2, 0])
        assert trellis[3, 0] == INF

    def test_infinity_regions(self):
        # -inf exactly above the diagonal; +inf exactly where the path has
        # fallen too far behind to cover the remaining tokens; finite elsewhere.
        rng = np.random.default_rng(0)
        for _ in range(30):
            n = int(rng.integers(1, 20))
            m = int(rng.integers(1, min(n, 10) + 1))
            trellis = build_trellis(make_similarity(rng, n, m)).values
            for t in range(n):
                for j in range(m):
                    if j > t:
                        assert trellis[t, j] == -INF
                    elif t - j > n - m:
                        assert trellis[t, j] == INF
                    else:
                        assert np.isfinite(trellis[t, j])

    def test_too_few_frames(self):
        with pytest.raises(TooFewFrames):
            build_trellis(sim([[0.1, 0.2]]))

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            build_trellis(np.zeros((0, 3)))


class TestBacktrack:
    def test_square_forces_identity(self):
        rng = np.random.default_rng(1)
        for m in (1, 2, 5, 9):
            path = backtrack(build_trellis(make_similarity(rng, m, m)))
            assert path.assignment.tolist() == list(range(m))

    def test_single_token_absorbs_all_frames(self):
        rng = np.random.default_rng(2)
        path = backtrack(build_trellis(make_similarity(rng, 7, 1)))
        assert path.assignment.tolist() == [0] * 7

    def test_worked_example(self):
        path = backtrack(build_trellis(sim([[0.9, 0.1], [0.8, 0.2], [0.1, 0.9]])))
        assert path.assignment.tolist() == [0, 0, 1]
        assert path.score == pytest.approx(2.6, abs=1e-6)

    def test_score_equals_path_sum(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            s = make_similarity(rng, int(rng.integers(2, 30)), int(rng.integers(1, 9)))
            if s.n_frames < s.n_tokens:
                continue
            path = backtrack(build_trellis(s))
            manual = float(
                np.cumsum(
                    s.values[np.arange(s.n_frames), path.assignment].astype(np.float64)
                )[-1]
            )
            assert path.score == manual

    def test_tie_breaks_match_oracle_on_all_zero(self):
        zeros = sim(np.zeros((4, 2), dtype=np.float32))
        assert (
            backtrack(build_trellis(zeros)).assignment.tolist()
            == brute_force_align(zeros).assignment.tolist()
            == [0, 1, 1, 1]
        )

    def test_comparator_never_reads_infinite_cells(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = int(rng.integers(1, 40))
            m = int(rng.integers(1, min(n, 12) + 1))
            trellis = build_trellis(make_similarity(rng, n, m))
            path = backtrack(trellis)
            for value in comparator_reads(trellis.values, path.assignment):
                assert value != INF
                # the "here" cell can be -inf only above the diagonal, which
                # forces the strict descent; +inf must never be consulted
            assert validate_path(path.assignment, m).all_ok


class TestAlign:
    def test_identical_sequences_identity(self):
        rng = np.random.default_rng(5)
        frames = EmbeddingSequence(rng.standard_normal((6, 4)).astype(np.float32))
        path = align(frames, frames)
        assert path.assignment.tolist() == list(range(6))
        assert path.score == pytest.approx(6.0, abs=1e-5)

    def test_planted_blocks_recovered(self):
        # Frames are orthonormal tokens repeated in blocks; block boundaries
        # must come back exactly.
        basis = np.eye(5, dtype=np.float32)
        plant = [0, 0, 1, 1, 1, 2, 3, 3, 4]
        frames = EmbeddingSequence(basis[plant])
        tokens = EmbeddingSequence(basis)
        path = align(frames, tokens)
        assert path.assignment.tolist() == plant

    def test_matches_oracle_on_random_instance(self):
        rng = np.random.default_rng(6)
        frames, tokens = make_pair(rng, n_frames=8, n_tokens=3, dim=4)
        got = align(frames, tokens)
        from alignkit import cosine_similarity_matrix

        expected = brute_force_align(cosine_similarity_matrix(frames, tokens))
        assert got.assignment.tolist() == expected.assignment.tolist()
        assert got.score == expected.score

    def test_too_few_frames(self):
        rng = np.random.default_rng(7)
        frames, _ = make_pair(rng, n_frames=2, n_tokens=1, dim=3)
        tokens, _ = make_pair(rng, n_frames=5, n_tokens=1, dim=3)
        with pytest.raises(TooFewFrames):
            align(frames, tokens)

    def test_shift_invariance(self):
        # Adding a constant to every similarity moves the score by N*c and
        # leaves the argmax path alone.
        rng = np.random.default_rng(8)
        for _ in range(20):
            s = make_similarity(rng, int(rng.integers(2, 25)), int(rng.integers(1, 8)))
            if s.n_frames < s.n_tokens:
                continue
            shift = float(rng.uniform(-2, 2))
            base = backtrack(build_trellis(s))
            moved = backtrack(
                build_trellis(SimilarityMatrix(s.values + np.float32(shift)))
            )
            assert np.array_equal(base.assignment, moved.assignment)
            # tolerance absorbs the float32 re-rounding of each shifted entry
            assert moved.score == pytest.approx(
                base.score + s.n_frames * np.float64(np.float32(shift)), abs=1e-4
            )


class TestAlignBatch:
    def test_singleton_equals_align(self):
        rng = np.random.default_rng(9)
        pair = make_pair(rng)
        batched = align_batch([pair])[0]
        single = align(*pair)
        assert np.array_equal(batched.assignment, single.assignment)
        assert batched.score == single.score

    def test_batch_matches_per_item_bitwise(self):
        rng = np.random.default_rng(10)
        pairs = [make_pair(rng) for _ in range(64)]
        batched = align_batch(pairs)
        for result, pair in zip(batched, pairs):
            single = align(*pair)
            assert np.array_equal(result.assignment, single.assignment)
            assert result.score == single.score

    def test_error_isolation(self):
        rng = np.random.default_rng(11)
        good = make_pair(rng, n_frames=9, n_tokens=3, dim=5)
        bad = (good[1], good[0])  # tokens longer than frames
        results = align_batch([good, bad, good])
        assert isinstance(results[0], AlignmentPath)
        assert isinstance(results[1], BatchItemError)
        assert results[1].index == 1
        assert results[1].kind == "TooFewFrames"
        assert isinstance(results[2], AlignmentPath)

    def test_dimension_mismatch_isolated(self):
        rng = np.random.default_rng(12)
        frames, tokens = make_pair(rng, n_frames=5, n_tokens=2, dim=4)
        odd = EmbeddingSequence(rng.standard_normal((2, 7)).astype(np.float32))
        results = align_batch([(frames, odd), (frames, tokens)])
        assert isinstance(results[0], BatchItemError)
        assert results[0].kind == "DimensionMismatch"
        assert isinstance(results[1], AlignmentPath)


class TestBruteForce:
    def test_enumeration_counts(self):
        assert sum(1 for _ in _iter_transition_sets(3, 2)) == 2
        assert sum(1 for _ in _iter_transition_sets(5, 3)) == 6

    def test_budget_exceeded(self):
        rng = np.random.default_rng(13)
        with pytest.raises(BudgetExceeded):
            brute_force_align(make_similarity(rng, 50, 25))

    def test_oracle_agrees_with_backtrack(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            n = int(rng.integers(1, 11))
            m = int(rng.integers(1, min(n, 5) + 1))
            s = make_similarity(rng, n, m)
            fast = backtrack(build_trellis(s))
            slow = brute_force_align(s)
            assert fast.score == slow.score
            assert np.array_equal(fast.assignment, slow.assignment)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_structural_guarantees_on_random_inputs(seed):
    rng = np.random.default_rng(seed)
    frames, tokens = make_pair(rng)
    path = align(frames, tokens)
    a = path.assignment
    assert a[0] == 0
    assert a[-1] == tokens.length - 1
    steps = np.diff(a)
    assert steps.size == 0 or (steps.min() >= 0 and steps.max() <= 1)
    assert np.unique(a).size == tokens.length
    assert a.shape == (frames.length,)
