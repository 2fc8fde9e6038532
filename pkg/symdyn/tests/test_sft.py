# symdyn/tests/test_sft.py
from __future__ import annotations

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings as hyp_settings, strategies as st

from symdyn.dynamics.errors import InputError, ResourceError
from symdyn.dynamics.sft import (
    BLOCK,
    DOUBLE_GENERAL_BLOCK,
    GENERAL_BLOCK,
    OPEN,
    REVERSE_BLOCK,
    TransitionSystem,
    Word,
    block_decompose,
    classify_letters,
    count_words,
    enumerate_words,
    extensions,
    forced_run,
    is_double_general_block,
    is_general_block,
    is_valid_word,
    iter_words,
    max_block_length,
    segment_kind,
)

from .fixtures import GOLDEN, golden

# 1 -> 2 -> 3 is forced; 3 and 4 branch
CHAIN = [[0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 1], [1, 1, 1, 1]]
# letter 2 is degenerate (the {0, 1/4, 1/2} doubling partition)
THREE_MATRIX = [[1, 1, 0], [0, 0, 1], [1, 1, 1]]
MATRICES = (GOLDEN, THREE_MATRIX, CHAIN, [[1, 1], [1, 1]], [[1, 1, 1], [1, 1, 1], [1, 1, 1]])


class WordTests(SimpleTestCase):
    def test_parse_digits_and_spaced_letters(self):
        self.assertEqual(Word.parse("1212").letters, (1, 2, 1, 2))
        self.assertEqual(Word.parse("10 2 11").letters, (10, 2, 11))
        self.assertEqual(Word.parse("").letters, ())

    def test_parse_rejects_garbage(self):
        with self.assertRaises(InputError):
            Word.parse("12x")

    def test_n_is_length_minus_one(self):
        w = Word.parse("12221")
        self.assertEqual(w.n, 4)
        self.assertEqual(len(w), 5)

    def test_slicing_and_concatenation(self):
        w = Word.parse("1221")
        self.assertEqual(w[1:].letters, (2, 2, 1))
        self.assertEqual((w + (1, 2)).letters, (1, 2, 2, 1, 1, 2))
        self.assertEqual(w[0], 1)

    def test_format_switches_to_spaces_for_big_alphabets(self):
        self.assertEqual(Word((1, 2)).format(), "12")
        self.assertEqual(Word((1, 2)).format(16), "1 2")
        self.assertEqual(Word((12, 3)).format(), "12 3")


class TransitionSystemTests(SimpleTestCase):
    def test_full_shift(self):
        ts = TransitionSystem.full_shift(3)
        self.assertEqual(ts.successors[2], (1, 2, 3))
        self.assertFalse(any(ts.is_degenerate(i) for i in ts.letters))

    def test_golden_mean_letter_two_is_degenerate(self):
        ts = golden()
        cls = classify_letters(ts)
        self.assertEqual(cls.degenerate_letters, (2,))
        self.assertEqual(ts.predecessors[2], (1,))

    def test_rejects_bad_matrices(self):
        for matrix in (
            [[1]],                                  # one letter
            [[0, 0], [1, 1]],                       # empty row
            [[0, 1], [1, 0]],                       # every letter degenerate
            [[0, 1, 0], [1, 0, 0], [1, 1, 1]],      # degenerate-only cycle 1 -> 2 -> 1
            [[1, 1], [1, 1], [1, 1]],               # not square
        ):
            with self.subTest(matrix=matrix), self.assertRaises(InputError):
                TransitionSystem.from_matrix(matrix)

    def test_json_shape(self):
        self.assertEqual(golden().to_json(), {"s": 2, "matrix": [[1, 1], [1, 0]]})
        self.assertEqual(TransitionSystem.from_json({"s": 2, "matrix": [[1, 1], [1, 0]]}), golden())

    def test_valid_words(self):
        ts = golden()
        self.assertTrue(is_valid_word(ts, "12112"))
        self.assertFalse(is_valid_word(ts, "1221"))
        with self.assertRaises(InputError):
            is_valid_word(ts, "13")


class EnumerationTests(SimpleTestCase):
    def test_golden_mean_counts_are_fibonacci(self):
        ts = golden()
        self.assertEqual([count_words(ts, n) for n in range(6)], [2, 3, 5, 8, 13, 21])

    def test_counts_with_prefix(self):
        ts = golden()
        self.assertEqual(count_words(ts, 2, Word.parse("12")), 1)
        self.assertEqual(count_words(ts, 2, Word.parse("11")), 2)
        self.assertEqual(count_words(ts, 0, Word.parse("11")), 0)

    def test_enumeration_is_lexicographic(self):
        words = [w.format() for w in enumerate_words(golden(), 2)]
        self.assertEqual(words, ["111", "112", "121", "211", "212"])

    def test_extensions(self):
        self.assertEqual([w.format() for w in extensions(golden(), "12", 2)], ["1211", "1212"])

    @override_settings(SYMDYN_ENUMERATION_CAP=10)
    def test_enumeration_cap(self):
        with self.assertRaises(ResourceError):
            enumerate_words(TransitionSystem.full_shift(2), 5)
        # streaming is not capped
        self.assertEqual(sum(1 for _ in iter_words(TransitionSystem.full_shift(2), 5)), 64)

    @hyp_settings(max_examples=30, deadline=None)
    @given(s=st.integers(2, 4), n=st.integers(0, 5))
    def test_full_shift_counts(self, s, n):
        ts = TransitionSystem.full_shift(s)
        words = list(iter_words(ts, n))
        self.assertEqual(len(words), s ** (n + 1))
        self.assertEqual(count_words(ts, n), len(words))
        self.assertEqual(words, sorted(words))


class BlockTests(SimpleTestCase):
    def test_segment_kinds(self):
        ts = golden()
        self.assertEqual(segment_kind(ts, "21"), BLOCK)
        self.assertEqual(segment_kind(ts, "12"), REVERSE_BLOCK)
        self.assertEqual(segment_kind(ts, "212"), GENERAL_BLOCK)
        self.assertEqual(segment_kind(ts, "11"), DOUBLE_GENERAL_BLOCK)
        self.assertEqual(segment_kind(ts, "2"), OPEN)
        self.assertIsNone(segment_kind(ts, "111"))

    def test_decomposition_ends_every_block_at_a_nondegenerate_letter(self):
        dec = block_decompose(golden(), "12112")
        self.assertEqual(dec.nondegenerate_positions, (0, 2, 3))
        self.assertEqual([(g.start, g.end, g.kind) for g in dec.segments],
                         [(0, 0, BLOCK), (1, 2, BLOCK), (3, 3, BLOCK), (4, 4, OPEN)])

    def test_maximal_general_blocks(self):
        dec = block_decompose(golden(), "12112")
        general = [(g.start, g.end) for g in dec.of_kind(GENERAL_BLOCK)]
        self.assertIn((1, 2), general)
        self.assertIn((3, 4), general)
        double = [(g.start, g.end) for g in dec.of_kind(DOUBLE_GENERAL_BLOCK)]
        self.assertIn((1, 4), double)

    def test_max_block_length_and_forced_run(self):
        ts = golden()
        self.assertEqual(max_block_length(ts), 2)
        self.assertEqual(forced_run(ts, 2), (1,))
        self.assertEqual(forced_run(ts, 1), ())
        self.assertEqual(max_block_length(TransitionSystem.full_shift(3)), 1)


class StringCombinatoricsTests(SimpleTestCase):
    """Exhaustive checks over every word up to length 2s + 2."""

    def _words(self, ts):
        for n in range(2 * ts.size + 2):
            yield from iter_words(ts, n)

    def test_degenerate_runs_never_repeat_a_letter(self):
        for matrix in MATRICES:
            ts = TransitionSystem.from_matrix(matrix)
            for w in self._words(ts):
                if all(ts.is_degenerate(x) for x in w):
                    with self.subTest(matrix=matrix, word=w):
                        self.assertEqual(len(set(w)), len(w))

    def test_block_lengths_are_bounded_by_the_alphabet(self):
        for matrix in MATRICES:
            ts = TransitionSystem.from_matrix(matrix)
            s = ts.size
            self.assertLessEqual(max_block_length(ts), s)
            for w in self._words(ts):
                with self.subTest(matrix=matrix, word=w):
                    if is_general_block(ts, w):
                        self.assertLessEqual(len(w), 2 * s - 1)
                    if is_double_general_block(ts, w):
                        self.assertLessEqual(len(w), 2 * s)
                    if segment_kind(ts, w) == BLOCK:
                        self.assertLessEqual(len(w), max_block_length(ts))

    def test_chain_reaches_the_bounds(self):
        ts = TransitionSystem.from_matrix(CHAIN)
        self.assertEqual(max_block_length(ts), 3)
        self.assertEqual(forced_run(ts, 1), (2, 3))
        self.assertTrue(is_general_block(ts, "123"))
        self.assertEqual(segment_kind(ts, "123"), BLOCK)

    def test_counts_match_matrix_powers(self):
        for matrix in MATRICES:
            ts = TransitionSystem.from_matrix(matrix)
            A = np.array(matrix, dtype=np.int64)
            ones = np.ones(len(matrix), dtype=np.int64)
            for n in range(13):
                with self.subTest(matrix=matrix, n=n):
                    expected = int(ones @ np.linalg.matrix_power(A, n) @ ones)
                    self.assertEqual(count_words(ts, n), expected)
