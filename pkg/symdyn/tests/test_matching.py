# symdyn/tests/test_matching.py
from __future__ import annotations

import random

from django.test import SimpleTestCase
from hypothesis import assume, given, settings as hyp_settings, strategies as st

from symdyn.dynamics.errors import InputError
from symdyn.dynamics.matching import (
    PartialMatch,
    continuation_oracle,
    detect_exceptional,
    extension_is_safe,
    find_matches,
    find_partial_matches,
    no_matching_extend,
    non_extendable_witnesses,
    separation_violation,
    serial_extend,
    shortest_safe_extension,
)
from symdyn.dynamics.sft import DOUBLE_GENERAL_BLOCK, GENERAL_BLOCK, TransitionSystem, Word, iter_words

from .fixtures import GAMMA

FULL2 = TransitionSystem.full_shift(2)
ONES = "1" * 13
ONES_TWO = "1" * 12 + "2"
# letter 2 is degenerate and forced into 3
THREE_TS = TransitionSystem.from_matrix([[1, 1, 0], [0, 0, 1], [1, 1, 1]])


class MatchTests(SimpleTestCase):
    def test_matches_report_heads(self):
        self.assertEqual(find_matches("12", "1212"), [0, 2])
        self.assertEqual(find_matches("12", Word.parse("1212", start=5)), [5, 7])
        self.assertEqual(find_matches("22", "1212"), [])

    def test_partial_matches(self):
        self.assertEqual(find_partial_matches("211", "12221"), [PartialMatch(3, 2)])
        self.assertEqual(find_partial_matches("211", "122"), [PartialMatch(2, 1)])
        self.assertEqual(find_partial_matches("211", "111"), [])

    @hyp_settings(max_examples=50, deadline=None)
    @given(g=st.lists(st.integers(1, 2), min_size=1, max_size=4),
           a=st.lists(st.integers(1, 2), min_size=1, max_size=12))
    def test_matches_agree_with_slicing(self, g, a):
        expected = [i for i in range(len(a) - len(g) + 1) if a[i:i + len(g)] == g]
        self.assertEqual(find_matches(g, a), expected)


class ExceptionalTests(SimpleTestCase):
    def test_repeated_letter_then_other_letter_is_exceptional(self):
        form = detect_exceptional(FULL2, ONES_TWO)
        self.assertTrue(form.is_exceptional)
        self.assertEqual(form.repeated_block.letters, (1,))
        self.assertEqual(form.tail_kind, (DOUBLE_GENERAL_BLOCK, GENERAL_BLOCK))

    def test_constant_and_alternating_words_are_not(self):
        self.assertFalse(detect_exceptional(FULL2, ONES).is_exceptional)
        self.assertFalse(detect_exceptional(FULL2, "1212121212121").is_exceptional)
        self.assertFalse(detect_exceptional(FULL2, GAMMA).is_exceptional)

    def test_gamma_must_be_long_enough(self):
        with self.assertRaises(InputError):
            detect_exceptional(FULL2, "121212")


class NoMatchingTests(SimpleTestCase):
    def test_no_partial_match_takes_free_letters(self):
        pair = no_matching_extend(FULL2, GAMMA, ONES)
        self.assertEqual((pair.case, pair.b0.format(), pair.b1.format()), ("1", "1", "1"))
        self.assertEqual(pair.deflected, 0)

    def test_single_partial_match_is_deflected(self):
        pair = no_matching_extend(FULL2, GAMMA, ONES_TWO)
        self.assertEqual((pair.case, pair.b0.format(), pair.b1.format()), ("2", "2", "1"))
        self.assertEqual(pair.deflected, 1)
        self.assertTrue(extension_is_safe(GAMMA, ONES_TWO, pair.word))

    def test_extension_passes_both_oracles(self):
        for alpha in (ONES, ONES_TWO, "1212121212122"):
            pair = no_matching_extend(FULL2, GAMMA, alpha)
            for method in ("automaton", "enumerate"):
                with self.subTest(alpha=alpha, method=method):
                    rep = continuation_oracle(FULL2, [GAMMA], alpha, pair.word, method=method)
                    self.assertTrue(rep.passed, rep.counterexample)
                    self.assertLessEqual(len(pair), 2 * FULL2.size)

    def test_preconditions(self):
        with self.assertRaises(InputError):
            no_matching_extend(FULL2, GAMMA, "111")                  # alpha shorter than gamma
        with self.assertRaises(InputError):
            no_matching_extend(FULL2, ONES_TWO, "2" * 13)            # exceptional gamma
        with self.assertRaises(InputError):
            no_matching_extend(FULL2, GAMMA, "1" + GAMMA)            # gamma already matches

    def test_unsafe_extension_is_caught_by_the_oracle(self):
        rep = continuation_oracle(FULL2, [GAMMA], ONES_TWO, (), method="enumerate")
        self.assertFalse(rep.passed)
        self.assertEqual(rep.gamma.format(), GAMMA)
        self.assertFalse(continuation_oracle(FULL2, [GAMMA], ONES_TWO).passed)

    def test_oracle_enumerates_every_continuation(self):
        rep = continuation_oracle(FULL2, [GAMMA], ONES, "11", method="enumerate")
        self.assertTrue(rep.passed)
        self.assertEqual(rep.continuations, 2 ** 10)

    def test_safe_extension_rejects_long_tails(self):
        self.assertFalse(extension_is_safe(GAMMA, ONES, "1" * 13))

    def test_no_witnesses_for_extendable_words(self):
        self.assertIsNone(non_extendable_witnesses(FULL2, GAMMA, ONES))

    def test_every_pair_fails_for_the_exceptional_word(self):
        witnesses = non_extendable_witnesses(FULL2, ONES_TWO, ONES)
        self.assertIsNotNone(witnesses)
        # b0 and b1 each range over the 2 + 4 words of length 1 and 2
        self.assertEqual(len(witnesses), 36)
        self.assertIn("1|1", witnesses)
        self.assertIn("22|22", witnesses)

    def test_short_partial_matches_off_the_period_are_deflected(self):
        gamma, alpha = "1112111122111", "2222211121111"
        self.assertEqual([p.head for p in find_partial_matches(gamma, alpha)], [5, 10, 11, 12])
        pair = no_matching_extend(FULL2, gamma, alpha)
        self.assertEqual((pair.case, pair.b0.format(), pair.b1.format()), ("3B", "1", "11"))
        self.assertEqual(pair.deflected, 3)
        self.assertTrue(extension_is_safe(gamma, alpha, pair.word))
        # a single letter after the period break leaves a short head alive
        for tail in ("11", "12", "21", "22"):
            with self.subTest(tail=tail):
                self.assertFalse(extension_is_safe(gamma, alpha, tail))
        self.assertTrue(continuation_oracle(FULL2, [gamma], alpha, pair.word).passed)

    def test_periodic_heads_take_one_letter(self):
        alpha = "2222" + "12" * 4 + "1"
        pair = no_matching_extend(FULL2, "1212121212121", alpha)
        self.assertEqual(pair.case, "3B")
        self.assertEqual(pair.b0.format(), "1")
        self.assertEqual(pair.deflected, 1)


class SerialExtensionTests(SimpleTestCase):
    def test_single_target_uses_the_pair(self):
        ext = serial_extend(FULL2, [GAMMA], ONES_TWO)
        self.assertEqual(ext.extension.format(), "21")
        self.assertEqual(ext.pieces[0][0], 0)

    def test_targets_must_share_a_length(self):
        with self.assertRaises(InputError):
            serial_extend(FULL2, [GAMMA, GAMMA + "1"], ONES)

    def test_targets_must_be_long_enough_for_their_number(self):
        with self.assertRaises(InputError):
            serial_extend(FULL2, ["121", "212"], "1111")

    def test_separation(self):
        g = Word.parse(GAMMA).letters
        self.assertEqual(separation_violation(g, g, 2), 0)
        self.assertIsNone(separation_violation(g, Word.parse("2" * 13).letters, 2))
        # a shift of one lines gamma's run of ones up with the constant word
        self.assertEqual(separation_violation(g, Word.parse("1" * 13).letters, 2), 1)

    def test_shortest_safe_extension(self):
        self.assertEqual(shortest_safe_extension(FULL2, [GAMMA], ONES, 4).letters, ())
        self.assertEqual(shortest_safe_extension(FULL2, [GAMMA], ONES_TWO, 4).letters, (2,))


class NoMatchingSweepTests(SimpleTestCase):
    def _check(self, ts, gamma, alpha):
        pair = no_matching_extend(ts, gamma, alpha)
        self.assertLessEqual(len(pair.b0), ts.size)
        self.assertLessEqual(len(pair.b1), ts.size)
        self.assertLessEqual(pair.deflected, 2 * ts.size)
        self.assertTrue(extension_is_safe(gamma, alpha, pair.word))
        rep = continuation_oracle(ts, [gamma], alpha, pair.word)
        self.assertTrue(rep.passed, rep.counterexample)

    def test_every_twelve_string_on_two_letters(self):
        rng = random.Random(20240613)
        checked = 0
        for g in iter_words(FULL2, 12):
            if detect_exceptional(FULL2, g).is_exceptional:
                continue
            prefix = tuple(rng.choice((1, 2)) for _ in range(rng.randint(13, 16)))
            alpha = prefix + g[:rng.randint(0, 12)]
            if find_matches(g, alpha):
                continue
            with self.subTest(gamma=Word(g).format(), alpha=Word(alpha).format()):
                self._check(FULL2, g, alpha)
            checked += 1
        self.assertGreater(checked, 7000)

    @hyp_settings(max_examples=60, deadline=None)
    @given(start=st.integers(1, 3),
           steps=st.lists(st.integers(0, 2), min_size=20, max_size=20),
           lead=st.integers(1, 3),
           prefix_steps=st.lists(st.integers(0, 2), min_size=20, max_size=24),
           keep=st.integers(0, 20))
    def test_degenerate_alphabet(self, start, steps, lead, prefix_steps, keep):
        gamma = _walk(THREE_TS, start, steps)
        assume(gamma[19] != 2)
        assume(not detect_exceptional(THREE_TS, gamma).is_exceptional)
        prefix = _walk(THREE_TS, lead, prefix_steps)
        # every letter reaches 3, and 3 reaches everything
        bridge = {1: (2, 3), 2: (3,), 3: ()}[prefix[-1]]
        alpha = prefix + bridge + gamma[:keep]
        assume(not find_matches(gamma, alpha))
        self._check(THREE_TS, gamma, alpha)


def _walk(ts, first, choices):
    out = [first]
    for c in choices:
        succ = ts.successors[out[-1]]
        out.append(succ[c % len(succ)])
    return tuple(out)
