# symdyn/tests/test_oracle.py
from __future__ import annotations

import math
from fractions import Fraction as F

from django.test import SimpleTestCase
from hypothesis import given, settings as hyp_settings, strategies as st

from symdyn.dynamics import certified
from symdyn.dynamics.errors import InputError, UnsupportedError
from symdyn.dynamics.oracle import (
    AvoidanceAutomaton,
    avoiding_counts,
    count_avoiding,
    perron_enclosure,
    spectral_dimension,
)
from symdyn.dynamics.sft import TransitionSystem, iter_words

from .fixtures import dyadic, golden, skewed

PHI = (1 + math.sqrt(5)) / 2


class AutomatonTests(SimpleTestCase):
    def test_feed_reports_death(self):
        auto = AvoidanceAutomaton.build(golden(), ["11"])
        self.assertIsNone(auto.feed("1211"))
        self.assertIsNotNone(auto.feed("12121"))
        with self.assertRaises(InputError):
            auto.feed("1221")

    def test_shortest_death(self):
        auto = AvoidanceAutomaton.build(TransitionSystem.full_shift(2), ["11"])
        state = auto.feed("12")
        self.assertEqual(auto.shortest_death(state, 2), (1, 1))
        self.assertIsNone(auto.shortest_death(state, 1))
        self.assertIsNone(auto.shortest_death(state, 0))

    def test_empty_target(self):
        with self.assertRaises(InputError):
            AvoidanceAutomaton.build(golden(), [""])


class CountTests(SimpleTestCase):
    def test_fibonacci(self):
        self.assertEqual(avoiding_counts(TransitionSystem.full_shift(2), ["11"], 6), [2, 3, 5, 8, 13, 21, 34])

    def test_three_letters(self):
        self.assertEqual(avoiding_counts(TransitionSystem.full_shift(3), ["12"], 3), [3, 8, 21, 55])

    def test_golden_mean_avoiding_ones_alternates(self):
        self.assertEqual(avoiding_counts(golden(), ["11"], 5), [2] * 6)

    def test_invalid_target(self):
        with self.assertRaises(InputError):
            avoiding_counts(golden(), ["22"], 3)
        with self.assertRaises(InputError):
            count_avoiding(golden(), "11", -1)

    @hyp_settings(max_examples=25, deadline=None)
    @given(target=st.lists(st.integers(1, 2), min_size=1, max_size=4), n=st.integers(0, 7))
    def test_count_matches_filtering(self, target, n):
        ts = TransitionSystem.full_shift(2)
        t = tuple(target)
        expected = sum(
            1 for w in iter_words(ts, n)
            if not any(w[i:i + len(t)] == t for i in range(len(w) - len(t) + 1))
        )
        self.assertEqual(count_avoiding(ts, t, n), expected)


class SpectralTests(SimpleTestCase):
    def test_enclosure_brackets_the_golden_ratio(self):
        lo, hi, _ = perron_enclosure([[1, 1], [1, 0]])
        self.assertLessEqual(float(lo), PHI + 1e-12)
        self.assertGreaterEqual(float(hi), PHI - 1e-12)
        self.assertLess(hi - lo, F(1, 10 ** 8))

    def test_dimension_of_the_golden_mean_set(self):
        res = spectral_dimension(dyadic(), ["11"])
        self.assertAlmostEqual(res.dimension, math.log(PHI) / math.log(2), places=6)
        self.assertLessEqual(res.dimension_interval[0], res.dimension)
        self.assertLessEqual(res.dimension, res.dimension_interval[1])

    def test_avoiding_a_letter_leaves_a_point(self):
        res = spectral_dimension(dyadic(), ["1"])
        self.assertAlmostEqual(res.dimension, 0.0, places=9)
        self.assertEqual(res.components, 1)

    def test_needs_a_uniform_partition(self):
        with self.assertRaises(UnsupportedError):
            spectral_dimension(skewed(), ["11"])


class CertifiedTests(SimpleTestCase):
    def test_log_enclosure_contains_the_float_log(self):
        lo, hi = certified.log_enclosure(F(3))
        self.assertLessEqual(float(lo), math.log(3))
        self.assertGreaterEqual(float(hi), math.log(3))

    def test_log_of_non_positive(self):
        with self.assertRaises(ValueError):
            certified.log_enclosure(F(0))

    def test_ratio(self):
        lo, hi = certified.log_ratio(F(8), 2)
        self.assertLessEqual(float(lo), 3.0)
        self.assertGreaterEqual(float(hi), 3.0)
