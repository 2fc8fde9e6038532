# symdyn/tests/test_treelike.py
from __future__ import annotations

import random
from fractions import Fraction as F

from django.test import SimpleTestCase

from symdyn.dynamics.errors import CollectionDeathError, InputError
from symdyn.dynamics.matching import detect_exceptional
from symdyn.dynamics.oracle import spectral_dimension
from symdyn.dynamics.sft import iter_words
from symdyn.dynamics.treelike import (
    TSENG,
    URBANSKI,
    build_levels,
    certify_avoidance,
    certify_corrected_density,
    closed_form_bound,
    corrected_density_floor,
    density_and_delta,
    element_density,
    geometric_member,
    hd_lower_bound,
    structure_report,
)

from .fixtures import dyadic


class BuildTests(SimpleTestCase):
    def setUp(self):
        self.p = dyadic()

    def test_membership_is_avoidance(self):
        tc = build_levels(self.p, ["211"], 2, 3, first_letter=1, explicit=True)
        self.assertTrue(tc.contains(2, "12221"))
        self.assertFalse(tc.contains(3, "1222111"))
        self.assertFalse(tc.contains(2, "22221"))        # wrong first letter
        self.assertFalse(tc.contains(2, "1222"))         # wrong length
        self.assertEqual(tc.counts[0], 3)                # 111, 112, 121 avoid 211

    def test_explicit_and_compressed_agree(self):
        for variant in (TSENG, URBANSKI):
            with self.subTest(variant=variant):
                a = build_levels(self.p, ["211"], 2, 4, variant, explicit=True)
                b = build_levels(self.p, ["211"], 2, 4, variant, explicit=False)
                self.assertFalse(a.compressed)
                self.assertTrue(b.compressed)
                self.assertEqual(a.counts, b.counts)
                self.assertEqual(a.diams, b.diams)
                self.assertEqual(a.deltas, b.deltas)

    def test_symbolic_and_geometric_membership_agree(self):
        for variant in (TSENG, URBANSKI):
            tc = build_levels(self.p, ["211"], 2, 2, variant, explicit=True)
            for w in iter_words(self.p.ts, 4):
                with self.subTest(variant=variant, word=w):
                    self.assertEqual(geometric_member(self.p, w, ["211"], 2, variant), tc.contains(2, w))

    def test_element_density(self):
        tc = build_levels(self.p, ["211"], 2, 3, first_letter=1, explicit=True)
        self.assertEqual(element_density(tc, "12221"), F(1, 2))
        with self.assertRaises(InputError):
            element_density(tc, "12211")

    def test_structure_and_orbits(self):
        tc = build_levels(self.p, ["211"], 2, 3, explicit=True)
        self.assertEqual(structure_report(tc), {"decreasing": True, "below_expansion": True, "nested": True})
        self.assertTrue(certify_avoidance(tc, self.p))
        self.assertEqual(tc.diams, [F(1, 8), F(1, 32), F(1, 128)])

    def test_compressed_levels_have_no_words(self):
        tc = build_levels(self.p, ["211"], 2, 3, explicit=False)
        with self.assertRaises(InputError):
            tc.level_words(1)

    def test_bad_inputs(self):
        with self.assertRaises(InputError):
            build_levels(self.p, ["211"], 2, 3, variant="nearest")
        with self.assertRaises(InputError):
            build_levels(self.p, ["2111"], 2, 3)
        with self.assertRaises(InputError):
            build_levels(self.p, [], 2, 3)
        with self.assertRaises(InputError):
            build_levels(self.p, ["211"], 0, 3)


class BoundTests(SimpleTestCase):
    def setUp(self):
        self.p = dyadic()

    def test_aligned_blocks_keep_half_the_mass(self):
        tc = build_levels(self.p, ["11111"], 4, 9, URBANSKI)
        self.assertTrue(tc.compressed)
        self.assertEqual(tc.deltas, [F(15, 16)] * 8)
        bound = hd_lower_bound(tc, 8, density_floor=F(1, 2))
        self.assertAlmostEqual(float(bound), 1 - 8 / 33, places=9)
        self.assertLessEqual(bound, F(25, 33))
        self.assertLess(abs(float(bound) - closed_form_bound(URBANSKI, self.p, 4)), 0.01)

    def test_bound_without_floor_sits_above_the_floor_bound(self):
        tc = build_levels(self.p, ["11111"], 4, 9, URBANSKI)
        self.assertGreater(hd_lower_bound(tc, 8), F(25, 33))
        self.assertLess(hd_lower_bound(tc, 8), 1)

    def test_floor_above_a_density_is_rejected(self):
        tc = build_levels(self.p, ["11111"], 4, 3, URBANSKI)
        with self.assertRaises(InputError):
            hd_lower_bound(tc, 2, density_floor=F(31, 32))

    def test_k_beyond_the_built_levels(self):
        tc = build_levels(self.p, ["211"], 2, 3)
        with self.assertRaises(InputError):
            hd_lower_bound(tc, 3)

    def test_collection_death(self):
        tc = build_levels(self.p, ["11", "12", "21", "22"], 1, 3)
        self.assertEqual(tc.death_level, 1)
        self.assertEqual(tc.counts, [0, 0, 0])
        self.assertEqual(tc.deltas, [])
        with self.assertRaises(CollectionDeathError) as cm:
            hd_lower_bound(tc, 1)
        self.assertEqual(cm.exception.level, 1)
        with self.assertRaises(CollectionDeathError):
            density_and_delta(tc, 1)

    def test_density_report_names_its_witnesses(self):
        tc = build_levels(self.p, ["211"], 2, 3, explicit=True)
        rep = density_and_delta(tc, 1)
        self.assertEqual(rep.delta, min(rep.densities.values()))
        self.assertEqual(rep.delta, tc.deltas[0])
        self.assertTrue(rep.witnesses)

    def test_aligned_blocks_keep_half_the_mass_for_longer_blocks(self):
        for q in (4, 6, 8):
            for g in ("1" * (q + 1), ("12" * q)[:q + 1], "2" + "1" * q):
                with self.subTest(q=q, gamma=g):
                    tc = build_levels(self.p, [g], q, 8, URBANSKI)
                    self.assertEqual(tc.deltas, [1 - F(1, 2 ** q)] * 7)
                    self.assertTrue(all(d >= F(1, 2) for d in tc.deltas))
                    floor_bound = hd_lower_bound(tc, 7, density_floor=F(1, 2))
                    self.assertLessEqual(floor_bound, hd_lower_bound(tc, 7))


class CorrectedConstructionTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.p = dyadic()
        rng = random.Random(5)
        cls.gammas = []
        while len(cls.gammas) < 10:
            g = tuple(rng.choice((1, 2)) for _ in range(13))
            if g not in cls.gammas and not detect_exceptional(cls.p.ts, g).is_exceptional:
                cls.gammas.append(g)

    def test_bound_sits_between_the_floor_and_the_dimension(self):
        floor = corrected_density_floor(self.p)
        self.assertEqual(floor, F(1, 16))
        limit = closed_form_bound("corrected", self.p, 12)
        for g in self.gammas:
            tc = build_levels(self.p, [g], 12, 31)
            with self.subTest(gamma=g):
                self.assertEqual(len(tc.deltas), 30)
                self.assertTrue(all(d >= floor for d in tc.deltas))
                lower = hd_lower_bound(tc, 30, density_floor=floor)
                bound = hd_lower_bound(tc, 30)
                dim_hi = spectral_dimension(self.p, [g]).dimension_interval[1]
                self.assertLess(0, lower)
                self.assertLessEqual(lower, bound)
                self.assertLessEqual(float(bound), dim_hi + 1e-9)
                self.assertLess(abs(float(lower) - limit), 0.01)

    def test_serial_extensions_land_in_the_next_level(self):
        for g in self.gammas:
            tc = build_levels(self.p, [g], 12, 3)
            with self.subTest(gamma=g):
                self.assertEqual(certify_corrected_density(tc, 1, sample=6), [])
                self.assertEqual(certify_corrected_density(tc, 2, sample=6), [])

    def test_certificate_needs_a_next_level(self):
        tc = build_levels(self.p, [self.gammas[0]], 12, 2)
        with self.assertRaises(InputError):
            certify_corrected_density(tc, 2)
