import math

import pytest
from hypothesis import given, settings, strategies as st

from shiftgibbs import (Potential, ShapeTable, ValidationError, Word,
                        add_potentials, boundary_norm_bound, energy,
                        interaction, norms, phi_function, point_from_words)
from shiftgibbs.bundled import BINARY, SITE_FIELD, PAIR_COUPLING


def word(letters, start=0):
    return Word(BINARY, start, letters)


class TestEnergy:
    def test_zero(self, pot_zero):
        assert energy(pot_zero, word((0, 1, 1, 0))) == 0.0

    def test_single_site(self, pot_site):
        # two ones in 0110
        assert energy(pot_site, word((0, 1, 1, 0))) == pytest.approx(
            2 * SITE_FIELD, abs=1e-15)

    def test_pair_on_0011(self, pot_pair):
        # adjacent pairs 00, 01, 11: two equal
        assert energy(pot_pair, word((0, 0, 1, 1))) == pytest.approx(
            2 * PAIR_COUPLING, abs=1e-15)

    def test_translation_covariance(self, pot_pair):
        w = word((0, 0, 1, 0, 1), start=-2)
        for j in (-3, 0, 5):
            assert energy(pot_pair, w.shifted(j)) == energy(pot_pair, w)

    @settings(deadline=None, max_examples=60)
    @given(letters=st.lists(st.integers(0, 1), min_size=2, max_size=14),
           data=st.data())
    def test_additivity_with_interaction(self, pot_pair, pot_site, letters, data):
        pot = add_potentials(pot_pair, pot_site)
        w = word(tuple(letters))
        cut = data.draw(st.integers(0, len(letters) - 2))
        left = w.restrict(0, cut)
        right = w.restrict(cut + 1, len(letters) - 1)
        total = energy(pot, w)
        split = (energy(pot, left) + energy(pot, right)
                 + interaction(pot, (0, cut), [(cut + 1, len(letters) - 1)], w))
        assert total == pytest.approx(split, abs=1e-12)


class TestInteraction:
    def test_zero(self, pot_zero):
        w = word((0, 1, 0, 1, 0, 1, 0, 1, 0, 1))
        assert interaction(pot_zero, (0, 3), [(5, 9)], w) == 0.0

    def test_gap_beyond_range(self, pot_pair):
        w = word((0, 1, 0, 1, 0, 1, 0, 1, 0, 1))
        assert interaction(pot_pair, (0, 3), [(5, 9)], w) == 0.0

    def test_single_crossing_pair(self, pot_pair):
        w = word((0, 0, 1, 1, 0, 1, 1))
        # the only crossing translate is {2,3} with letters (1,1)
        assert interaction(pot_pair, (0, 2), [(3, 6)], w) == pytest.approx(
            PAIR_COUPLING, abs=1e-15)

    def test_disjointness_enforced(self, pot_pair):
        w = word((0, 0, 1, 1))
        with pytest.raises(ValidationError, match="not disjoint"):
            interaction(pot_pair, (0, 2), [(2, 3)], w)


class TestNorms:
    def test_zero(self, pot_zero):
        rep = norms(pot_zero)
        assert rep.norm == 0.0 and rep.cross_norm == 0.0

    def test_single_site(self, pot_site):
        rep = norms(pot_site)
        assert rep.norm == pytest.approx(SITE_FIELD)
        assert rep.cross_norm == 0.0

    def test_pair(self, pot_pair):
        rep = norms(pot_pair)
        assert rep.norm == pytest.approx(2 * PAIR_COUPLING)
        assert rep.cross_norm == 0.0

    def test_wide_shape_crossing(self):
        # shape {0,4}: the only translate disjoint from [-1,1] that meets
        # both (-inf,-2] and [2,inf) is {-2,2}
        c = 2.0
        pot = Potential(BINARY, 4, (ShapeTable((0, 4), {(1, 1): c}),))
        rep = norms(pot)
        assert rep.norm == pytest.approx(2 * c)
        assert rep.cross_norm == pytest.approx(c)
        assert rep.per_shape == (((0, 4), c),)


class TestPhiFunction:
    def test_zero(self, ev, pot_zero):
        pt = point_from_words(ev, (0,), (), (0,))
        assert phi_function(pot_zero, pt, 0) == 0.0

    def test_single_site_all_ones(self, full, pot_site):
        pt = point_from_words(full, (1,), (), (1,))
        assert phi_function(pot_site, pt, 3) == pytest.approx(SITE_FIELD)

    def test_pair_all_zeros(self, full, pot_pair):
        pt = point_from_words(full, (0,), (), (0,))
        # two translates through the origin, each weighted 1/2
        assert phi_function(pot_pair, pt, 0) == pytest.approx(PAIR_COUPLING)


class TestBoundaryBound:
    def test_zero(self, pot_zero):
        assert boundary_norm_bound(pot_zero, 5) == 0.0

    def test_single_site(self, pot_site):
        for m in range(0, 6):
            assert boundary_norm_bound(pot_site, m) == 0.0

    def test_pair_constant(self, pot_pair):
        for m in range(1, 8):
            assert boundary_norm_bound(pot_pair, m) == pytest.approx(
                2 * PAIR_COUPLING)

    def test_density_ratio_decays(self, pot_pair):
        r10 = boundary_norm_bound(pot_pair, 10) / 21
        r100 = boundary_norm_bound(pot_pair, 100) / 201
        assert r100 < r10

    def test_pairing_vs_energy_density(self, ev, gm, full, pot_pair, pot_site):
        from shiftgibbs import energy_density_gap, point_from_words
        points = [point_from_words(ev, (0,), (), (0,)),
                  point_from_words(ev, (1,), (0, 0, 1), (0,)),
                  point_from_words(gm, (0, 1), (), (0,)),
                  point_from_words(full, (1, 1, 0), (), (1,))]
        pot = add_potentials(pot_pair, pot_site)
        for pt in points:
            for m in range(0, 13):
                gap = energy_density_gap(pot, pt, m)
                assert gap <= boundary_norm_bound(pot, m) / (2 * m + 1) + 1e-13


class TestPotentialAlgebra:
    def test_add_scaled(self, pot_pair, pot_site):
        combined = add_potentials(pot_pair, pot_site, coeff=2.0)
        w = word((1, 1, 0, 1))
        assert energy(combined, w) == pytest.approx(
            energy(pot_pair, w) + 2.0 * energy(pot_site, w))

    def test_shape_validation(self):
        with pytest.raises(ValidationError):
            ShapeTable((1, 2), {(0, 0): 1.0})  # min offset must be 0
        with pytest.raises(ValidationError):
            Potential(BINARY, 0, (ShapeTable((0, 1), {(0, 0): 1.0}),))
