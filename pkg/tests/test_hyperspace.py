import random
from fractions import Fraction as F

import pytest

from fiberdist.core import validate_space
from fiberdist.extension import extend_generic
from fiberdist.hyperspace import (
    FiberCapExceeded,
    HyperspaceFunctor,
    Subset,
    SubsetCoupling,
    fiber_subsets,
    hausdorff,
    optimal_coupling,
    sup_lift,
)
from fiberdist.sampling import random_metric_space


def two_point(d=F(5)):
    return validate_space(["x", "y"], [[F(0), d], [d, F(0)]], "metric")


def all_subsets(n):
    out = []
    for mask in range(1, 1 << n):
        out.append(Subset(tuple(i for i in range(n) if mask >> i & 1)))
    return out


class TestSupLift:
    def test_zero_function(self):
        c = SubsetCoupling(((0, 0), (0, 1)))
        assert sup_lift(lambda p: F(0), c.pairs) == 0

    def test_max_over_pair_values(self):
        sp = two_point()
        t = sp.pair_table()
        c = SubsetCoupling(((0, 0), (0, 1)))
        assert sup_lift(t, c.pairs) == F(5)

    def test_singleton(self):
        sp = two_point(F(7, 2))
        t = sp.pair_table()
        assert sup_lift(t, (((0, 1)),)) == F(7, 2)


class TestHausdorff:
    def test_equal_sets(self):
        sp = two_point()
        t = sp.pair_table()
        a = Subset((0, 1))
        assert hausdorff(t, a, a) == 0

    def test_singleton_vs_pair(self):
        sp = two_point()
        t = sp.pair_table()
        assert hausdorff(t, Subset((0,)), Subset((0, 1))) == F(5)

    def test_extends_base_distance(self):
        sp = two_point(F(9, 4))
        t = sp.pair_table()
        assert hausdorff(t, Subset((0,)), Subset((1,))) == F(9, 4)


class TestOptimalCoupling:
    def test_diagonal_on_equal_sets(self):
        sp = two_point()
        t = sp.pair_table()
        a = Subset((0, 1))
        c = optimal_coupling(t, a, a)
        assert (0, 0) in c.pairs and (1, 1) in c.pairs
        assert sup_lift(t, c.pairs) == 0

    def test_singleton_against_pair(self):
        sp = two_point()
        t = sp.pair_table()
        c = optimal_coupling(t, Subset((0,)), Subset((0, 1)))
        assert c.pairs == ((0, 0), (0, 1))
        assert sup_lift(t, c.pairs) == F(5)

    def test_matches_fiber_minimum_exhaustively(self):
        rng = random.Random(5)
        for _ in range(6):
            sp = random_metric_space(rng, 3)
            t = sp.pair_table()
            for a in all_subsets(3):
                for b in all_subsets(3):
                    c = optimal_coupling(t, a, b)
                    assert {x for x, _ in c.pairs} == set(a.members)
                    assert {y for _, y in c.pairs} == set(b.members)
                    direct = sup_lift(t, c.pairs)
                    assert direct == hausdorff(t, a, b)
                    oracle = min(sup_lift(t, c2.pairs) for c2 in fiber_subsets(a, b))
                    assert direct == oracle


class TestFiberSubsets:
    def test_forced_singleton(self):
        assert [c.pairs for c in fiber_subsets(Subset((0,)), Subset((1,)))] == [((0, 1),)]

    def test_first_marginal_forces_pairing(self):
        couplings = list(fiber_subsets(Subset((0,)), Subset((0, 1))))
        assert len(couplings) == 1
        assert couplings[0].pairs == ((0, 0), (0, 1))

    def test_two_by_two_count(self):
        # Subsets of a 2x2 grid with both rows and both columns covered.
        couplings = list(fiber_subsets(Subset((0, 1)), Subset((0, 1))))
        assert len(couplings) == 7

    def test_cap(self):
        big = Subset(tuple(range(5)))
        with pytest.raises(FiberCapExceeded):
            list(fiber_subsets(big, Subset(tuple(range(4)))))

    def test_marginals_always_full(self):
        a, b = Subset((0, 2)), Subset((1, 2))
        for c in fiber_subsets(a, b):
            assert {x for x, _ in c.pairs} == set(a.members)
            assert {y for _, y in c.pairs} == set(b.members)


class TestCoincidence:
    def test_hausdorff_equals_generic_minimum(self):
        functor = HyperspaceFunctor()
        rng = random.Random(17)
        for _ in range(4):
            sp = random_metric_space(rng, 3, den_max=4)
            t = sp.pair_table()
            for a in all_subsets(3):
                for b in all_subsets(3):
                    got = extend_generic(functor, sp, t, a, b)
                    assert got.value == hausdorff(t, a, b)
                    assert functor.lift(t, got.witness) == got.value

    def test_metric_axioms_exhaustive(self):
        rng = random.Random(23)
        sp = random_metric_space(rng, 3)
        t = sp.pair_table()
        subsets = all_subsets(3)
        for a in subsets:
            assert hausdorff(t, a, a) == 0
            for b in subsets:
                assert hausdorff(t, a, b) == hausdorff(t, b, a)
                if a != b:
                    assert hausdorff(t, a, b) > 0  # metric mode separates subsets
                for c in subsets:
                    assert hausdorff(t, a, c) <= hausdorff(t, a, b) + hausdorff(t, b, c)


class TestOperatorShape:
    def test_monotone_and_semiadditive_sampled(self):
        rng = random.Random(31)
        for _ in range(50):
            n = 4
            phi = [F(rng.randint(0, 12), rng.randint(1, 4)) for _ in range(n)]
            psi = [min(p, F(rng.randint(0, 12), rng.randint(1, 4))) for p in phi]
            members = tuple(sorted(rng.sample(range(n), rng.randint(1, n))))
            sup_phi = max(phi[i] for i in members)
            sup_psi = max(psi[i] for i in members)
            assert sup_phi >= sup_psi
            sup_sum = max(phi[i] + psi[i] for i in members)
            assert sup_sum <= sup_phi + sup_psi
