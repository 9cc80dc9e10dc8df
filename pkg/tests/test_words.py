import random
from fractions import Fraction as F

import pytest

from fiberdist.core import validate_space
from fiberdist.extension import EmptyFiberError
from fiberdist.sampling import random_metric_space, random_word
from fiberdist.words import (
    CapTooSmallError,
    PointedSpace,
    ProperRepresentationPair,
    WordsFunctor,
    abelian_distance,
    check_word_pseudometric_axioms,
    concat,
    enumerate_proper_representations,
    format_word,
    graev_distance,
    letter_sum_lift,
    naive_word_distance,
    parse_word,
    pointed_space,
    reduce_letters,
)


def wide_space():
    # e far away from x, y; basepoint padding is never worth it.
    return validate_space(
        ["e", "x", "y"],
        [[F(0), F(10), F(10)], [F(10), F(0), F(1)], [F(10), F(1), F(0)]],
        "metric",
    )


@pytest.fixture
def ctx():
    return pointed_space(wide_space(), "e")


def word(ctx, pairs, commutative=False):
    return reduce_letters(pairs, commutative, ctx)


class TestReduce:
    def test_inverse_pair_cancels(self, ctx):
        assert word(ctx, [(1, 1), (1, -1)]).letters == ()

    def test_basepoint_letters_vanish(self, ctx):
        assert word(ctx, [(1, 1), (0, 1), (2, 1)]).letters == ((1, 1), (2, 1))

    def test_commutative_cancellation_at_distance(self, ctx):
        w = word(ctx, [(1, 1), (2, 1), (1, -1)], commutative=True)
        assert w.letters == ((2, 1),)

    def test_free_keeps_order(self, ctx):
        w = word(ctx, [(2, 1), (1, 1)])
        assert w.letters == ((2, 1), (1, 1))

    def test_confluence_against_random_rewrites(self, ctx):
        # Apply basepoint deletions and inverse cancellations in random
        # order; the fixed point must match the canonical reduction.
        rng = random.Random(4)
        for _ in range(500):
            letters = [(rng.randrange(3), rng.choice((1, -1))) for _ in range(rng.randint(0, 8))]
            work = list(letters)
            while True:
                moves = []
                for idx, (x, _s) in enumerate(work):
                    if x == 0:
                        moves.append(("drop", idx))
                for idx in range(len(work) - 1):
                    x, s = work[idx]
                    if work[idx + 1] == (x, -s):
                        moves.append(("cancel", idx))
                if not moves:
                    break
                kind, idx = rng.choice(moves)
                if kind == "drop":
                    del work[idx]
                else:
                    del work[idx : idx + 2]
            assert tuple(work) == word(ctx, letters).letters

    def test_inverse_and_concat(self, ctx):
        w = word(ctx, [(1, 1), (2, -1)])
        assert concat(w, w.inverse(), ctx).letters == ()


class TestWordSyntax:
    def test_parse_and_format(self, ctx):
        w = parse_word(["x", "y^-1", "x"], ctx, commutative=False)
        assert w.letters == ((1, 1), (2, -1), (1, 1))
        assert format_word(w, ctx) == ["x", "y^-1", "x"]

    def test_parse_reduces(self, ctx):
        assert parse_word(["x", "e", "y"], ctx, commutative=False).letters == ((1, 1), (2, 1))

    def test_bad_exponent(self, ctx):
        from fiberdist.core import ParseError

        with pytest.raises(ParseError):
            parse_word(["x^2"], ctx, commutative=False)


class TestLetterSumLift:
    def test_empty_word(self):
        assert letter_sum_lift(lambda k: F(1), [], "graev") == 0

    def test_repeated_letter(self, ctx):
        phi = {1: F(3)}
        w = word(ctx, [(1, 1), (1, 1)])
        keys = [x for x, _ in w.letters]
        assert letter_sum_lift(lambda k: phi[k], keys, "graev") == F(6)
        assert letter_sum_lift(lambda k: phi[k], keys, "swierczkowski") == F(3)

    def test_distinct_pair_rule(self, ctx):
        t = ctx.space.pair_table()
        rep = ProperRepresentationPair(((1, 2, 1), (1, 2, 1)))
        keys = [(a, b) for a, b, _s in rep.rows]
        assert letter_sum_lift(t, keys, "graev") == F(2)
        assert letter_sum_lift(t, keys, "swierczkowski") == F(1)


class TestEnumerateRepresentations:
    def test_single_letter_diagonal(self, ctx):
        a = word(ctx, [(1, 1)])
        reps = list(enumerate_proper_representations(a, a, ctx, 1))
        assert ProperRepresentationPair(((1, 1, 1),)) in reps

    def test_sides_always_reduce_to_targets(self, ctx):
        rng = random.Random(12)
        functor = WordsFunctor("graev")
        for _ in range(8):
            a = random_word(rng, ctx, 2)
            b = random_word(rng, ctx, 2)
            for rep in enumerate_proper_representations(a, b, ctx, len(a) + len(b) + 1):
                left, right = functor.marginals(rep, ctx)
                assert left == a
                assert right == b

    def test_includes_basepoint_paddings(self, ctx):
        a = word(ctx, [(1, 1), (1, 1)])
        b = word(ctx, [(2, 1), (2, 1)])
        reps = list(enumerate_proper_representations(a, b, ctx, 4))
        assert ProperRepresentationPair(((1, 2, 1), (1, 2, 1))) in reps
        assert any(len(rep.rows) == 3 for rep in reps)  # odd-length paddings exist
        assert any(
            (0, 0, 1) in rep.rows or (0, 0, -1) in rep.rows for rep in reps if len(rep.rows) == 3
        )

    def test_count_matches_naive_filter(self, ctx):
        rng = random.Random(18)
        for _ in range(5):
            a = random_word(rng, ctx, 1)
            b = random_word(rng, ctx, 1)
            cap = max(len(a), len(b)) + 2
            stream = list(enumerate_proper_representations(a, b, ctx, cap))
            assert len(stream) == len(set(stream))
            _, count = naive_word_distance(a, b, ctx, "graev", cap)
            assert len(stream) == count

    def test_cap_too_small(self, ctx):
        a = word(ctx, [(1, 1), (2, 1)])
        with pytest.raises(CapTooSmallError):
            list(enumerate_proper_representations(a, a, ctx, 1))


class TestDistances:
    def test_equal_words(self, ctx):
        a = word(ctx, [(1, 1), (2, -1)])
        r = graev_distance(a, a, ctx)
        assert r.value == 0
        assert not r.cap_limited

    def test_single_letters_extend_base_distance(self, ctx):
        a, b = word(ctx, [(1, 1)]), word(ctx, [(2, 1)])
        for variant in ("graev", "swierczkowski"):
            assert graev_distance(a, b, ctx, variant).value == F(1)

    def test_squared_letters_both_variants(self, ctx):
        a = word(ctx, [(1, 1), (1, 1)])
        b = word(ctx, [(2, 1), (2, 1)])
        r1 = graev_distance(a, b, ctx, "graev", 6)
        r2 = graev_distance(a, b, ctx, "swierczkowski", 6)
        assert r1.value == F(2)
        assert r2.value == F(1)
        assert r1.cap_limited and r2.cap_limited

    def test_witness_reevaluates_to_value(self, ctx):
        rng = random.Random(44)
        t = ctx.space.pair_table()
        for _ in range(10):
            a = random_word(rng, ctx, 2)
            b = random_word(rng, ctx, 2)
            for variant in ("graev", "swierczkowski"):
                r = graev_distance(a, b, ctx, variant)
                keys = [(x, y) for x, y, _s in r.witness.rows]
                assert letter_sum_lift(t, keys, variant) == r.value
                functor = WordsFunctor(variant)
                left, right = functor.marginals(r.witness, ctx)
                assert (left, right) == (a, b)

    def test_graev_dominates_swierczkowski(self, ctx):
        rng = random.Random(29)
        for _ in range(25):
            a = random_word(rng, ctx, 2)
            b = random_word(rng, ctx, 2)
            cap = len(a) + len(b) + 2
            d1 = graev_distance(a, b, ctx, "graev", cap).value
            d2 = graev_distance(a, b, ctx, "swierczkowski", cap).value
            assert d1 >= d2

    def test_agrees_with_naive_oracle(self, ctx):
        rng = random.Random(31)
        for _ in range(15):
            a = random_word(rng, ctx, 1)
            b = random_word(rng, ctx, 2)
            cap = len(a) + len(b) + 1
            for variant in ("graev", "swierczkowski"):
                searched = graev_distance(a, b, ctx, variant, cap).value
                naive, _ = naive_word_distance(a, b, ctx, variant, cap)
                assert searched == naive

    def test_empty_fiber_within_forced_cap(self, ctx):
        # x vs y^-1 admits no representation of length 1: the shared sign
        # cannot produce both a positive and a negative reduced letter.
        a, b = word(ctx, [(1, 1)]), word(ctx, [(2, -1)])
        with pytest.raises(EmptyFiberError):
            graev_distance(a, b, ctx, cap=1)
        assert graev_distance(a, b, ctx, cap=2).value == F(20)

    def test_mixed_flag_rejected(self, ctx):
        a = word(ctx, [(1, 1)])
        b = word(ctx, [(1, 1)], commutative=True)
        with pytest.raises(ValueError):
            graev_distance(a, b, ctx)
        with pytest.raises(ValueError):
            abelian_distance(a, b, ctx)


class TestAbelian:
    def test_commuted_words_coincide(self, ctx):
        a = word(ctx, [(1, 1), (2, 1)], commutative=True)
        b = word(ctx, [(2, 1), (1, 1)], commutative=True)
        assert a == b
        assert abelian_distance(a, b, ctx).value == 0

    def test_single_letters(self, ctx):
        a = word(ctx, [(1, 1)], commutative=True)
        b = word(ctx, [(2, 1)], commutative=True)
        assert abelian_distance(a, b, ctx).value == F(1)

    def test_squared_letters(self, ctx):
        a = word(ctx, [(1, 1), (1, 1)], commutative=True)
        b = word(ctx, [(2, 1), (2, 1)], commutative=True)
        assert abelian_distance(a, b, ctx, "graev", 6).value == F(2)

    def test_agrees_with_naive_oracle(self, ctx):
        rng = random.Random(37)
        for _ in range(10):
            a = random_word(rng, ctx, 1, commutative=True)
            b = random_word(rng, ctx, 1, commutative=True)
            cap = len(a) + len(b) + 1
            for variant in ("graev", "swierczkowski"):
                searched = abelian_distance(a, b, ctx, variant, cap).value
                naive, _ = naive_word_distance(a, b, ctx, variant, cap)
                assert searched == naive

    def test_abelian_at_most_free(self, ctx):
        # Extra cancellations can only shrink the minimum.
        rng = random.Random(41)
        for _ in range(10):
            letters_a = [(rng.randrange(3), rng.choice((1, -1))) for _ in range(2)]
            letters_b = [(rng.randrange(3), rng.choice((1, -1))) for _ in range(2)]
            fa, fb = word(ctx, letters_a), word(ctx, letters_b)
            ca = word(ctx, letters_a, commutative=True)
            cb = word(ctx, letters_b, commutative=True)
            cap = max(len(fa) + len(fb), len(ca) + len(cb)) + 2
            free = graev_distance(fa, fb, ctx, "graev", cap).value
            abelian = abelian_distance(ca, cb, ctx, "graev", cap).value
            assert abelian <= free


class TestSharedCapProtocol:
    def test_axioms_on_sampled_triples(self, ctx):
        rng = random.Random(50)
        triples = [tuple(random_word(rng, ctx, 2) for _ in range(3)) for _ in range(8)]
        for variant in ("graev", "swierczkowski"):
            report = check_word_pseudometric_axioms(ctx, variant, triples)
            assert report.ok, report.failures

    def test_abelian_axioms(self, ctx):
        rng = random.Random(51)
        triples = [
            tuple(random_word(rng, ctx, 2, commutative=True) for _ in range(3)) for _ in range(6)
        ]
        report = check_word_pseudometric_axioms(ctx, "graev", triples)
        assert report.ok, report.failures


class TestNaturalityScope:
    def test_injective_pointed_maps_commute(self):
        rng = random.Random(61)
        big = random_metric_space(rng, 4)
        small = random_metric_space(rng, 3)
        src = PointedSpace(small, 0)
        functor = WordsFunctor("graev")
        for _ in range(10):
            image = rng.sample(range(4), 3)
            assignment = tuple(image)
            dst = PointedSpace(big, assignment[0])
            phi = [F(rng.randint(0, 8), rng.randint(1, 3)) for _ in range(4)]
            for e in functor.enumerate_elements(src, 2):
                lhs = functor.lift(lambda y: phi[assignment[y]], e)
                pushed = functor.apply_map(lambda y: assignment[y], e, dst)
                assert lhs == functor.lift(lambda x: phi[x], pushed)

    def test_collapsing_map_breaks_letterwise_sums(self, ctx):
        # A map sending x and y to the same point cancels the image of
        # x * y^-1, so the pushed lift loses those letters. This is why
        # naturality harnesses sample injective maps for word instances.
        functor = WordsFunctor("graev")
        two = validate_space(["e", "z"], [[F(0), F(1)], [F(1), F(0)]], "metric")
        dst = PointedSpace(two, 0)
        assignment = (0, 1, 1)
        w = word(ctx, [(1, 1), (2, -1)])
        phi = [F(0), F(5)]
        lhs = functor.lift(lambda y: phi[assignment[y]], w)
        pushed = functor.apply_map(lambda y: assignment[y], w, dst)
        rhs = functor.lift(lambda x: phi[x], pushed)
        assert pushed.letters == ()
        assert lhs == F(10) and rhs == 0
