import json
import random
from fractions import Fraction as F

import pytest

from fiberdist.core import (
    PairTable,
    ParseError,
    SpaceValidationError,
    canonical_space_json,
    decimal_str,
    format_scalar,
    identity_map,
    parse_scalar,
    point_map,
    product_space,
    space_document_from_obj,
    space_from_json,
    validate_space,
)


def two_point(d=F(5)):
    return validate_space(["x", "y"], [[F(0), d], [d, F(0)]], "metric")


class TestScalar:
    def test_parse_forms(self):
        assert parse_scalar("5") == F(5)
        assert parse_scalar("-3") == F(-3)
        assert parse_scalar("5/2") == F(5, 2)
        assert parse_scalar(" 10/4 ") == F(5, 2)

    @pytest.mark.parametrize("bad", ["2.5", "", "x", "1/0", "1//2", "1e3"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ParseError):
            parse_scalar(bad)

    def test_round_trip(self):
        for text in ["0", "7", "-7", "5/2", "-9/4"]:
            assert format_scalar(parse_scalar(text)) == text

    def test_cross_multiplication_oracle(self):
        # Independent re-derivation of Fraction addition on random pairs.
        rng = random.Random(42)
        for _ in range(1000):
            a, c = rng.randint(-50, 50), rng.randint(-50, 50)
            b, d = rng.randint(1, 30), rng.randint(1, 30)
            direct = F(a, b) + F(c, d)
            cross = F(a * d + c * b, b * d)
            assert direct == cross
            assert direct.denominator > 0
            assert F(direct.numerator, direct.denominator) == direct

    def test_decimal_str(self):
        assert decimal_str(F(5, 2)) == "2.5"
        assert decimal_str(F(-5, 2)) == "-2.5"
        assert decimal_str(F(1, 3), 4) == "0.3333"
        assert decimal_str(F(7)) == "7"


class TestValidateSpace:
    def test_two_point_valid(self):
        sp = two_point()
        assert sp.points == ("x", "y")
        assert sp.d(0, 1) == F(5)

    def test_triangle_violation_names_triple(self):
        mat = [[F(0), F(1), F(3)], [F(1), F(0), F(1)], [F(3), F(1), F(0)]]
        with pytest.raises(SpaceValidationError) as err:
            validate_space(["x", "y", "z"], mat, "metric")
        assert err.value.axiom == "triangle_violation"
        assert err.value.witness == (0, 1, 2)

    def test_zero_distance_distinct_points(self):
        mat = [[F(0), F(0)], [F(0), F(0)]]
        sp = validate_space(["x", "y"], mat, "pseudometric")
        assert sp.mode == "pseudometric"
        with pytest.raises(SpaceValidationError) as err:
            validate_space(["x", "y"], mat, "metric")
        assert err.value.axiom == "zero_distance_distinct"

    @pytest.mark.parametrize(
        "points,matrix,axiom",
        [
            (["x"], [[F(0), F(1)]], "square_matrix"),
            (["x", "x"], [[F(0), F(1)], [F(1), F(0)]], "duplicate_labels"),
            (["x", "y"], [[F(0), F(-1)], [F(-1), F(0)]], "negative_entry"),
            (["x", "y"], [[F(1), F(2)], [F(2), F(0)]], "nonzero_diagonal"),
            (["x", "y"], [[F(0), F(1)], [F(2), F(0)]], "asymmetric"),
        ],
    )
    def test_axiom_order(self, points, matrix, axiom):
        with pytest.raises(SpaceValidationError) as err:
            validate_space(points, matrix, "metric")
        assert err.value.axiom == axiom

    def test_idempotent(self):
        sp = two_point()
        again = validate_space(sp.points, sp.dist, sp.mode)
        assert again == sp

    def test_relabeling_invariance(self):
        rng = random.Random(9)
        mat = [[F(0), F(2), F(3)], [F(2), F(0), F(4)], [F(3), F(4), F(0)]]
        sp = validate_space(["a", "b", "c"], mat, "metric")
        for _ in range(10):
            perm = list(range(3))
            rng.shuffle(perm)
            shuffled = sp.permuted(perm)
            again = validate_space(shuffled.points, shuffled.dist, shuffled.mode)
            for i in range(3):
                for j in range(3):
                    assert again.d(i, j) == sp.d(perm[i], perm[j])


class TestSpaceFile:
    def test_round_trip_canonical(self):
        sp = validate_space(
            ["x", "y"], [[F(0), F(5, 2)], [F(5, 2), F(0)]], "metric"
        )
        text = canonical_space_json(sp)
        again = space_from_json(text)
        assert again == sp
        assert canonical_space_json(again) == text

    def test_basepoint_survives(self):
        obj = {
            "points": ["e", "x"],
            "matrix": [["0", "1"], ["1", "0"]],
            "mode": "metric",
            "basepoint": "e",
        }
        space, basepoint = space_document_from_obj(obj)
        assert basepoint == "e"
        text = canonical_space_json(space, basepoint)
        assert json.loads(text)["basepoint"] == "e"

    def test_rejects_float_entries(self):
        obj = {"points": ["x", "y"], "matrix": [["0", "2.5"], ["2.5", "0"]], "mode": "metric"}
        with pytest.raises(ParseError):
            space_document_from_obj(obj)


class TestProductSpace:
    def test_size_and_diagonal(self):
        sp = two_point()
        prod = product_space(sp)
        assert len(prod.pairs) == 4
        diag_pairs = {prod.pairs[k] for k in prod.diagonal}
        assert diag_pairs == {(0, 0), (1, 1)}

    def test_swap_is_involution(self):
        sp = validate_space(
            ["a", "b", "c"],
            [[F(0), F(1), F(1)], [F(1), F(0), F(1)], [F(1), F(1), F(0)]],
            "metric",
        )
        prod = product_space(sp)
        for k in range(len(prod.pairs)):
            assert prod.swap[prod.swap[k]] == k

    def test_projection_after_diagonal_is_identity(self):
        sp = two_point()
        prod = product_space(sp)
        for i in range(sp.n):
            assert prod.pr1[prod.diagonal[i]] == i
            assert prod.pr2[prod.diagonal[i]] == i


class TestPointMap:
    def test_validation(self):
        sp = two_point()
        with pytest.raises(ValueError):
            point_map(sp, sp, (0,))
        with pytest.raises(ValueError):
            point_map(sp, sp, (0, 5))
        pm = point_map(sp, sp, (1, 0))
        assert pm.is_injective
        assert pm(0) == 1

    def test_identity(self):
        sp = two_point()
        pm = identity_map(sp)
        assert pm.assignment == (0, 1)


class TestPairTable:
    def test_pseudometric_predicates(self):
        sp = two_point()
        t = sp.pair_table()
        assert t.is_pseudometric()
        bumped = PairTable([[F(0), F(1)], [F(2), F(0)]])
        assert not bumped.is_symmetric()

    def test_transpose_and_add(self):
        t = PairTable([[F(0), F(1)], [F(2), F(0)]])
        assert t.transposed()((0, 1)) == F(2)
        assert t.add(t)((0, 1)) == F(2)
        assert t.scale(F(3))((1, 0)) == F(6)
