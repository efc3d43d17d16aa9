import itertools
import math
from fractions import Fraction as F

import pytest

from oracles import shannon
from otbounds.dist import marginal
from otbounds.entropy import mutual_info, shannon_cond, shannon_cond_rev
from otbounds.errors import AlphabetOverflow, DomainError, NotAFunction, NotPrime, ParseError
from otbounds.primitives import (
    ERASED,
    check_condition_1,
    find_y1_y2,
    function_from_callable,
    make_function,
    make_leaky_ot_randomness,
    make_olfe_randomness,
    make_ot_randomness,
    make_rabin_randomness,
    parse_primitive,
    restricted_ot_function,
)
from otbounds.structure import common_part, mutual_info_given_common

TOL = 1e-9


def triple(j):
    return shannon_cond(j), shannon_cond_rev(j), mutual_info(j)


@pytest.mark.parametrize(
    "params, expected",
    [((1, 2, 1, 1), (1, 1, 1)), ((1, 4, 2, 1), (6, 2, 2)), ((1, 2, 1, 2), (2, 2, 2)), ((1, 3, 2, 1), (4, math.log2(3), 2))],
)
def test_ot_randomness_triple(params, expected):
    j = make_ot_randomness(*params).joint
    assert triple(j) == pytest.approx(expected, abs=TOL)


def test_ot_randomness_shape():
    j = make_ot_randomness(1, 2, 1, 2).joint
    assert len(j.weights) == 64
    u = marginal(j, "left")
    assert len(u.support()) == 16 and len(set(dict(u.items()).values())) == 1
    v = marginal(j, "right")
    assert len(set(dict(v.items()).values())) == 1
    assert len(common_part(j)[0]) == 1
    assert mutual_info_given_common(j) == pytest.approx(mutual_info(j), abs=TOL)


def test_two_out_of_three():
    j = make_ot_randomness(2, 3, 1).joint
    # receiver sees two of three bits
    assert shannon_cond(j) == pytest.approx(1, abs=TOL)
    assert shannon_cond_rev(j) == pytest.approx(math.log2(3), abs=TOL)


def test_ot_budget():
    with pytest.raises(AlphabetOverflow):
        make_ot_randomness(1, 4, 2, 3, budget=2**20)


@pytest.mark.parametrize("p, k, expected", [(1, 1, 0), (0, 3, 3), (F(1, 2), 1, F(1, 2)), (F(1, 4), 2, F(3, 2))])
def test_rabin(p, k, expected):
    j = make_rabin_randomness(p, k).joint
    assert shannon_cond(j) == pytest.approx(float(expected), abs=TOL)
    assert ERASED in j.support_y() or p == 1


def test_rabin_direct_formula():
    # H(U|V) summed by hand: only the erased column carries entropy
    j = make_rabin_randomness(F(1, 3), 2).joint
    assert shannon_cond(j) == pytest.approx(F(2, 3) * 2, abs=TOL)
    with pytest.raises(DomainError):
        make_rabin_randomness(F(3, 2), 1)


def test_olfe():
    j = make_olfe_randomness(2).joint
    assert shannon_cond(j) == pytest.approx(1, abs=TOL)
    assert shannon_cond_rev(j) == pytest.approx(1, abs=TOL)
    assert mutual_info(make_olfe_randomness(3).joint) == pytest.approx(math.log2(3), abs=TOL)
    assert shannon_cond(make_olfe_randomness(2, 2).joint) == pytest.approx(2, abs=TOL)
    with pytest.raises(NotPrime):
        make_olfe_randomness(4)


@pytest.mark.parametrize("alpha", [F(0), F(1, 2), F(1, 3), F(1)])
def test_leaky_ot(alpha):
    j = make_leaky_ot_randomness(alpha).joint
    assert shannon_cond(j) == pytest.approx(float(alpha), abs=TOL)


def test_leaky_ot_alpha_one_is_plain_ot():
    leaky = make_leaky_ot_randomness(1).joint
    plain = make_ot_randomness(1, 2, 1).joint
    assert triple(leaky) == pytest.approx(triple(plain), abs=TOL)


def test_function_tables():
    eq = make_function("eq", 2)
    assert eq((0, 1), (0, 1)) == 1 and eq((0, 1), (1, 1)) == 0
    ip = make_function("ip", 3)
    assert ip((1, 0, 1), (1, 1, 1)) == 0
    ot = make_function("ot", 1, 2, 1)
    assert ot((0, 1), 1) == 1
    olfe = make_function("olfe", 5)
    assert olfe((2, 3), 4) == (2 + 12) % 5
    with pytest.raises(ParseError):
        make_function("xor", 2)
    with pytest.raises(AlphabetOverflow):
        make_function("eq", 13, budget=2**20)


def test_condition_1():
    assert check_condition_1(make_function("eq", 3))
    const = function_from_callable("const", range(3), range(3), lambda x, y: 0)
    assert not check_condition_1(const)
    ip = make_function("ip", 3)
    units = [tuple(int(i == j) for i in range(3)) for j in range(3)]
    assert check_condition_1(ip.restrict(y_domain=units))
    with pytest.raises(NotAFunction):
        check_condition_1(make_ot_randomness(1, 2, 1))


def brute_y1_y2(f):
    xs = f.x_domain
    y1 = [y for y in f.y_domain if all(f(a, y) != f(b, y) for a, b in itertools.combinations(xs, 2))]
    y2 = [y for y in f.y_domain if all(f(a, y) == f(b, y) for a, b in itertools.combinations(xs, 2))]
    return bool(y1 and y2)


def test_find_y1_y2():
    r = restricted_ot_function(1, 2, 2)
    pair = find_y1_y2(r)
    assert pair is not None
    y1, y2 = pair
    assert len(set(r.column(y1))) == len(r.x_domain) and len(set(r.column(y2))) == 1
    assert find_y1_y2(make_function("eq", 2)) is None
    assert brute_y1_y2(make_function("eq", 2)) is False
    const = function_from_callable("const", range(3), range(3), lambda x, y: 0)
    assert find_y1_y2(const) is None
    for t, n in [(1, 3), (2, 4), (2, 3), (3, 4), (3, 5)]:
        g = restricted_ot_function(t, n, 1)
        assert find_y1_y2(g) is not None and brute_y1_y2(g)
    assert find_y1_y2(make_function("ot", 1, 2, 1)) is None


def test_parse_primitive():
    assert parse_primitive("ot:1,2,1,1").params == (1, 2, 1, 1)
    assert parse_primitive("rabin:1/2,3").params == (F(1, 2), 3)
    assert parse_primitive("leaky-ot:1/4").params[0] == F(1, 4)
    assert parse_primitive("olfe:3,1").kind == "randomness"
    assert parse_primitive("ip:2").kind == "function"
    for bad in ("ot:1,2", "nope:3", "rabin:x,1", "ot:a,b,c,d"):
        with pytest.raises(ParseError):
            parse_primitive(bad)


def test_uniform_marginal_entropy_oracle():
    j = make_ot_randomness(1, 3, 1).joint
    u = marginal(j, "left")
    assert shannon(dict(u.items())) == pytest.approx(3, abs=TOL)
