from fractions import Fraction

import pytest

from bal3xor.measure import fiber_id_bits, fibers, pushforward, tv_distance, uniform


def test_uniform_and_pushforward():
    mu = uniform(range(8))
    assert sum(mu.values()) == 1
    parity = pushforward(mu, lambda x: bin(x).count("1") % 2)
    assert parity == {0: Fraction(1, 2), 1: Fraction(1, 2)}


def test_uniform_counts_repeats():
    assert uniform("aab") == {"a": Fraction(2, 3), "b": Fraction(1, 3)}
    with pytest.raises(ValueError):
        uniform([])


def test_tv_distance_exact():
    assert tv_distance({0: Fraction(1)}, {1: Fraction(1)}) == 1
    assert tv_distance(uniform(range(4)), uniform(range(4))) == 0
    assert tv_distance(uniform(range(2)), uniform(range(4))) == Fraction(1, 2)


def test_fibers_and_id_bits():
    fs = fibers(range(10), lambda x: x % 3)
    assert fs[0] == [0, 3, 6, 9]
    assert fiber_id_bits(max(len(v) for v in fs.values())) == 2
    assert fiber_id_bits(1) == 0
    assert fiber_id_bits(5) == 3
    with pytest.raises(ValueError):
        fiber_id_bits(0)
