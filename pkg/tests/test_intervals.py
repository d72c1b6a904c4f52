"""Interval algebra: partition, inverses, overlap soundness."""

import itertools

import pytest

from overlap_forge.intervals import (
    NON_OVERLAPPING,
    OVERLAP_ORDER,
    AllenRelation,
    ByteInterval,
    enumerate_overlapping,
    inverse,
    is_overlapping,
    relate,
)

R = AllenRelation


# Independent oracle: each relation written out as its definitional endpoint
# predicate, kept separate from the comparison chain inside relate().
ORACLE = {
    R.B: lambda x, y: x.end < y.start,
    R.Bi: lambda x, y: y.end < x.start,
    R.M: lambda x, y: x.end == y.start,
    R.Mi: lambda x, y: y.end == x.start,
    R.Eq: lambda x, y: x.start == y.start and x.end == y.end,
    R.S: lambda x, y: x.start == y.start and x.end < y.end,
    R.Si: lambda x, y: x.start == y.start and x.end > y.end,
    R.F: lambda x, y: x.end == y.end and x.start > y.start,
    R.Fi: lambda x, y: x.end == y.end and x.start < y.start,
    R.D: lambda x, y: x.start > y.start and x.end < y.end,
    R.Di: lambda x, y: x.start < y.start and x.end > y.end,
    R.O: lambda x, y: x.start < y.start < x.end < y.end,
    R.Oi: lambda x, y: y.start < x.start < y.end < x.end,
}


def all_intervals(limit=6):
    return [
        ByteInterval(s, e)
        for s in range(limit)
        for e in range(s + 1, limit)
    ]


def intersects(x, y):
    return max(x.start, y.start) < min(x.end, y.end)


def test_domain_size():
    pairs = list(itertools.product(all_intervals(), repeat=2))
    assert len(pairs) == 225


def test_partition_against_oracle():
    witnessed = set()
    for x, y in itertools.product(all_intervals(), repeat=2):
        holding = [r for r, pred in ORACLE.items() if pred(x, y)]
        assert len(holding) == 1, (x, y, holding)
        assert relate(x, y) is holding[0]
        witnessed.add(holding[0])
    assert witnessed == set(AllenRelation)


def test_inverse_symmetry_brute_force():
    for x, y in itertools.product(all_intervals(), repeat=2):
        assert relate(x, y) is inverse(relate(y, x))


def test_overlap_soundness():
    for x, y in itertools.product(all_intervals(), repeat=2):
        assert is_overlapping(relate(x, y)) == intersects(x, y)


def test_relate_reflexive_is_eq():
    for x in all_intervals():
        assert relate(x, x) is R.Eq


@pytest.mark.parametrize(
    "x, y, expected",
    [
        ((0, 4), (4, 8), R.M),
        ((8, 24), (8, 24), R.Eq),
        ((8, 24), (16, 32), R.O),
        ((8, 16), (8, 24), R.S),
        ((16, 24), (8, 32), R.D),
        ((16, 24), (8, 24), R.F),
    ],
)
def test_relate_examples(x, y, expected):
    assert relate(ByteInterval(*x), ByteInterval(*y)) is expected


def test_inverse_is_involution():
    for r in AllenRelation:
        assert inverse(inverse(r)) is r
    assert inverse(R.Eq) is R.Eq
    assert inverse(R.O) is R.Oi
    assert inverse(R.M) is R.Mi
    assert inverse(R.B) is R.Bi
    assert inverse(R.S) is R.Si
    assert inverse(R.D) is R.Di
    assert inverse(R.F) is R.Fi


def test_is_overlapping_values():
    assert is_overlapping(R.Eq)
    assert not is_overlapping(R.B)
    assert NON_OVERLAPPING == {R.M, R.Mi, R.B, R.Bi}
    assert sum(1 for r in AllenRelation if is_overlapping(r)) == 9


def test_enumerate_overlapping_order():
    order = enumerate_overlapping()
    assert len(order) == 9
    assert order[0] is R.F
    assert order[-1] is R.Eq
    assert order == [R.F, R.Fi, R.S, R.Si, R.O, R.Oi, R.D, R.Di, R.Eq]
    assert not set(order) & NON_OVERLAPPING
    assert tuple(order) == OVERLAP_ORDER


def test_relation_serialized_names():
    assert [r.value for r in OVERLAP_ORDER] == [
        "F", "Fi", "S", "Si", "O", "Oi", "D", "Di", "Eq",
    ]
    assert {r.value for r in NON_OVERLAPPING} == {"M", "Mi", "B", "Bi"}
    assert AllenRelation("Fi") is R.Fi


def test_empty_intervals_rejected():
    with pytest.raises(ValueError):
        ByteInterval(3, 3)
    with pytest.raises(ValueError):
        ByteInterval(5, 2)
    with pytest.raises(ValueError):
        ByteInterval(-1, 4)


def test_intersection():
    assert ByteInterval(8, 24).intersection(ByteInterval(16, 32)) == ByteInterval(16, 24)
    assert ByteInterval(0, 8).intersection(ByteInterval(8, 16)) is None
    assert ByteInterval(8, 24).intersection(ByteInterval(8, 24)) == ByteInterval(8, 24)
