"""Chunk model: overlap regions, pairwise relations, serialization."""

import pytest

from overlap_forge.chunks import (
    Chunk,
    ChunkSequence,
    Protocol,
    overlap_region,
    relation_pairs,
    sequence_from_json,
    sequence_to_json,
)
from overlap_forge.intervals import AllenRelation, ByteInterval, inverse

R = AllenRelation


def chunk(start, end, arrival, fill=b"a", tags=()):
    return Chunk(ByteInterval(start, end), fill * (end - start), arrival, tuple(tags))


def test_overlap_region_examples():
    assert overlap_region(chunk(8, 24, 0), chunk(16, 32, 1)) == ByteInterval(16, 24)
    assert overlap_region(chunk(0, 8, 0), chunk(8, 16, 1)) is None
    assert overlap_region(chunk(8, 24, 0), chunk(8, 24, 1)) == ByteInterval(8, 24)


def test_relation_pairs_two_chunks():
    seq = ChunkSequence(Protocol.IPV4, (chunk(8, 24, 0), chunk(16, 32, 1)))
    assert relation_pairs(seq) == [(0, 1, R.O)]


def test_relation_pairs_identical_intervals():
    seq = ChunkSequence(Protocol.TCP, (chunk(8, 24, 0), chunk(8, 24, 1)))
    assert relation_pairs(seq) == [(0, 1, R.Eq)]


def test_relation_pairs_contiguous_chunks_never_overlap():
    seq = ChunkSequence(
        Protocol.IPV4, (chunk(0, 8, 0), chunk(8, 16, 1), chunk(16, 24, 2))
    )
    relations = [r for _, _, r in relation_pairs(seq)]
    assert relations == [R.M, R.B, R.M]
    assert all(r in {R.M, R.Mi, R.B, R.Bi} for r in relations)


def test_relation_pairs_count():
    chunks = tuple(chunk(8 * i, 8 * i + 8, i) for i in range(5))
    seq = ChunkSequence(Protocol.TCP, chunks)
    assert len(relation_pairs(seq)) == 5 * 4 // 2


def test_relation_pairs_short_sequences():
    assert relation_pairs(ChunkSequence(Protocol.TCP, (chunk(0, 8, 0),))) == []


def test_swapping_arrival_maps_through_inverse():
    a, b = chunk(8, 24, 0), chunk(12, 20, 1)
    fwd = relation_pairs(ChunkSequence(Protocol.TCP, (a, b)))[0][2]
    swapped = (
        Chunk(b.interval, b.payload, 0),
        Chunk(a.interval, a.payload, 1),
    )
    rev = relation_pairs(ChunkSequence(Protocol.TCP, swapped))[0][2]
    assert fwd is inverse(rev)


def test_chunk_payload_length_must_match_interval():
    with pytest.raises(ValueError):
        Chunk(ByteInterval(0, 8), b"short", 0)


def test_chunk_negative_arrival_rejected():
    with pytest.raises(ValueError):
        Chunk(ByteInterval(0, 8), b"x" * 8, -1)


def test_sequence_requires_strictly_increasing_arrivals():
    with pytest.raises(ValueError):
        ChunkSequence(Protocol.IPV4, (chunk(0, 8, 1), chunk(8, 16, 1)))
    with pytest.raises(ValueError):
        ChunkSequence(Protocol.IPV4, (chunk(0, 8, 2), chunk(8, 16, 1)))


def test_tags_do_not_affect_equality():
    assert chunk(0, 8, 0, tags=("mf-unset",)) == chunk(0, 8, 0)


def test_json_round_trip():
    seq = ChunkSequence(
        Protocol.IPV6,
        (chunk(0, 8, 0, fill=b"p"), chunk(8, 24, 2, fill=b"q", tags=("trigger",))),
        metadata={"layout": "single-v1"},
    )
    restored = sequence_from_json(sequence_to_json(seq))
    assert restored == seq
    assert restored.chunks[1].tags == ("trigger",)
    assert restored.metadata == {"layout": "single-v1"}


def test_json_payload_is_hex():
    seq = ChunkSequence(Protocol.IPV4, (chunk(0, 4, 0, fill=b"\xff"),))
    assert '"ffffffff"' in sequence_to_json(seq)
