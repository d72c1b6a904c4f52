"""Protocol-agnostic data chunks and spatio-temporal relations over a sequence.

Chunk offsets are relative to the reassembled upper-layer data area: offset 0
is the first byte after the fixed echo header for IP, or the first stream byte
for TCP.  Arrival is a discrete index; test cases only need ordering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Mapping

from .intervals import AllenRelation, ByteInterval, relate


@unique
class Protocol(Enum):
    IPV4 = "ipv4"
    IPV6 = "ipv6"
    TCP = "tcp"

    @property
    def is_ip(self) -> bool:
        return self in (Protocol.IPV4, Protocol.IPV6)

    def __str__(self) -> str:
        return self.value


@unique
class Mode(Enum):
    """Overlaps tested one per sequence, or all nine in one composite sequence."""

    SINGLE = "single"
    MULTIPLE = "multiple"

    def __str__(self) -> str:
        return self.value


# Well-known chunk tags.  Tags are free-form strings; these are the ones the
# generator emits and the reassembly engine / wire codec interpret.
TAG_MF_UNSET = "mf-unset"      # IP fragment with the More Fragments flag clear
TAG_TRIGGER = "trigger"        # chunk whose arrival completes reassembly
TAG_SUPPORT = "support"        # leading context chunk covering [0, base)
TAG_CONTEXT = "context"        # filler between composite sub-regions
TAG_OVERLAP_OLD = "overlap-old"
TAG_OVERLAP_NEW = "overlap-new"


@dataclass(frozen=True, slots=True)
class Chunk:
    """One fragment/segment: a byte range, its payload, and its arrival rank.

    Tags carry wire-level or generator hints (e.g. ``mf-unset``) and are
    excluded from equality so decoded sequences compare against generated ones.
    """

    interval: ByteInterval
    payload: bytes
    arrival_index: int
    tags: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if len(self.payload) != self.interval.length:
            raise ValueError(
                f"payload length {len(self.payload)} does not match "
                f"interval {self.interval}"
            )
        if self.arrival_index < 0:
            raise ValueError("arrival_index must be non-negative")

    @property
    def start(self) -> int:
        return self.interval.start

    @property
    def end(self) -> int:
        return self.interval.end

    def has_tag(self, tag: str) -> bool:
        return tag in self.tags


@dataclass(frozen=True, slots=True)
class ChunkSequence:
    """Chunks ordered by strictly increasing arrival index."""

    protocol: Protocol
    chunks: tuple[Chunk, ...]
    metadata: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        arrivals = [c.arrival_index for c in self.chunks]
        if any(b <= a for a, b in zip(arrivals, arrivals[1:])):
            raise ValueError("chunks must be sorted by strictly increasing arrival_index")

    def __len__(self) -> int:
        return len(self.chunks)

    @property
    def max_end(self) -> int:
        return max(c.end for c in self.chunks)


def overlap_region(a: Chunk, b: Chunk) -> ByteInterval | None:
    """Intersection of two chunks' byte ranges, or None when disjoint."""
    return a.interval.intersection(b.interval)


def relation_pairs(seq: ChunkSequence) -> list[tuple[int, int, AllenRelation]]:
    """Relations for every chunk pair, computed as relate(earlier, later).

    Indices are positions in ``seq.chunks`` (which is arrival order).  A
    sequence with fewer than two chunks yields an empty list.
    """
    out: list[tuple[int, int, AllenRelation]] = []
    for i in range(len(seq.chunks)):
        for j in range(i + 1, len(seq.chunks)):
            out.append((i, j, relate(seq.chunks[i].interval, seq.chunks[j].interval)))
    return out


def sequence_to_dict(seq: ChunkSequence) -> dict:
    return {
        "protocol": seq.protocol.value,
        "chunks": [
            {
                "start": c.start,
                "end": c.end,
                "arrival": c.arrival_index,
                "payload_hex": c.payload.hex(),
                "tags": list(c.tags),
            }
            for c in seq.chunks
        ],
        "metadata": dict(seq.metadata),
    }


def sequence_from_dict(doc: Mapping) -> ChunkSequence:
    chunks = tuple(
        Chunk(
            interval=ByteInterval(int(c["start"]), int(c["end"])),
            payload=bytes.fromhex(c["payload_hex"]),
            arrival_index=int(c["arrival"]),
            tags=tuple(c.get("tags", ())),
        )
        for c in doc["chunks"]
    )
    return ChunkSequence(
        protocol=Protocol(doc["protocol"]),
        chunks=chunks,
        metadata=dict(doc.get("metadata", {})),
    )


def sequence_to_json(seq: ChunkSequence) -> str:
    return json.dumps(sequence_to_dict(seq), indent=2)


def sequence_from_json(text: str) -> ChunkSequence:
    return sequence_from_dict(json.loads(text))
