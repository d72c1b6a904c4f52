"""Canonical overlap test cases with checksum-neutral marker payloads.

Each overlapping relation gets a two-chunk geometry whose endpoints are
multiples of the protocol unit.  The contested region carries an old/new
marker pair built from permuted 2-byte blocks ("AABBCCDD" vs "DDCCBBAA"), so
whichever side a stack prefers, the 16-bit ones'-complement checksum of the
reassembled payload is unchanged while the winner stays identifiable.

Sequences always cover the data area contiguously from offset 0:

* IP: a leading support fragment covers [0, base), and a trailing fragment --
  the only one with More Fragments unset -- finishes rightmost and is sent
  last, so reassembly can only trigger once everything arrived.
* TCP: an extra segment covering [0, base), the byte-wise beginning of the
  stream, is sent after all overlap segments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from .chunks import (
    TAG_CONTEXT,
    TAG_MF_UNSET,
    TAG_OVERLAP_NEW,
    TAG_OVERLAP_OLD,
    TAG_SUPPORT,
    TAG_TRIGGER,
    Chunk,
    ChunkSequence,
    Mode,
    Protocol,
)
from .engine import Outcome
from .errors import NonOverlappingRelationError
from .intervals import OVERLAP_ORDER, AllenRelation, ByteInterval, is_overlapping, relate

#: Identifies the composite (multiple-mode) chunk layout, recorded in output
#: metadata so results stay comparable across runs and versions.
COMPOSITE_LAYOUT = "composite-v1"

DEFAULT_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True, slots=True)
class GeneratorConfig:
    """Geometry and payload knobs for test-case generation.

    ``unit`` is the chunk-boundary granularity (8 for IP, mandated by the
    fragment-offset field; 4 by default for TCP, which has no alignment
    constraint).  ``base`` reserves [0, base) for the upper-layer header
    region / leading context, never overlapped.
    """

    unit: int = 8
    base: int = 8
    filler_byte: bytes = b"X"
    marker_alphabet: str = DEFAULT_ALPHABET

    def __post_init__(self) -> None:
        if self.unit < 2:
            raise ValueError("unit must be at least 2")
        if self.base < self.unit:
            raise ValueError("base must be at least one unit")
        if len(self.filler_byte) != 1:
            raise ValueError("filler_byte must be a single byte")
        if len(set(self.marker_alphabet)) < 2:
            raise ValueError("marker_alphabet needs at least two distinct symbols")

    @classmethod
    def for_protocol(cls, protocol: Protocol) -> "GeneratorConfig":
        if protocol.is_ip:
            return cls(unit=8, base=8)
        return cls(unit=4, base=8)

    def validate_for(self, protocol: Protocol) -> None:
        if protocol.is_ip and (self.unit % 8 or self.base % 8):
            raise ValueError(
                "IP chunk boundaries must be multiples of 8 bytes; "
                f"got unit={self.unit}, base={self.base}"
            )

    def to_dict(self) -> dict:
        return {
            "unit": self.unit,
            "base": self.base,
            "filler_byte": self.filler_byte.hex(),
            "marker_alphabet": self.marker_alphabet,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "GeneratorConfig":
        return cls(
            unit=int(doc["unit"]),
            base=int(doc["base"]),
            filler_byte=bytes.fromhex(doc["filler_byte"]),
            marker_alphabet=str(doc["marker_alphabet"]),
        )


@dataclass(frozen=True, slots=True)
class PayloadPattern:
    """Old/new marker bytes for one overlap region.

    The two markers are permutations of each other at 2-byte-block granularity,
    which forces equal internet checksums, and differ in at least one byte.
    """

    old_marker: bytes
    new_marker: bytes

    def __post_init__(self) -> None:
        if len(self.old_marker) != len(self.new_marker):
            raise ValueError("markers must have equal length")
        if len(self.old_marker) % 2:
            raise ValueError("marker length must be even")
        if self.old_marker == self.new_marker:
            raise ValueError("markers must differ in at least one byte")
        if sorted(_blocks(self.old_marker)) != sorted(_blocks(self.new_marker)):
            raise ValueError("new_marker must be a block permutation of old_marker")


def _blocks(data: bytes) -> list[bytes]:
    return [data[i : i + 2] for i in range(0, len(data), 2)]


def make_pattern(
    region_length: int,
    alphabet: str = DEFAULT_ALPHABET,
    rotation: int = 0,
) -> PayloadPattern:
    """Build the marker pair for a region of ``region_length`` bytes.

    The old marker concatenates distinct 2-byte blocks drawn from ``alphabet``
    starting at ``rotation`` ("AABBCCDD" for length 8); the new marker is the
    reversed block order ("DDCCBBAA").  Both therefore sum to the same 16-bit
    ones'-complement value.
    """
    if region_length % 2:
        raise ValueError(f"region length must be even, got {region_length}")
    if region_length < 4:
        raise ValueError(f"region length must be at least 4, got {region_length}")
    n = region_length // 2
    if n > len(alphabet):
        raise ValueError(
            f"alphabet of {len(alphabet)} symbols cannot fill {n} distinct blocks"
        )
    symbols = [alphabet[(rotation + i) % len(alphabet)] for i in range(n)]
    old = b"".join((s * 2).encode("ascii") for s in symbols)
    new = b"".join((s * 2).encode("ascii") for s in reversed(symbols))
    return PayloadPattern(old_marker=old, new_marker=new)


# Geometry table: relation -> ((x_start, x_end), (y_start, y_end)) in units,
# relative to base.  X is sent first, Y second; relate(X, Y) == relation.
_GEOMETRY: dict[AllenRelation, tuple[tuple[int, int], tuple[int, int]]] = {
    AllenRelation.F: ((1, 2), (0, 2)),
    AllenRelation.Fi: ((0, 2), (1, 2)),
    AllenRelation.S: ((0, 1), (0, 2)),
    AllenRelation.Si: ((0, 2), (0, 1)),
    AllenRelation.O: ((0, 2), (1, 3)),
    AllenRelation.Oi: ((1, 3), (0, 2)),
    AllenRelation.D: ((1, 2), (0, 3)),
    AllenRelation.Di: ((0, 3), (1, 2)),
    AllenRelation.Eq: ((0, 2), (0, 2)),
}


def canonical_geometry(
    r: AllenRelation, unit: int = 8, base: int = 8
) -> tuple[ByteInterval, ByteInterval]:
    """The canonical (first-sent, second-sent) intervals realizing relation r.

    All endpoints are multiples of ``unit``; the pair sits at offset ``base``.
    """
    if not is_overlapping(r):
        raise NonOverlappingRelationError(
            f"relation {r.value} has no overlap test case"
        )
    if unit < 2:
        raise ValueError("unit must be at least 2")
    if base < unit:
        raise ValueError("base must be at least one unit")
    (xs, xe), (ys, ye) = _GEOMETRY[r]
    return (
        ByteInterval(base + xs * unit, base + xe * unit),
        ByteInterval(base + ys * unit, base + ye * unit),
    )


@dataclass(frozen=True)
class TestCase:
    """A generated overlap test case plus its expected reassembled payloads.

    ``expected_markers`` maps each outcome to the full reassembled byte string
    a stack holding that preference would produce (IGNORE maps to None: no
    reassembled output).
    """

    __test__ = False  # domain object, not a pytest collection target

    protocol: Protocol
    mode: Mode
    relations_under_test: tuple[AllenRelation, ...]
    sequence: ChunkSequence
    expected_markers: Mapping[Outcome, bytes | None]
    trigger_description: str
    config: GeneratorConfig = field(default_factory=GeneratorConfig)

    @property
    def relation(self) -> AllenRelation:
        if len(self.relations_under_test) != 1:
            raise ValueError("not a single-relation test case")
        return self.relations_under_test[0]

    def overlap_specs(self) -> list[tuple[AllenRelation, ByteInterval]]:
        """Per tested overlap: (relation, contested region), arrival order."""
        specs: list[tuple[AllenRelation, ByteInterval]] = []
        chunks = self.sequence.chunks
        for i in range(len(chunks)):
            for j in range(i + 1, len(chunks)):
                region = chunks[i].interval.intersection(chunks[j].interval)
                if region is not None:
                    specs.append((relate(chunks[i].interval, chunks[j].interval), region))
        return specs

    def marker_bytes(self, outcome: Outcome, region: ByteInterval) -> bytes:
        payload = self.expected_markers[outcome]
        if payload is None:
            raise ValueError(f"outcome {outcome.value} has no reassembled output")
        return payload[region.start : region.end]

    def to_dict(self) -> dict:
        from .chunks import sequence_to_dict

        doc = sequence_to_dict(self.sequence)
        doc["mode"] = self.mode.value
        doc["relations"] = [r.value for r in self.relations_under_test]
        doc["expected_markers"] = {
            outcome.value: payload.hex() if payload is not None else None
            for outcome, payload in self.expected_markers.items()
        }
        doc["trigger_description"] = self.trigger_description
        doc["generator"] = self.config.to_dict()
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "TestCase":
        from .chunks import sequence_from_dict

        markers = {
            Outcome(key): bytes.fromhex(value) if value is not None else None
            for key, value in doc["expected_markers"].items()
        }
        return cls(
            protocol=Protocol(doc["protocol"]),
            mode=Mode(doc["mode"]),
            relations_under_test=tuple(AllenRelation(r) for r in doc["relations"]),
            sequence=sequence_from_dict(doc),
            expected_markers=markers,
            trigger_description=doc["trigger_description"],
            config=GeneratorConfig.from_dict(doc["generator"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TestCase":
        return cls.from_dict(json.loads(text))


def _chunk_payload(
    interval: ByteInterval,
    markers: list[tuple[ByteInterval, bytes]],
    filler: bytes,
) -> bytes:
    """Filler everywhere except the marker slices."""
    buf = bytearray(filler * interval.length)
    for region, data in markers:
        lo = region.start - interval.start
        buf[lo : lo + len(data)] = data
    return bytes(buf)


def _expected_payloads(
    chunks: tuple[Chunk, ...]
) -> dict[Outcome, bytes | None]:
    """Reassembled payloads for the two constant preferences.

    Keeping the oldest chunk's data on every contested byte is first-writer
    wins; preferring the newest is last-writer wins.
    """
    end = max(c.end for c in chunks)
    old = bytearray(end)
    new = bytearray(end)
    written = bytearray(end)
    for chunk in chunks:
        for off in range(chunk.start, chunk.end):
            b = chunk.payload[off - chunk.start]
            new[off] = b
            if not written[off]:
                old[off] = b
                written[off] = 1
    return {Outcome.OLD: bytes(old), Outcome.NEW: bytes(new), Outcome.IGNORE: None}


def _overlap_chunks(
    r: AllenRelation,
    config: GeneratorConfig,
    base: int,
    arrival: int,
    rotation: int,
) -> tuple[Chunk, Chunk]:
    """The marker-carrying pair (first-sent, second-sent) for relation r."""
    x, y = canonical_geometry(r, config.unit, base)
    region = x.intersection(y)
    assert region is not None
    pattern = make_pattern(region.length, config.marker_alphabet, rotation)
    first = Chunk(
        interval=x,
        payload=_chunk_payload(x, [(region, pattern.old_marker)], config.filler_byte),
        arrival_index=arrival,
        tags=(TAG_OVERLAP_OLD,),
    )
    second = Chunk(
        interval=y,
        payload=_chunk_payload(y, [(region, pattern.new_marker)], config.filler_byte),
        arrival_index=arrival + 1,
        tags=(TAG_OVERLAP_NEW,),
    )
    return first, second


def _assemble(
    protocol: Protocol,
    overlap_chunks: list[Chunk],
    config: GeneratorConfig,
    metadata: dict[str, str],
) -> tuple[ChunkSequence, str]:
    """Wrap overlap chunks with the protocol's support and trigger chunks.

    Incoming chunks must use arrival indices 1..n for IP (0 is reserved for
    the leading support fragment) and 0..n-1 for TCP.
    """
    filler = config.filler_byte
    lead_iv = ByteInterval(0, config.base)
    max_end = max(c.end for c in overlap_chunks)
    if protocol.is_ip:
        lead = Chunk(lead_iv, filler * lead_iv.length, 0, tags=(TAG_SUPPORT,))
        trigger_iv = ByteInterval(max_end, max_end + config.unit)
        trigger = Chunk(
            trigger_iv,
            filler * trigger_iv.length,
            overlap_chunks[-1].arrival_index + 1,
            tags=(TAG_TRIGGER, TAG_MF_UNSET),
        )
        chunks = (lead, *overlap_chunks, trigger)
        trigger_description = (
            "rightmost-finishing fragment sent last, the only one with the "
            "More Fragments flag unset"
        )
    else:
        extra = Chunk(
            lead_iv,
            filler * lead_iv.length,
            overlap_chunks[-1].arrival_index + 1,
            tags=(TAG_TRIGGER,),
        )
        chunks = (*overlap_chunks, extra)
        trigger_description = (
            "extra segment at the byte-wise beginning of the stream, "
            "sent after all overlap segments"
        )
    return ChunkSequence(protocol, chunks, metadata), trigger_description


def build_single(
    protocol: Protocol,
    r: AllenRelation,
    config: GeneratorConfig | None = None,
) -> TestCase:
    """The canonical single-mode test case for one overlapping relation."""
    if config is None:
        config = GeneratorConfig.for_protocol(protocol)
    config.validate_for(protocol)
    first_arrival = 1 if protocol.is_ip else 0
    first, second = _overlap_chunks(r, config, config.base, first_arrival, rotation=0)
    metadata = {"layout": "single-v1", "relation": r.value}
    sequence, trigger_description = _assemble(protocol, [first, second], config, metadata)
    return TestCase(
        protocol=protocol,
        mode=Mode.SINGLE,
        relations_under_test=(r,),
        sequence=sequence,
        expected_markers=_expected_payloads(sequence.chunks),
        trigger_description=trigger_description,
        config=config,
    )


def build_multiple(
    protocol: Protocol,
    config: GeneratorConfig | None = None,
) -> TestCase:
    """One composite sequence exercising all nine overlapping relations.

    Each relation gets its own sub-region in canonical order, with a
    one-unit context chunk separating consecutive sub-regions; a single
    trigger chunk per the protocol rule completes the sequence.
    """
    if config is None:
        config = GeneratorConfig.for_protocol(protocol)
    config.validate_for(protocol)
    chunks: list[Chunk] = []
    arrival = 1 if protocol.is_ip else 0
    cursor = config.base
    for i, r in enumerate(OVERLAP_ORDER):
        first, second = _overlap_chunks(r, config, cursor, arrival, rotation=i)
        chunks.extend((first, second))
        arrival += 2
        span_end = max(first.end, second.end)
        if i < len(OVERLAP_ORDER) - 1:
            context_iv = ByteInterval(span_end, span_end + config.unit)
            chunks.append(
                Chunk(
                    context_iv,
                    config.filler_byte * context_iv.length,
                    arrival,
                    tags=(TAG_CONTEXT,),
                )
            )
            arrival += 1
        cursor = span_end + config.unit
    metadata = {"layout": COMPOSITE_LAYOUT}
    sequence, trigger_description = _assemble(protocol, chunks, config, metadata)
    return TestCase(
        protocol=protocol,
        mode=Mode.MULTIPLE,
        relations_under_test=OVERLAP_ORDER,
        sequence=sequence,
        expected_markers=_expected_payloads(sequence.chunks),
        trigger_description=trigger_description,
        config=config,
    )
