"""Reassembly simulation under a declarative per-relation policy table.

The engine replays a chunk sequence in arrival order against a byte buffer
with per-byte provenance.  Every time an arriving chunk touches bytes owned by
an earlier chunk, the relation between the two chunk ranges selects an outcome
from the policy: keep the old bytes, take the new ones, or ignore -- which by
default aborts the whole reassembly (no upper-layer data is produced).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, unique
from typing import TYPE_CHECKING, Iterable, Mapping

from .chunks import TAG_MF_UNSET, Chunk, ChunkSequence, Mode, Protocol
from .errors import PolicyGapError
from .intervals import OVERLAP_ORDER, AllenRelation, ByteInterval, relate

if TYPE_CHECKING:  # pragma: no cover
    from .generator import TestCase


@unique
class Outcome(Enum):
    """How an implementation resolves one overlap: prefer the oldest chunk's
    data, prefer the newest, or ignore the sequence altogether."""

    OLD = "old"
    NEW = "new"
    IGNORE = "ignore"

    def __str__(self) -> str:
        return self.value


@unique
class IgnoreSemantics(Enum):
    """What an IGNORE entry does: abort the whole reassembly (default, models
    an implementation that never hands the data up) or drop just the arriving
    chunk."""

    ABORT = "abort"
    DROP_NEW = "drop-new"


@unique
class ReassemblyStatus(Enum):
    COMPLETED = "completed"
    IGNORED = "ignored"


PolicyKey = tuple[Protocol, Mode, AllenRelation]


@dataclass(frozen=True)
class PolicyTable:
    """A named map (protocol, mode, overlapping relation) -> Outcome."""

    name: str
    entries: Mapping[PolicyKey, Outcome]

    def __post_init__(self) -> None:
        for protocol, mode, relation in self.entries:
            if relation not in OVERLAP_ORDER:
                raise ValueError(
                    f"policy entries are restricted to overlapping relations, "
                    f"got {relation.value}"
                )
            if not isinstance(protocol, Protocol) or not isinstance(mode, Mode):
                raise TypeError("policy keys must be (Protocol, Mode, AllenRelation)")

    def covers(self, protocol: Protocol, mode: Mode) -> bool:
        return all((protocol, mode, r) in self.entries for r in OVERLAP_ORDER)

    def outcome_for(self, protocol: Protocol, mode: Mode, relation: AllenRelation) -> Outcome:
        try:
            return self.entries[(protocol, mode, relation)]
        except KeyError:
            raise PolicyGapError(
                f"policy gap at ({protocol.value}, {mode.value}, {relation.value}) "
                f"in table {self.name!r}"
            ) from None

    def row(self, protocol: Protocol, mode: Mode) -> tuple[Outcome, ...]:
        """The nine outcomes in canonical relation order."""
        return tuple(self.outcome_for(protocol, mode, r) for r in OVERLAP_ORDER)

    def require(self, protocol: Protocol, mode: Mode) -> None:
        for r in OVERLAP_ORDER:
            if (protocol, mode, r) not in self.entries:
                raise PolicyGapError(
                    f"policy gap at ({protocol.value}, {mode.value}, {r.value}) "
                    f"in table {self.name!r}"
                )


def constant_policy(
    outcome: Outcome,
    protocols: Iterable[Protocol] = tuple(Protocol),
    modes: Iterable[Mode] = tuple(Mode),
    name: str | None = None,
) -> PolicyTable:
    """A table answering the same outcome for every relation."""
    entries = {
        (p, m, r): outcome
        for p in protocols
        for m in modes
        for r in OVERLAP_ORDER
    }
    return PolicyTable(name=name or f"constant-{outcome.value}", entries=entries)


@dataclass(frozen=True, slots=True)
class ResolutionEntry:
    """One overlap decision: which relation held, where, and what was chosen."""

    relation: AllenRelation
    region: ByteInterval
    outcome: Outcome


@dataclass(frozen=True, slots=True)
class ReassemblyResult:
    status: ReassemblyStatus
    payload: bytes | None
    resolution_log: tuple[ResolutionEntry, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.status is ReassemblyStatus.IGNORED and self.payload is not None:
            raise ValueError("an ignored reassembly has no payload")

    @property
    def completed(self) -> bool:
        return self.status is ReassemblyStatus.COMPLETED

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "payload_hex": self.payload.hex() if self.payload is not None else None,
            "resolution_log": [
                {
                    "relation": e.relation.value,
                    "start": e.region.start,
                    "end": e.region.end,
                    "outcome": e.outcome.value,
                }
                for e in self.resolution_log
            ],
        }


def _runs(offsets: list[int]) -> list[tuple[int, int]]:
    """Collapse a sorted offset list into half-open (start, end) runs."""
    runs: list[tuple[int, int]] = []
    lo = prev = offsets[0]
    for off in offsets[1:]:
        if off != prev + 1:
            runs.append((lo, prev + 1))
            lo = off
        prev = off
    runs.append((lo, prev + 1))
    return runs


def reassemble(
    seq: ChunkSequence,
    policy: PolicyTable,
    mode: Mode,
    ignore_semantics: IgnoreSemantics = IgnoreSemantics.ABORT,
) -> ReassemblyResult:
    """Simulate reassembly of ``seq`` under ``policy``.

    Chunks are processed in arrival order.  Bytes an arriving chunk shares
    with an earlier chunk are grouped by their current owner; the relation
    relate(owner, arriving) picks the outcome for that group.  Non-contested
    bytes are always written.

    The result is Completed only when no IGNORE aborted the sequence, the
    buffer covers offsets 0 through the maximal end without holes, and -- for
    IP -- a fragment tagged ``mf-unset`` was received.
    """
    if not seq.chunks:
        raise ValueError("cannot reassemble an empty chunk sequence")
    policy.require(seq.protocol, mode)

    buffer: dict[int, int] = {}  # offset -> byte value
    owner: dict[int, int] = {}   # offset -> index of owning chunk
    log: list[ResolutionEntry] = []
    kept: list[Chunk] = []       # chunks not discarded by drop-new

    for idx, chunk in enumerate(seq.chunks):
        contested: dict[int, list[int]] = {}
        for off in range(chunk.start, chunk.end):
            if off in owner:
                contested.setdefault(owner[off], []).append(off)

        # Resolve every contested group before writing anything, so a dropped
        # chunk (drop-new semantics) leaves no partial writes behind.
        drop_chunk = False
        taken: list[int] = []
        for owner_idx in sorted(contested):
            relation = relate(seq.chunks[owner_idx].interval, chunk.interval)
            outcome = policy.outcome_for(seq.protocol, mode, relation)
            for lo, hi in _runs(contested[owner_idx]):
                log.append(ResolutionEntry(relation, ByteInterval(lo, hi), outcome))
            if outcome is Outcome.IGNORE:
                if ignore_semantics is IgnoreSemantics.ABORT:
                    return ReassemblyResult(ReassemblyStatus.IGNORED, None, tuple(log))
                drop_chunk = True
                break
            if outcome is Outcome.NEW:
                taken.extend(contested[owner_idx])
            # Outcome.OLD: keep the existing bytes.

        if drop_chunk:
            continue
        kept.append(chunk)
        for off in taken:
            buffer[off] = chunk.payload[off - chunk.start]
            owner[off] = idx
        for off in range(chunk.start, chunk.end):
            if off not in buffer:
                buffer[off] = chunk.payload[off - chunk.start]
                owner[off] = idx

    if not kept:
        return ReassemblyResult(ReassemblyStatus.IGNORED, None, tuple(log))
    max_end = max(c.end for c in kept)
    contiguous = len(buffer) == max_end and min(buffer) == 0
    trigger_ok = True
    if seq.protocol.is_ip:
        trigger_ok = any(c.has_tag(TAG_MF_UNSET) for c in kept)
    if not (contiguous and trigger_ok):
        return ReassemblyResult(ReassemblyStatus.IGNORED, None, tuple(log))

    payload = bytes(buffer[off] for off in range(max_end))
    return ReassemblyResult(ReassemblyStatus.COMPLETED, payload, tuple(log))


def predict_outcome_payload(
    tc: "TestCase",
    policy: PolicyTable,
    ignore_semantics: IgnoreSemantics = IgnoreSemantics.ABORT,
) -> ReassemblyResult:
    """Reassemble a generated test case under ``policy``."""
    return reassemble(tc.sequence, policy, tc.mode, ignore_semantics)
