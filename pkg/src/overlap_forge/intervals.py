"""Allen's interval algebra over half-open byte ranges.

Intervals are half-open ``[start, end)`` so that two contiguous chunks meet
exactly when ``x.end == y.start``, with no off-by-one bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, unique


@unique
class AllenRelation(Enum):
    """The 13 relations of Allen's interval algebra.

    Values are the exact strings used in every serialized format and report.
    """

    M = "M"    # meet: in-order contiguous
    Mi = "Mi"  # met-by: out-of-order contiguous
    B = "B"    # before: data hole between the chunks
    Bi = "Bi"  # after
    Eq = "Eq"  # equal: same start and end offsets (retransmission shape)
    O = "O"    # overlap: partial, first starts earlier
    Oi = "Oi"  # overlapped-by
    S = "S"    # start: same start, first ends earlier
    Si = "Si"  # started-by
    D = "D"    # during: first strictly inside second
    Di = "Di"  # contains
    F = "F"    # finish: same end, first starts later
    Fi = "Fi"  # finished-by

    def __str__(self) -> str:
        return self.value


_INVERSE = {
    AllenRelation.M: AllenRelation.Mi,
    AllenRelation.Mi: AllenRelation.M,
    AllenRelation.B: AllenRelation.Bi,
    AllenRelation.Bi: AllenRelation.B,
    AllenRelation.Eq: AllenRelation.Eq,
    AllenRelation.O: AllenRelation.Oi,
    AllenRelation.Oi: AllenRelation.O,
    AllenRelation.S: AllenRelation.Si,
    AllenRelation.Si: AllenRelation.S,
    AllenRelation.D: AllenRelation.Di,
    AllenRelation.Di: AllenRelation.D,
    AllenRelation.F: AllenRelation.Fi,
    AllenRelation.Fi: AllenRelation.F,
}

NON_OVERLAPPING = frozenset(
    {AllenRelation.M, AllenRelation.Mi, AllenRelation.B, AllenRelation.Bi}
)

# Canonical column order used by every table and report in this package.
OVERLAP_ORDER = (
    AllenRelation.F,
    AllenRelation.Fi,
    AllenRelation.S,
    AllenRelation.Si,
    AllenRelation.O,
    AllenRelation.Oi,
    AllenRelation.D,
    AllenRelation.Di,
    AllenRelation.Eq,
)


@dataclass(frozen=True, slots=True)
class ByteInterval:
    """A non-empty half-open byte range ``[start, end)``."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"interval start must be non-negative, got {self.start}")
        if self.start >= self.end:
            raise ValueError(
                f"interval must be non-empty: start={self.start}, end={self.end}"
            )

    @property
    def length(self) -> int:
        return self.end - self.start

    def intersection(self, other: "ByteInterval") -> "ByteInterval | None":
        """Return the overlapping range, or None when the ranges are disjoint."""
        lo = max(self.start, other.start)
        hi = min(self.end, other.end)
        if lo < hi:
            return ByteInterval(lo, hi)
        return None

    def __str__(self) -> str:
        return f"[{self.start},{self.end})"


def relate(x: ByteInterval, y: ByteInterval) -> AllenRelation:
    """Return the unique Allen relation holding between x and y."""
    if x.end < y.start:
        return AllenRelation.B
    if x.end == y.start:
        return AllenRelation.M
    if y.end < x.start:
        return AllenRelation.Bi
    if y.end == x.start:
        return AllenRelation.Mi
    # The ranges intersect; classify on endpoint comparisons.
    if x.start == y.start:
        if x.end == y.end:
            return AllenRelation.Eq
        return AllenRelation.S if x.end < y.end else AllenRelation.Si
    if x.end == y.end:
        return AllenRelation.F if x.start > y.start else AllenRelation.Fi
    if x.start > y.start:
        return AllenRelation.D if x.end < y.end else AllenRelation.Oi
    return AllenRelation.O if x.end < y.end else AllenRelation.Di


def inverse(r: AllenRelation) -> AllenRelation:
    """Return the inverse relation; relate(x, y) == inverse(relate(y, x))."""
    return _INVERSE[r]


def is_overlapping(r: AllenRelation) -> bool:
    """True for the nine relations whose operand ranges share at least one byte."""
    return r not in NON_OVERLAPPING


def enumerate_overlapping() -> list[AllenRelation]:
    """The nine overlapping relations, in canonical report order."""
    return list(OVERLAP_ORDER)
