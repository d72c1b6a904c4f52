"""Exception types shared across the package."""


class OverlapForgeError(Exception):
    """Base class for all errors raised by overlap_forge."""


class NonOverlappingRelationError(OverlapForgeError):
    """A non-overlapping relation was used where an overlap test case is required."""


class PolicyGapError(OverlapForgeError):
    """A policy table is missing an entry for a (protocol, mode, relation) key."""


class ProfileNotFoundError(OverlapForgeError):
    """No built-in or user-supplied policy profile matches the requested name."""


class PolicySchemaError(OverlapForgeError):
    """A policy document does not conform to the policy JSON schema."""


class MissingRelationError(OverlapForgeError):
    """An observation set does not cover all nine overlapping relations."""


class AnomalousObservationError(OverlapForgeError):
    """An observed payload matches neither the old nor the new marker."""

    def __init__(self, message, relation=None, region=None, observed=None):
        super().__init__(message)
        self.relation = relation
        self.region = region
        self.observed = observed


class EncodingError(OverlapForgeError):
    """A chunk sequence cannot be encoded as valid wire frames."""


class DecodingError(OverlapForgeError):
    """Wire frames cannot be parsed back into a chunk sequence."""


class PcapFormatError(OverlapForgeError):
    """A pcap file is truncated, has an unknown magic, or an unsupported link type."""
