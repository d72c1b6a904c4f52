"""Recover a policy table from observed reassembly outputs.

The decision rule keys on the overlap-region bytes only: no output means the
implementation ignored the sequence; the old (resp. new) marker on the region
means it preferred the oldest (resp. newest) chunk's data.  Anything else is
an anomalous observation and is reported rather than guessed at.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from .chunks import Mode, Protocol
from .engine import Outcome, PolicyKey, PolicyTable
from .errors import AnomalousObservationError, MissingRelationError
from .generator import TestCase
from .intervals import OVERLAP_ORDER, AllenRelation, ByteInterval


@dataclass(frozen=True, slots=True)
class Observation:
    """What came back for one test case: a reassembled payload, or nothing."""

    test_relation: AllenRelation
    payload: bytes | None

    @property
    def no_output(self) -> bool:
        return self.payload is None


def _region_outcome(
    tc: TestCase, relation: AllenRelation, region: ByteInterval, payload: bytes
) -> Outcome:
    old = tc.marker_bytes(Outcome.OLD, region)
    new = tc.marker_bytes(Outcome.NEW, region)
    observed = payload[region.start : region.end]
    if len(observed) < region.length:
        raise AnomalousObservationError(
            f"payload too short to cover overlap region {region} "
            f"for relation {relation.value}",
            relation=relation,
            region=region,
            observed=observed,
        )
    if observed == old:
        return Outcome.OLD
    if observed == new:
        return Outcome.NEW
    raise AnomalousObservationError(
        f"overlap region {region} for relation {relation.value} matches "
        f"neither marker: observed {observed.hex()} "
        f"(old {old.hex()}, new {new.hex()})",
        relation=relation,
        region=region,
        observed=observed,
    )


def infer_outcome(tc: TestCase, obs: Observation) -> Outcome:
    """Classify one single-mode observation as OLD, NEW, or IGNORE."""
    if tc.mode is not Mode.SINGLE:
        raise ValueError("infer_outcome expects a single-mode test case")
    if obs.test_relation is not tc.relation:
        raise ValueError(
            f"observation is for {obs.test_relation.value}, "
            f"test case is for {tc.relation.value}"
        )
    if obs.no_output:
        return Outcome.IGNORE
    specs = tc.overlap_specs()
    assert len(specs) == 1
    relation, region = specs[0]
    return _region_outcome(tc, relation, region, obs.payload)


def infer_region_outcomes(
    tc: TestCase, payload: bytes | None
) -> dict[AllenRelation, Outcome]:
    """Per-region outcomes of a multiple-mode observation, same rule."""
    if payload is None:
        return {relation: Outcome.IGNORE for relation, _ in tc.overlap_specs()}
    return {
        relation: _region_outcome(tc, relation, region, payload)
        for relation, region in tc.overlap_specs()
    }


def infer_policy(
    observations: Mapping[AllenRelation, Observation],
    testcases: Mapping[AllenRelation, TestCase],
    name: str = "inferred",
) -> PolicyTable:
    """Deduce a complete single-mode policy table from nine observations."""
    missing = [r.value for r in OVERLAP_ORDER if r not in observations]
    if missing:
        raise MissingRelationError(
            "missing relation observation(s): " + ", ".join(missing)
        )
    missing_tc = [r.value for r in OVERLAP_ORDER if r not in testcases]
    if missing_tc:
        raise MissingRelationError(
            "missing relation test case(s): " + ", ".join(missing_tc)
        )
    protocols = {testcases[r].protocol for r in OVERLAP_ORDER}
    if len(protocols) != 1:
        raise ValueError("test cases span multiple protocols")
    protocol = protocols.pop()
    entries: dict[PolicyKey, Outcome] = {}
    for relation in OVERLAP_ORDER:
        entries[(protocol, Mode.SINGLE, relation)] = infer_outcome(
            testcases[relation], observations[relation]
        )
    return PolicyTable(name=name, entries=entries)


def observations_to_dict(
    protocol: Protocol, observations: Mapping[AllenRelation, Observation]
) -> dict:
    return {
        "protocol": protocol.value,
        "mode": Mode.SINGLE.value,
        "observations": [
            {
                "relation": relation.value,
                "payload_hex": obs.payload.hex() if obs.payload is not None else None,
            }
            for relation, obs in sorted(
                observations.items(), key=lambda kv: OVERLAP_ORDER.index(kv[0])
            )
        ],
    }


def observations_from_dict(doc: Mapping) -> tuple[Protocol, dict[AllenRelation, Observation]]:
    protocol = Protocol(doc["protocol"])
    out: dict[AllenRelation, Observation] = {}
    for item in doc["observations"]:
        relation = AllenRelation(item["relation"])
        payload_hex = item.get("payload_hex")
        payload = bytes.fromhex(payload_hex) if payload_hex is not None else None
        out[relation] = Observation(relation, payload)
    return protocol, out


def observations_from_json(text: str) -> tuple[Protocol, dict[AllenRelation, Observation]]:
    return observations_from_dict(json.loads(text))
