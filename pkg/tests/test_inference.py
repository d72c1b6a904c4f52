"""Policy inference: marker matching, anomalies, round trips."""

import random

import pytest

from overlap_forge.chunks import Mode, Protocol
from overlap_forge.engine import Outcome, PolicyTable, constant_policy, reassemble
from overlap_forge.errors import AnomalousObservationError, MissingRelationError
from overlap_forge.generator import build_multiple, build_single
from overlap_forge.inference import (
    Observation,
    infer_outcome,
    infer_policy,
    infer_region_outcomes,
    observations_from_json,
    observations_to_dict,
)
from overlap_forge.intervals import OVERLAP_ORDER, AllenRelation
from overlap_forge.registry import builtin_profiles

R = AllenRelation


def observe(table: PolicyTable, protocol: Protocol, testcases):
    out = {}
    for r in OVERLAP_ORDER:
        result = reassemble(testcases[r].sequence, table, Mode.SINGLE)
        out[r] = Observation(r, result.payload if result.completed else None)
    return out


@pytest.fixture(scope="module")
def ipv4_cases():
    return {r: build_single(Protocol.IPV4, r) for r in OVERLAP_ORDER}


class TestInferOutcome:
    def test_expected_old_payload(self, ipv4_cases):
        tc = ipv4_cases[R.O]
        obs = Observation(R.O, tc.expected_markers[Outcome.OLD])
        assert infer_outcome(tc, obs) is Outcome.OLD

    def test_expected_new_payload(self, ipv4_cases):
        tc = ipv4_cases[R.O]
        obs = Observation(R.O, tc.expected_markers[Outcome.NEW])
        assert infer_outcome(tc, obs) is Outcome.NEW

    def test_no_output_is_ignore(self, ipv4_cases):
        assert infer_outcome(ipv4_cases[R.Fi], Observation(R.Fi, None)) is Outcome.IGNORE

    def test_filler_on_overlap_region_is_anomalous(self, ipv4_cases):
        tc = ipv4_cases[R.Eq]
        corrupted = bytearray(tc.expected_markers[Outcome.OLD])
        corrupted[8:24] = b"X" * 16
        with pytest.raises(AnomalousObservationError) as exc:
            infer_outcome(tc, Observation(R.Eq, bytes(corrupted)))
        assert exc.value.observed == b"X" * 16
        assert exc.value.relation is R.Eq

    def test_truncated_payload_is_anomalous(self, ipv4_cases):
        tc = ipv4_cases[R.Eq]
        with pytest.raises(AnomalousObservationError):
            infer_outcome(tc, Observation(R.Eq, tc.expected_markers[Outcome.OLD][:10]))

    def test_padding_outside_region_is_tolerated(self, ipv4_cases):
        # Inference keys on the overlap region only.
        tc = ipv4_cases[R.Eq]
        padded = tc.expected_markers[Outcome.NEW] + b"\x00" * 13
        assert infer_outcome(tc, Observation(R.Eq, padded)) is Outcome.NEW

    def test_relation_mismatch_rejected(self, ipv4_cases):
        with pytest.raises(ValueError):
            infer_outcome(ipv4_cases[R.O], Observation(R.Oi, None))

    def test_multiple_mode_testcase_rejected(self):
        tc = build_multiple(Protocol.IPV4)
        with pytest.raises(ValueError):
            infer_outcome(tc, Observation(R.Eq, None))


class TestInferPolicy:
    @pytest.mark.parametrize("name", sorted(builtin_profiles()))
    def test_round_trip_builtin_fixtures(self, name):
        profile = builtin_profiles()[name]
        for protocol, mode in profile.coverage():
            if mode is not Mode.SINGLE:
                continue
            table = profile.table(protocol, mode)
            testcases = {r: build_single(protocol, r) for r in OVERLAP_ORDER}
            recovered = infer_policy(observe(table, protocol, testcases), testcases)
            assert recovered.row(protocol, Mode.SINGLE) == table.row(protocol, mode)

    def test_round_trip_random_tables(self, ipv4_cases):
        rng = random.Random(20260809)
        for _ in range(60):
            entries = {
                (Protocol.IPV4, Mode.SINGLE, r): rng.choice(list(Outcome))
                for r in OVERLAP_ORDER
            }
            table = PolicyTable("random", entries)
            recovered = infer_policy(observe(table, Protocol.IPV4, ipv4_cases), ipv4_cases)
            assert recovered.row(Protocol.IPV4, Mode.SINGLE) == table.row(
                Protocol.IPV4, Mode.SINGLE
            )

    def test_missing_relation_reported(self, ipv4_cases):
        observations = observe(
            constant_policy(Outcome.OLD), Protocol.IPV4, ipv4_cases
        )
        del observations[R.Si]
        with pytest.raises(MissingRelationError, match="Si"):
            infer_policy(observations, ipv4_cases)

    def test_inference_never_contradicts_markers(self, ipv4_cases):
        # Whatever outcome inference reports, the observed overlap bytes must
        # equal that outcome's marker.
        rng = random.Random(99)
        for _ in range(20):
            entries = {
                (Protocol.IPV4, Mode.SINGLE, r): rng.choice(list(Outcome))
                for r in OVERLAP_ORDER
            }
            table = PolicyTable("random", entries)
            observations = observe(table, Protocol.IPV4, ipv4_cases)
            recovered = infer_policy(observations, ipv4_cases)
            for r in OVERLAP_ORDER:
                outcome = recovered.outcome_for(Protocol.IPV4, Mode.SINGLE, r)
                obs = observations[r]
                if outcome is Outcome.IGNORE:
                    assert obs.no_output
                else:
                    (_, region), = ipv4_cases[r].overlap_specs()
                    assert (
                        obs.payload[region.start : region.end]
                        == ipv4_cases[r].marker_bytes(outcome, region)
                    )


class TestMultipleModeInference:
    @pytest.mark.parametrize("outcome", [Outcome.OLD, Outcome.NEW])
    def test_constant_policy_per_region(self, outcome):
        tc = build_multiple(Protocol.TCP)
        result = reassemble(tc.sequence, constant_policy(outcome), Mode.MULTIPLE)
        outcomes = infer_region_outcomes(tc, result.payload)
        assert set(outcomes) == set(OVERLAP_ORDER)
        assert all(o is outcome for o in outcomes.values())

    def test_no_output_is_all_ignore(self):
        tc = build_multiple(Protocol.IPV6)
        outcomes = infer_region_outcomes(tc, None)
        assert all(o is Outcome.IGNORE for o in outcomes.values())

    def test_mixed_policy_recovered_per_region(self):
        rng = random.Random(5)
        entries = {
            (Protocol.TCP, Mode.MULTIPLE, r): rng.choice([Outcome.OLD, Outcome.NEW])
            for r in OVERLAP_ORDER
        }
        table = PolicyTable("mixed", entries)
        tc = build_multiple(Protocol.TCP)
        result = reassemble(tc.sequence, table, Mode.MULTIPLE)
        outcomes = infer_region_outcomes(tc, result.payload)
        for r in OVERLAP_ORDER:
            assert outcomes[r] is entries[(Protocol.TCP, Mode.MULTIPLE, r)]


class TestObservationSerialization:
    def test_json_round_trip(self, ipv4_cases):
        observations = observe(
            builtin_profiles()["linux-6.1"].table(Protocol.IPV4, Mode.SINGLE),
            Protocol.IPV4,
            ipv4_cases,
        )
        doc = observations_to_dict(Protocol.IPV4, observations)
        protocol, restored = observations_from_json(__import__("json").dumps(doc))
        assert protocol is Protocol.IPV4
        assert restored == observations
