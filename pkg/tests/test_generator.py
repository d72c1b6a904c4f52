"""Test-case generation: geometry, marker patterns, single and composite builds."""

import pytest

from overlap_forge.chunks import (
    TAG_MF_UNSET,
    TAG_TRIGGER,
    Mode,
    Protocol,
    relation_pairs,
)
from overlap_forge.engine import Outcome, constant_policy, reassemble
from overlap_forge.errors import NonOverlappingRelationError
from overlap_forge.generator import (
    GeneratorConfig,
    TestCase,
    build_multiple,
    build_single,
    canonical_geometry,
    make_pattern,
)
from overlap_forge.intervals import (
    OVERLAP_ORDER,
    AllenRelation,
    ByteInterval,
    is_overlapping,
    relate,
)
from overlap_forge.wire import internet_checksum

R = AllenRelation
ALL_PROTOCOLS = list(Protocol)


class TestCanonicalGeometry:
    @pytest.mark.parametrize(
        "relation, x, y",
        [
            (R.Eq, (8, 24), (8, 24)),
            (R.O, (8, 24), (16, 32)),
            (R.Oi, (16, 32), (8, 24)),
            (R.D, (16, 24), (8, 32)),
            (R.Fi, (8, 24), (16, 24)),
        ],
    )
    def test_pinned_offsets(self, relation, x, y):
        assert canonical_geometry(relation, 8, 8) == (ByteInterval(*x), ByteInterval(*y))

    @pytest.mark.parametrize("relation", OVERLAP_ORDER)
    @pytest.mark.parametrize("unit, base", [(8, 8), (4, 8), (2, 2), (16, 32)])
    def test_relate_round_trip(self, relation, unit, base):
        x, y = canonical_geometry(relation, unit, base)
        assert relate(x, y) is relation
        for endpoint in (x.start, x.end, y.start, y.end):
            assert endpoint % unit == 0

    @pytest.mark.parametrize("relation", [R.B, R.Bi, R.M, R.Mi])
    def test_non_overlapping_rejected(self, relation):
        with pytest.raises(NonOverlappingRelationError):
            canonical_geometry(relation, 8, 8)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            canonical_geometry(R.Eq, 1, 8)
        with pytest.raises(ValueError):
            canonical_geometry(R.Eq, 8, 4)


class TestMakePattern:
    def test_length_8(self):
        p = make_pattern(8)
        assert p.old_marker == b"AABBCCDD"
        assert p.new_marker == b"DDCCBBAA"

    def test_length_4(self):
        p = make_pattern(4)
        assert p.old_marker == b"AABB"
        assert p.new_marker == b"BBAA"

    def test_checksum_neutral(self):
        for length in (4, 6, 8, 12, 16, 32):
            p = make_pattern(length)
            assert internet_checksum(p.old_marker) == internet_checksum(p.new_marker)

    def test_markers_differ(self):
        for length in (4, 8, 16):
            p = make_pattern(length)
            assert p.old_marker != p.new_marker

    def test_rotation_shifts_alphabet(self):
        p = make_pattern(8, rotation=1)
        assert p.old_marker == b"BBCCDDEE"

    def test_odd_length_rejected(self):
        with pytest.raises(ValueError):
            make_pattern(7)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            make_pattern(2)

    def test_alphabet_exhaustion_rejected(self):
        with pytest.raises(ValueError):
            make_pattern(10, alphabet="ABC")


class TestBuildSingle:
    def test_ipv4_eq_structure(self):
        tc = build_single(Protocol.IPV4, R.Eq)
        intervals = [(c.start, c.end) for c in tc.sequence.chunks]
        assert intervals == [(0, 8), (8, 24), (8, 24), (24, 32)]
        last = tc.sequence.chunks[-1]
        assert last.has_tag(TAG_MF_UNSET) and last.has_tag(TAG_TRIGGER)
        assert sum(c.has_tag(TAG_MF_UNSET) for c in tc.sequence.chunks) == 1
        # Expected outputs carry the marker pair on the contested bytes.
        assert tc.expected_markers[Outcome.OLD][8:24] == b"AABBCCDDEEFFGGHH"
        assert tc.expected_markers[Outcome.NEW][8:24] == b"HHGGFFEEDDCCBBAA"
        assert tc.expected_markers[Outcome.IGNORE] is None

    def test_tcp_o_structure_with_unit_8(self):
        tc = build_single(Protocol.TCP, R.O, GeneratorConfig(unit=8, base=8))
        intervals = [(c.start, c.end) for c in tc.sequence.chunks]
        assert intervals == [(8, 24), (16, 32), (0, 8)]
        assert tc.sequence.chunks[-1].has_tag(TAG_TRIGGER)

    def test_tcp_default_unit_is_4(self):
        tc = build_single(Protocol.TCP, R.O)
        assert tc.config.unit == 4
        intervals = [(c.start, c.end) for c in tc.sequence.chunks]
        assert intervals == [(8, 16), (12, 20), (0, 8)]

    @pytest.mark.parametrize("relation", [R.B, R.Bi, R.M, R.Mi])
    def test_non_overlapping_rejected(self, relation):
        with pytest.raises(NonOverlappingRelationError):
            build_single(Protocol.IPV4, relation)

    @pytest.mark.parametrize("protocol", ALL_PROTOCOLS)
    @pytest.mark.parametrize("relation", OVERLAP_ORDER)
    def test_exactly_one_overlapping_pair(self, protocol, relation):
        tc = build_single(protocol, relation)
        assert tc.relations_under_test == (relation,)
        overlapping = [
            (i, j, r)
            for i, j, r in relation_pairs(tc.sequence)
            if is_overlapping(r)
        ]
        assert len(overlapping) == 1
        assert overlapping[0][2] is relation

    @pytest.mark.parametrize("protocol", [Protocol.IPV4, Protocol.IPV6])
    @pytest.mark.parametrize("relation", OVERLAP_ORDER)
    def test_ip_trigger_correctness(self, protocol, relation):
        tc = build_single(protocol, relation)
        chunks = tc.sequence.chunks
        mf_unset = [c for c in chunks if c.has_tag(TAG_MF_UNSET)]
        assert len(mf_unset) == 1
        trigger = mf_unset[0]
        assert trigger is chunks[-1]
        assert trigger.end == max(c.end for c in chunks)
        for c in chunks:
            assert c.start % 8 == 0 and c.end % 8 == 0

    @pytest.mark.parametrize("relation", OVERLAP_ORDER)
    def test_tcp_trigger_is_stream_head_sent_last(self, relation):
        tc = build_single(Protocol.TCP, relation)
        extra = tc.sequence.chunks[-1]
        assert extra.has_tag(TAG_TRIGGER)
        assert (extra.start, extra.end) == (0, tc.config.base)
        assert extra.arrival_index == max(c.arrival_index for c in tc.sequence.chunks)

    @pytest.mark.parametrize("protocol", ALL_PROTOCOLS)
    @pytest.mark.parametrize("relation", OVERLAP_ORDER)
    def test_markers_differ_exactly_on_overlap(self, protocol, relation):
        tc = build_single(protocol, relation)
        old = tc.expected_markers[Outcome.OLD]
        new = tc.expected_markers[Outcome.NEW]
        (_, region), = tc.overlap_specs()
        assert len(old) == len(new)
        assert old[region.start : region.end] != new[region.start : region.end]
        assert old[: region.start] == new[: region.start]
        assert old[region.end :] == new[region.end :]

    @pytest.mark.parametrize("protocol", ALL_PROTOCOLS)
    @pytest.mark.parametrize("relation", OVERLAP_ORDER)
    def test_expected_markers_match_engine(self, protocol, relation):
        tc = build_single(protocol, relation)
        for outcome in (Outcome.OLD, Outcome.NEW):
            result = reassemble(tc.sequence, constant_policy(outcome), Mode.SINGLE)
            assert result.completed
            assert result.payload == tc.expected_markers[outcome]

    def test_ip_rejects_misaligned_config(self):
        with pytest.raises(ValueError):
            build_single(Protocol.IPV4, R.Eq, GeneratorConfig(unit=4, base=8))


class TestBuildMultiple:
    @pytest.mark.parametrize("protocol", ALL_PROTOCOLS)
    def test_covers_all_nine_relations(self, protocol):
        tc = build_multiple(protocol)
        assert tc.mode is Mode.MULTIPLE
        assert tc.relations_under_test == OVERLAP_ORDER
        seen = {r for _, _, r in relation_pairs(tc.sequence) if is_overlapping(r)}
        assert seen == set(OVERLAP_ORDER)

    def test_ipv4_boundaries_are_8_byte_aligned(self):
        tc = build_multiple(Protocol.IPV4)
        for c in tc.sequence.chunks:
            assert c.start % 8 == 0 and c.end % 8 == 0

    @pytest.mark.parametrize("protocol", ALL_PROTOCOLS)
    def test_coverage_contiguous_from_zero(self, protocol):
        tc = build_multiple(protocol)
        covered = set()
        for c in tc.sequence.chunks:
            covered.update(range(c.start, c.end))
        assert covered == set(range(max(covered) + 1))

    @pytest.mark.parametrize("protocol", ALL_PROTOCOLS)
    def test_one_region_per_relation_with_distinct_spans(self, protocol):
        tc = build_multiple(protocol)
        specs = tc.overlap_specs()
        assert [r for r, _ in specs] == list(OVERLAP_ORDER)
        regions = [region for _, region in specs]
        for a, b in zip(regions, regions[1:]):
            assert a.end <= b.start  # regions are disjoint and ordered

    @pytest.mark.parametrize("protocol", ALL_PROTOCOLS)
    def test_expected_markers_match_engine(self, protocol):
        tc = build_multiple(protocol)
        for outcome in (Outcome.OLD, Outcome.NEW):
            result = reassemble(tc.sequence, constant_policy(outcome), Mode.MULTIPLE)
            assert result.completed
            assert result.payload == tc.expected_markers[outcome]

    def test_layout_version_recorded(self):
        tc = build_multiple(Protocol.IPV4)
        assert tc.sequence.metadata["layout"] == "composite-v1"


class TestTestCaseSerialization:
    @pytest.mark.parametrize("protocol", ALL_PROTOCOLS)
    def test_json_round_trip(self, protocol):
        for tc in (build_single(protocol, R.Oi), build_multiple(protocol)):
            restored = TestCase.from_json(tc.to_json())
            assert restored.protocol is tc.protocol
            assert restored.mode is tc.mode
            assert restored.relations_under_test == tc.relations_under_test
            assert restored.sequence == tc.sequence
            assert restored.expected_markers == tc.expected_markers
            assert restored.config == tc.config

    def test_relation_names_serialize_exactly(self):
        doc = build_single(Protocol.IPV4, R.Fi).to_dict()
        assert doc["relations"] == ["Fi"]
        assert doc["mode"] == "single"
        assert doc["expected_markers"]["ignore"] is None
