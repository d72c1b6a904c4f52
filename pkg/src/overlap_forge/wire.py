"""Bit-exact IPv4/IPv6/TCP frame encoding, pcap I/O, and parse-back.

Chunk offsets map onto the wire as follows: the chunk starting at offset 0
carries the 8-byte ICMP/ICMPv6 echo header in front of its data and goes out
at fragment offset 0; every other chunk's fragment-offset field is
``(chunk.start + 8) / 8``.  For TCP, chunk offset 0 is the first stream byte
after the synthetic handshake (sequence ISN + 1).

The echo checksum is computed over the full reassembled message; because the
overlap markers are checksum-neutral, the one value in the header fragment is
valid for both the oldest-preferred and newest-preferred reassemblies.
"""

from __future__ import annotations

import ipaddress
import struct
from dataclasses import dataclass, replace
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence

from .chunks import TAG_MF_UNSET, Chunk, ChunkSequence, Protocol
from .engine import Outcome
from .errors import DecodingError, EncodingError, PcapFormatError
from .generator import TestCase
from .intervals import ByteInterval

ECHO_HEADER_LEN = 8      # ICMP/ICMPv6 echo request header in front of chunk space
ETHERTYPE_IPV4 = 0x0800
ETHERTYPE_IPV6 = 0x86DD
IPPROTO_ICMP = 1
IPPROTO_TCP = 6
IPPROTO_IPV6_FRAGMENT = 44
IPPROTO_ICMPV6 = 58
ICMP_ECHO_REQUEST = 8
ICMP_ECHO_REPLY = 0
ICMPV6_ECHO_REQUEST = 128
ICMPV6_ECHO_REPLY = 129

TCP_FLAG_SYN = 0x02
TCP_FLAG_ACK = 0x10
TCP_FLAG_PSH = 0x08

PCAP_MAGIC = 0xA1B2C3D4
PCAP_LINKTYPE_ETHERNET = 1

#: Synthetic capture timestamps advance by this many microseconds per frame.
TIMESTAMP_STRIDE_US = 1000


def internet_checksum(data: bytes) -> int:
    """RFC 1071 checksum: ones'-complement of the ones'-complement 16-bit sum.

    Odd-length input is padded with a zero byte.
    """
    return ones_complement_sum(data) ^ 0xFFFF


def ones_complement_sum(data: bytes) -> int:
    """Folded 16-bit ones'-complement sum of big-endian words."""
    if len(data) % 2:
        data += b"\x00"
    total = sum(struct.unpack(f"!{len(data) // 2}H", data)) if data else 0
    while total > 0xFFFF:
        total = (total & 0xFFFF) + (total >> 16)
    return total


@dataclass(frozen=True, slots=True)
class Frame:
    """One link-layer frame and its synthetic capture timestamp."""

    data: bytes
    timestamp_us: int = 0


@dataclass(frozen=True)
class NetConfig:
    """Addresses and identifiers for frame encoding."""

    src_ip: str = "192.168.0.1"
    dst_ip: str = "192.168.0.2"
    src_mac: str = "02:00:00:00:00:01"
    dst_mac: str = "02:00:00:00:00:02"
    ip_id: int = 0x4242
    sport: int = 49152
    dport: int = 7
    isn: int = 0x1000
    server_isn: int = 0x2000
    icmp_id: int = 0x0042
    icmp_seq: int = 0

    @classmethod
    def for_protocol(cls, protocol: Protocol, **overrides) -> "NetConfig":
        """Defaults adjusted to the protocol's address family."""
        if protocol is Protocol.IPV6:
            overrides.setdefault("src_ip", "fd00::1")
            overrides.setdefault("dst_ip", "fd00::2")
        return cls(**overrides)

    def address_family(self) -> int:
        src = ipaddress.ip_address(self.src_ip)
        dst = ipaddress.ip_address(self.dst_ip)
        if src.version != dst.version:
            raise EncodingError(
                f"mixed address families: {self.src_ip} vs {self.dst_ip}"
            )
        return src.version

    def require_family(self, version: int) -> None:
        family = self.address_family()
        if family != version:
            raise EncodingError(
                f"IPv{version} test case needs IPv{version} addresses, "
                f"got IPv{family} ({self.src_ip} -> {self.dst_ip})"
            )


def _mac_bytes(text: str) -> bytes:
    parts = text.split(":")
    if len(parts) != 6:
        raise EncodingError(f"bad MAC address {text!r}")
    try:
        return bytes(int(p, 16) for p in parts)
    except ValueError:
        raise EncodingError(f"bad MAC address {text!r}") from None


def _ether_header(cfg: NetConfig, ethertype: int) -> bytes:
    return _mac_bytes(cfg.dst_mac) + _mac_bytes(cfg.src_mac) + struct.pack("!H", ethertype)


def _ipv4_header(
    cfg: NetConfig, payload_len: int, proto: int, mf: bool, offset_units: int,
    ip_id: int | None = None,
) -> bytes:
    flags_frag = (0x2000 if mf else 0) | (offset_units & 0x1FFF)
    header = struct.pack(
        "!BBHHHBBH4s4s",
        0x45,
        0,
        20 + payload_len,
        (cfg.ip_id if ip_id is None else ip_id) & 0xFFFF,
        flags_frag,
        64,
        proto,
        0,
        ipaddress.IPv4Address(cfg.src_ip).packed,
        ipaddress.IPv4Address(cfg.dst_ip).packed,
    )
    checksum = internet_checksum(header)
    return header[:10] + struct.pack("!H", checksum) + header[12:]


def _ipv6_header(cfg: NetConfig, payload_len: int, next_header: int) -> bytes:
    return struct.pack(
        "!IHBB16s16s",
        0x60000000,
        payload_len,
        next_header,
        64,
        ipaddress.IPv6Address(cfg.src_ip).packed,
        ipaddress.IPv6Address(cfg.dst_ip).packed,
    )


def _ipv6_pseudo_header(cfg: NetConfig, length: int, next_header: int) -> bytes:
    return (
        ipaddress.IPv6Address(cfg.src_ip).packed
        + ipaddress.IPv6Address(cfg.dst_ip).packed
        + struct.pack("!I3xB", length, next_header)
    )


def _ipv4_pseudo_header(cfg: NetConfig, length: int, proto: int) -> bytes:
    return (
        ipaddress.IPv4Address(cfg.src_ip).packed
        + ipaddress.IPv4Address(cfg.dst_ip).packed
        + struct.pack("!BBH", 0, proto, length)
    )


def reference_payload(tc: TestCase) -> bytes:
    """The reassembled data area used to fix the echo checksum.

    The oldest-preferred expected payload is used; checksum-neutral markers
    make its checksum equal to the newest-preferred variant's.
    """
    payload = tc.expected_markers.get(Outcome.OLD)
    if payload is None:
        raise EncodingError("test case has no expected OLD payload")
    return payload


def _echo_header(icmp_type: int, checksum: int, ident: int, seq: int) -> bytes:
    return struct.pack("!BBHHH", icmp_type, 0, checksum, ident, seq)


def _stamp(frames: Iterable[bytes]) -> list[Frame]:
    return [
        Frame(data=data, timestamp_us=i * TIMESTAMP_STRIDE_US)
        for i, data in enumerate(frames)
    ]


def _check_ip_alignment(seq: ChunkSequence) -> None:
    for chunk in seq.chunks:
        if chunk.start % 8:
            raise EncodingError(
                f"fragment data must start on an 8-byte boundary, "
                f"chunk {chunk.interval} does not"
            )
        if chunk.interval.length % 8 and not chunk.has_tag(TAG_MF_UNSET):
            raise EncodingError(
                f"non-final fragment length must be a multiple of 8, "
                f"chunk {chunk.interval} is not"
            )


def encode_ipv4(tc: TestCase, cfg: NetConfig | None = None) -> list[Frame]:
    """One Ethernet/IPv4 fragment frame per chunk, in arrival order."""
    if tc.protocol is not Protocol.IPV4:
        raise EncodingError(f"expected an ipv4 test case, got {tc.protocol.value}")
    cfg = cfg or NetConfig.for_protocol(Protocol.IPV4)
    cfg.require_family(4)
    _check_ip_alignment(tc.sequence)

    message = reference_payload(tc)
    if ECHO_HEADER_LEN + len(message) + 20 > 65535:
        raise EncodingError("reassembled datagram exceeds 65535 bytes")
    header_wo_ck = _echo_header(ICMP_ECHO_REQUEST, 0, cfg.icmp_id, cfg.icmp_seq)
    icmp_ck = internet_checksum(header_wo_ck + message)
    echo_header = _echo_header(ICMP_ECHO_REQUEST, icmp_ck, cfg.icmp_id, cfg.icmp_seq)

    frames = []
    for chunk in tc.sequence.chunks:
        if chunk.start == 0:
            payload = echo_header + chunk.payload
            offset_units = 0
        else:
            payload = chunk.payload
            offset_units = (chunk.start + ECHO_HEADER_LEN) // 8
        mf = not chunk.has_tag(TAG_MF_UNSET)
        packet = _ipv4_header(cfg, len(payload), IPPROTO_ICMP, mf, offset_units) + payload
        frames.append(_ether_header(cfg, ETHERTYPE_IPV4) + packet)
    return _stamp(frames)


def encode_ipv6(tc: TestCase, cfg: NetConfig | None = None) -> list[Frame]:
    """One Ethernet/IPv6 frame per chunk, using the Fragment extension header."""
    if tc.protocol is not Protocol.IPV6:
        raise EncodingError(f"expected an ipv6 test case, got {tc.protocol.value}")
    cfg = cfg or NetConfig.for_protocol(Protocol.IPV6)
    cfg.require_family(6)
    _check_ip_alignment(tc.sequence)

    message = reference_payload(tc)
    total_len = ECHO_HEADER_LEN + len(message)
    header_wo_ck = _echo_header(ICMPV6_ECHO_REQUEST, 0, cfg.icmp_id, cfg.icmp_seq)
    icmp_ck = internet_checksum(
        _ipv6_pseudo_header(cfg, total_len, IPPROTO_ICMPV6) + header_wo_ck + message
    )
    echo_header = _echo_header(ICMPV6_ECHO_REQUEST, icmp_ck, cfg.icmp_id, cfg.icmp_seq)

    frames = []
    for chunk in tc.sequence.chunks:
        if chunk.start == 0:
            fragment_data = echo_header + chunk.payload
            offset_units = 0
        else:
            fragment_data = chunk.payload
            offset_units = (chunk.start + ECHO_HEADER_LEN) // 8
        m_flag = 0 if chunk.has_tag(TAG_MF_UNSET) else 1
        frag_header = struct.pack(
            "!BBHI",
            IPPROTO_ICMPV6,
            0,
            (offset_units << 3) | m_flag,
            cfg.ip_id & 0xFFFFFFFF,
        )
        packet = (
            _ipv6_header(cfg, 8 + len(fragment_data), IPPROTO_IPV6_FRAGMENT)
            + frag_header
            + fragment_data
        )
        frames.append(_ether_header(cfg, ETHERTYPE_IPV6) + packet)
    return _stamp(frames)


def _tcp_segment(
    cfg: NetConfig,
    family: int,
    from_client: bool,
    seq: int,
    ack: int,
    flags: int,
    payload: bytes,
    ip_id: int,
) -> bytes:
    if from_client:
        endpoint = cfg
    else:
        endpoint = replace(
            cfg,
            src_ip=cfg.dst_ip,
            dst_ip=cfg.src_ip,
            src_mac=cfg.dst_mac,
            dst_mac=cfg.src_mac,
            sport=cfg.dport,
            dport=cfg.sport,
        )
    header_wo_ck = struct.pack(
        "!HHIIBBHHH",
        endpoint.sport,
        endpoint.dport,
        seq & 0xFFFFFFFF,
        ack & 0xFFFFFFFF,
        5 << 4,
        flags,
        65535,
        0,
        0,
    )
    segment_len = len(header_wo_ck) + len(payload)
    if family == 4:
        pseudo = _ipv4_pseudo_header(endpoint, segment_len, IPPROTO_TCP)
    else:
        pseudo = _ipv6_pseudo_header(endpoint, segment_len, IPPROTO_TCP)
    ck = internet_checksum(pseudo + header_wo_ck + payload)
    tcp = header_wo_ck[:16] + struct.pack("!H", ck) + header_wo_ck[18:] + payload
    if family == 4:
        ip = _ipv4_header(endpoint, len(tcp), IPPROTO_TCP, mf=False, offset_units=0, ip_id=ip_id)
        return _ether_header(endpoint, ETHERTYPE_IPV4) + ip + tcp
    ip = _ipv6_header(endpoint, len(tcp), IPPROTO_TCP)
    return _ether_header(endpoint, ETHERTYPE_IPV6) + ip + tcp


def encode_tcp(tc: TestCase, cfg: NetConfig | None = None) -> list[Frame]:
    """Synthetic three-way handshake followed by one data segment per chunk.

    Data sequence numbers are ISN + 1 + chunk.start; each segment carries a
    valid checksum over its own bytes.  The handshake is included so NIDSes
    replaying the capture establish flow state.
    """
    if tc.protocol is not Protocol.TCP:
        raise EncodingError(f"expected a tcp test case, got {tc.protocol.value}")
    cfg = cfg or NetConfig.for_protocol(Protocol.TCP)
    family = cfg.address_family()

    stream_end = tc.sequence.max_end
    if cfg.isn < 0 or cfg.isn > 0xFFFFFFFF:
        raise EncodingError("initial sequence number must fit in 32 bits")
    if cfg.isn + 1 + stream_end > 0xFFFFFFFF:
        raise EncodingError(
            f"sequence space wraparound unsupported: ISN {cfg.isn:#x} + stream "
            f"length {stream_end} overflows 32 bits"
        )

    frames = [
        _tcp_segment(cfg, family, True, cfg.isn, 0, TCP_FLAG_SYN, b"", cfg.ip_id),
        _tcp_segment(
            cfg, family, False, cfg.server_isn, cfg.isn + 1,
            TCP_FLAG_SYN | TCP_FLAG_ACK, b"", cfg.ip_id + 1,
        ),
        _tcp_segment(
            cfg, family, True, cfg.isn + 1, cfg.server_isn + 1,
            TCP_FLAG_ACK, b"", cfg.ip_id + 2,
        ),
    ]
    for i, chunk in enumerate(tc.sequence.chunks):
        frames.append(
            _tcp_segment(
                cfg,
                family,
                True,
                cfg.isn + 1 + chunk.start,
                cfg.server_isn + 1,
                TCP_FLAG_PSH | TCP_FLAG_ACK,
                chunk.payload,
                cfg.ip_id + 3 + i,
            )
        )
    return _stamp(frames)


def encode(tc: TestCase, cfg: NetConfig | None = None) -> list[Frame]:
    """Dispatch to the protocol's encoder."""
    if tc.protocol is Protocol.IPV4:
        return encode_ipv4(tc, cfg)
    if tc.protocol is Protocol.IPV6:
        return encode_ipv6(tc, cfg)
    return encode_tcp(tc, cfg)


# ---------------------------------------------------------------------------
# Parse-back


def verify_ipv4_header(header: bytes) -> None:
    if ones_complement_sum(header) != 0xFFFF:
        raise DecodingError("IPv4 header checksum does not verify")


def _parse_ipv4(packet: bytes) -> tuple[int, int, bool, int, bytes]:
    """-> (proto, offset_units, mf, ip_id, payload)"""
    if len(packet) < 20:
        raise DecodingError("truncated IPv4 header")
    ihl = (packet[0] & 0x0F) * 4
    verify_ipv4_header(packet[:ihl])
    total_len, ip_id, flags_frag = struct.unpack("!HHH", packet[2:8])
    if total_len < ihl or total_len > len(packet):
        raise DecodingError("truncated IPv4 packet")
    proto = packet[9]
    mf = bool(flags_frag & 0x2000)
    offset_units = flags_frag & 0x1FFF
    return proto, offset_units, mf, ip_id, packet[ihl:total_len]


def _parse_ipv6_fragment(packet: bytes) -> tuple[int, int, bool, bytes]:
    """-> (next_header, offset_units, m_flag, fragment_data)"""
    if len(packet) < 48:
        raise DecodingError("truncated IPv6 fragment packet")
    payload_len, next_header = struct.unpack("!HB", packet[4:7])
    if next_header != IPPROTO_IPV6_FRAGMENT:
        raise DecodingError(
            f"expected a Fragment extension header (44), got next-header {next_header}"
        )
    if 40 + payload_len > len(packet) or payload_len < 8:
        raise DecodingError("truncated IPv6 packet")
    frag_next, _res, off_flags = struct.unpack("!BBH", packet[40:44])
    offset_units = off_flags >> 3
    m_flag = bool(off_flags & 1)
    data = packet[48 : 40 + payload_len]
    return frag_next, offset_units, m_flag, data


def _fragment_chunk(
    offset_units: int, mf: bool, data: bytes, arrival: int, echo_type: int
) -> Chunk:
    """Rebuild the chunk a fragment carries, stripping the echo header at offset 0."""
    tags = () if mf else (TAG_MF_UNSET,)
    if offset_units == 0:
        if len(data) < ECHO_HEADER_LEN:
            raise DecodingError("offset-0 fragment too short for an echo header")
        if data[0] != echo_type:
            raise DecodingError(
                f"expected echo type {echo_type}, got {data[0]} at offset 0"
            )
        chunk_data = data[ECHO_HEADER_LEN:]
        start = 0
    else:
        chunk_data = data
        start = offset_units * 8 - ECHO_HEADER_LEN
        if start < 0:
            raise DecodingError(f"fragment offset {offset_units} inside echo header")
    return Chunk(
        interval=ByteInterval(start, start + len(chunk_data)),
        payload=chunk_data,
        arrival_index=arrival,
        tags=tags,
    )


def parse_frames(frames: Sequence[Frame]) -> ChunkSequence:
    """Reconstruct the chunk sequence carried by encoded frames.

    Handshake and other data-less TCP segments are skipped; fragment offsets
    map back through the echo-header shift; the MF/M-unset fragment's chunk is
    tagged ``mf-unset``.
    """
    if not frames:
        raise DecodingError("no frames to parse")
    chunks: list[Chunk] = []
    protocol: Protocol | None = None
    client_isn: int | None = None

    for frame in frames:
        data = frame.data
        if len(data) < 14:
            raise DecodingError("truncated Ethernet frame")
        ethertype = struct.unpack("!H", data[12:14])[0]
        packet = data[14:]
        if ethertype == ETHERTYPE_IPV4:
            proto, offset_units, mf, _ip_id, payload = _parse_ipv4(packet)
            if proto == IPPROTO_ICMP:
                protocol = _expect_protocol(protocol, Protocol.IPV4)
                chunks.append(
                    _fragment_chunk(offset_units, mf, payload, len(chunks), ICMP_ECHO_REQUEST)
                )
                continue
            if proto != IPPROTO_TCP:
                raise DecodingError(f"unsupported IPv4 protocol {proto}")
            protocol = _expect_protocol(protocol, Protocol.TCP)
            client_isn = _collect_tcp_chunk(payload, chunks, client_isn)
        elif ethertype == ETHERTYPE_IPV6:
            if len(packet) >= 40 and packet[6] == IPPROTO_TCP:
                protocol = _expect_protocol(protocol, Protocol.TCP)
                payload_len = struct.unpack("!H", packet[4:6])[0]
                client_isn = _collect_tcp_chunk(
                    packet[40 : 40 + payload_len], chunks, client_isn
                )
                continue
            frag_next, offset_units, m_flag, frag_data = _parse_ipv6_fragment(packet)
            if frag_next != IPPROTO_ICMPV6:
                raise DecodingError(f"unsupported IPv6 next-header {frag_next}")
            protocol = _expect_protocol(protocol, Protocol.IPV6)
            chunks.append(
                _fragment_chunk(
                    offset_units, m_flag, frag_data, len(chunks), ICMPV6_ECHO_REQUEST
                )
            )
        else:
            raise DecodingError(f"unsupported ethertype {ethertype:#06x}")

    if protocol is None or not chunks:
        raise DecodingError("frames carried no chunks")
    return ChunkSequence(protocol=protocol, chunks=tuple(chunks))


def _expect_protocol(seen: Protocol | None, now: Protocol) -> Protocol:
    if seen is not None and seen is not now:
        raise DecodingError(f"mixed protocols in capture: {seen.value} and {now.value}")
    return now


def _collect_tcp_chunk(
    segment: bytes, chunks: list[Chunk], client_isn: int | None
) -> int | None:
    if len(segment) < 20:
        raise DecodingError("truncated TCP header")
    sport, dport, seq, _ack, data_offset_flags = struct.unpack("!HHIIH", segment[:14])
    flags = data_offset_flags & 0x3F
    header_len = ((data_offset_flags >> 12) & 0xF) * 4
    payload = segment[header_len:]
    if flags & TCP_FLAG_SYN:
        if client_isn is None:
            return seq  # client SYN fixes the ISN; the SYN-ACK is ignored
        return client_isn
    if not payload:
        return client_isn
    if client_isn is None:
        raise DecodingError("data segment seen before the client SYN")
    start = seq - client_isn - 1
    if start < 0:
        raise DecodingError(f"sequence number {seq} precedes the first stream byte")
    chunks.append(
        Chunk(
            interval=ByteInterval(start, start + len(payload)),
            payload=payload,
            arrival_index=len(chunks),
        )
    )
    return client_isn


def encode_echo_reply(
    protocol: Protocol,
    payload: bytes,
    cfg: NetConfig | None = None,
    timestamp_us: int = 0,
) -> Frame:
    """One unfragmented echo-reply frame carrying ``payload`` after the header.

    Models what a host that reassembled a test case sends back; useful for
    building observation captures that feed the inference engine.
    """
    if protocol is Protocol.TCP:
        raise EncodingError("echo replies are only defined for the IP protocols")
    cfg = cfg or NetConfig.for_protocol(protocol)
    # The reply travels host -> tester.
    reply_cfg = replace(
        cfg,
        src_ip=cfg.dst_ip,
        dst_ip=cfg.src_ip,
        src_mac=cfg.dst_mac,
        dst_mac=cfg.src_mac,
    )
    if protocol is Protocol.IPV4:
        reply_cfg.require_family(4)
        header_wo_ck = _echo_header(ICMP_ECHO_REPLY, 0, cfg.icmp_id, cfg.icmp_seq)
        ck = internet_checksum(header_wo_ck + payload)
        message = _echo_header(ICMP_ECHO_REPLY, ck, cfg.icmp_id, cfg.icmp_seq) + payload
        packet = _ipv4_header(
            reply_cfg, len(message), IPPROTO_ICMP, mf=False, offset_units=0
        ) + message
        return Frame(_ether_header(reply_cfg, ETHERTYPE_IPV4) + packet, timestamp_us)
    reply_cfg.require_family(6)
    header_wo_ck = _echo_header(ICMPV6_ECHO_REPLY, 0, cfg.icmp_id, cfg.icmp_seq)
    total_len = ECHO_HEADER_LEN + len(payload)
    ck = internet_checksum(
        _ipv6_pseudo_header(reply_cfg, total_len, IPPROTO_ICMPV6)
        + header_wo_ck
        + payload
    )
    message = _echo_header(ICMPV6_ECHO_REPLY, ck, cfg.icmp_id, cfg.icmp_seq) + payload
    packet = _ipv6_header(reply_cfg, len(message), IPPROTO_ICMPV6) + message
    return Frame(_ether_header(reply_cfg, ETHERTYPE_IPV6) + packet, timestamp_us)


def extract_echo_replies(frames: Sequence[Frame]) -> list[tuple[int, bytes]]:
    """(echo sequence number, data after the echo header) per unfragmented
    ICMP/ICMPv6 echo reply frame, in capture order."""
    replies: list[tuple[int, bytes]] = []
    for frame in frames:
        data = frame.data
        if len(data) < 14:
            continue
        ethertype = struct.unpack("!H", data[12:14])[0]
        packet = data[14:]
        if ethertype == ETHERTYPE_IPV4 and len(packet) >= 20:
            proto, offset_units, mf, _ip_id, payload = _parse_ipv4(packet)
            if proto != IPPROTO_ICMP or mf or offset_units:
                continue
            if len(payload) >= 8 and payload[0] == ICMP_ECHO_REPLY:
                seq = struct.unpack("!H", payload[6:8])[0]
                replies.append((seq, payload[8:]))
        elif ethertype == ETHERTYPE_IPV6 and len(packet) >= 40:
            payload_len, next_header = struct.unpack("!HB", packet[4:7])
            if next_header != IPPROTO_ICMPV6:
                continue
            payload = packet[40 : 40 + payload_len]
            if len(payload) >= 8 and payload[0] == ICMPV6_ECHO_REPLY:
                seq = struct.unpack("!H", payload[6:8])[0]
                replies.append((seq, payload[8:]))
    return replies


def hexdump(frames: Sequence[Frame]) -> str:
    """Frames as an offset/hex/ASCII listing, for documentation and diffing."""
    lines: list[str] = []
    for index, frame in enumerate(frames):
        lines.append(f"frame {index} ({len(frame.data)} bytes, t={frame.timestamp_us}us)")
        for off in range(0, len(frame.data), 16):
            row = frame.data[off : off + 16]
            hexes = " ".join(f"{b:02x}" for b in row)
            text = "".join(chr(b) if 32 <= b < 127 else "." for b in row)
            lines.append(f"  {off:04x}  {hexes:<47}  {text}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# pcap (classic format, little-endian, microsecond timestamps)

_GLOBAL_HEADER = struct.Struct("<IHHiIII")
_RECORD_HEADER = struct.Struct("<IIII")


def write_pcap(frames: Sequence[Frame], destination: str | Path | BinaryIO) -> None:
    """Write frames as a classic pcap file (magic 0xa1b2c3d4, Ethernet)."""
    payload = bytearray(
        _GLOBAL_HEADER.pack(PCAP_MAGIC, 2, 4, 0, 0, 65535, PCAP_LINKTYPE_ETHERNET)
    )
    for frame in frames:
        ts_sec, ts_usec = divmod(frame.timestamp_us, 1_000_000)
        payload += _RECORD_HEADER.pack(ts_sec, ts_usec, len(frame.data), len(frame.data))
        payload += frame.data
    if hasattr(destination, "write"):
        destination.write(bytes(payload))
    else:
        Path(destination).write_bytes(bytes(payload))


def read_pcap(source: str | Path | BinaryIO) -> list[Frame]:
    """Read a classic pcap file; byte-swapped (opposite-endian) files are accepted."""
    if hasattr(source, "read"):
        blob = source.read()
    else:
        blob = Path(source).read_bytes()
    if len(blob) < _GLOBAL_HEADER.size:
        raise PcapFormatError("truncated pcap global header")
    magic_le = struct.unpack("<I", blob[:4])[0]
    if magic_le == PCAP_MAGIC:
        endian = "<"
    elif struct.unpack(">I", blob[:4])[0] == PCAP_MAGIC:
        endian = ">"
    else:
        raise PcapFormatError(f"unknown pcap magic {magic_le:#010x}")
    header = struct.Struct(f"{endian}IHHiIII")
    _magic, _vmaj, _vmin, _zone, _sigfigs, _snaplen, network = header.unpack(
        blob[: header.size]
    )
    if network != PCAP_LINKTYPE_ETHERNET:
        raise PcapFormatError(f"unsupported link type {network}")
    record = struct.Struct(f"{endian}IIII")
    frames: list[Frame] = []
    pos = header.size
    while pos < len(blob):
        if pos + record.size > len(blob):
            raise PcapFormatError("truncated pcap record header")
        ts_sec, ts_usec, incl_len, _orig_len = record.unpack(
            blob[pos : pos + record.size]
        )
        pos += record.size
        if pos + incl_len > len(blob):
            raise PcapFormatError("truncated pcap record data")
        frames.append(
            Frame(
                data=blob[pos : pos + incl_len],
                timestamp_us=ts_sec * 1_000_000 + ts_usec,
            )
        )
        pos += incl_len
    return frames
