"""Command-line front end: generate, simulate, infer, diff, report.

Exit codes: 0 success/consistent, 1 inconsistency or failed expectation,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .analyzer import attack_surface, compare
from .chunks import Mode, Protocol
from .engine import IgnoreSemantics, Outcome, reassemble
from .errors import OverlapForgeError
from .generator import COMPOSITE_LAYOUT, TestCase, build_multiple, build_single
from .inference import (
    Observation,
    infer_outcome,
    infer_policy,
    observations_from_dict,
)
from .intervals import OVERLAP_ORDER, AllenRelation, is_overlapping
from .registry import get_profile, lookup, serialize_table
from .wire import NetConfig, encode, extract_echo_replies, hexdump, read_pcap, write_pcap

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_USAGE = 2


def _add_netconfig_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("network configuration")
    group.add_argument("--src-ip", help="source IP address")
    group.add_argument("--dst-ip", help="destination IP address")
    group.add_argument("--src-mac", help="source MAC address")
    group.add_argument("--dst-mac", help="destination MAC address")
    group.add_argument("--sport", type=int, help="TCP source port")
    group.add_argument("--dport", type=int, help="TCP destination port (default 7)")
    group.add_argument("--isn", type=lambda v: int(v, 0), help="TCP initial sequence number")
    group.add_argument("--ip-id", type=lambda v: int(v, 0), help="IP identification value")


def _netconfig(args: argparse.Namespace, protocol: Protocol, **extra) -> NetConfig:
    overrides = dict(extra)
    flag_map = {
        "src_ip": args.src_ip,
        "dst_ip": args.dst_ip,
        "src_mac": args.src_mac,
        "dst_mac": args.dst_mac,
        "sport": args.sport,
        "dport": args.dport,
        "isn": args.isn,
        "ip_id": args.ip_id,
    }
    valid = {f.name for f in fields(NetConfig)}
    for name, value in flag_map.items():
        if value is not None and name in valid:
            overrides[name] = value
    return NetConfig.for_protocol(protocol, **overrides)


def _relation(value: str) -> AllenRelation:
    try:
        return AllenRelation(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown relation {value!r}; expected one of "
            + ", ".join(r.value for r in AllenRelation)
        ) from None


def _resolve_policy(name_or_path: str, protocol: Protocol, mode: Mode):
    return lookup(name_or_path, protocol, mode)


def _load_testcase(path: str) -> TestCase:
    try:
        return TestCase.from_json(Path(path).read_text())
    except (KeyError, ValueError) as exc:
        raise OverlapForgeError(f"malformed test case {path}: {exc}") from exc


def cmd_generate(args: argparse.Namespace) -> int:
    protocols = [Protocol(p) for p in args.protocol] if args.protocol else list(Protocol)
    if args.relation is not None:
        if not is_overlapping(args.relation):
            raise OverlapForgeError(
                f"relation {args.relation.value} is non-overlapping and has no "
                "overlap test case"
            )
        if args.mode == "multiple":
            raise OverlapForgeError("--relation only applies to single mode")
        modes = [Mode.SINGLE]
    elif args.mode:
        modes = [Mode(args.mode)]
    else:
        modes = [Mode.SINGLE, Mode.MULTIPLE]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "tool": "overlap-forge",
        "version": __version__,
        "multiple_layout": COMPOSITE_LAYOUT,
        "files": [],
    }
    for protocol in protocols:
        for mode in modes:
            if mode is Mode.SINGLE:
                relations = [args.relation] if args.relation else list(OVERLAP_ORDER)
                cases = [(r.value, build_single(protocol, r)) for r in relations]
            else:
                cases = [("all", build_multiple(protocol))]
            for label, tc in cases:
                seq_index = (
                    OVERLAP_ORDER.index(tc.relations_under_test[0])
                    if mode is Mode.SINGLE
                    else 0
                )
                cfg = _netconfig(args, protocol, icmp_seq=seq_index)
                stem = f"{protocol.value}_{mode.value}_{label}"
                json_path = out_dir / f"{stem}.json"
                pcap_path = out_dir / f"{stem}.pcap"
                json_path.write_text(tc.to_json() + "\n")
                frames = encode(tc, cfg)
                write_pcap(frames, pcap_path)
                if args.hexdump:
                    (out_dir / f"{stem}.hex").write_text(hexdump(frames) + "\n")
                manifest["files"].append(
                    {
                        "protocol": protocol.value,
                        "mode": mode.value,
                        "relations": [r.value for r in tc.relations_under_test],
                        "testcase": json_path.name,
                        "pcap": pcap_path.name,
                    }
                )
                print(f"wrote {json_path} and {pcap_path}")
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"manifest: {manifest_path} ({len(manifest['files'])} test case(s))")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    tc = _load_testcase(args.testcase)
    if args.expect is not None and tc.mode is not Mode.SINGLE:
        raise OverlapForgeError("--expect requires a single-mode test case")
    policy = _resolve_policy(args.policy, tc.protocol, tc.mode)
    semantics = IgnoreSemantics(args.ignore_semantics)
    result = reassemble(tc.sequence, policy, tc.mode, semantics)
    if args.format == "json":
        print(json.dumps(result.to_dict(), indent=2))
    else:
        print(f"status: {result.status.value}")
        if result.payload is not None:
            print(f"payload: {result.payload.hex()}")
        for entry in result.resolution_log:
            print(
                f"  {entry.relation.value} on {entry.region}: {entry.outcome.value}"
            )
    if args.expect is not None:
        expected = Outcome(args.expect)
        if result.completed:
            actual = infer_outcome(tc, Observation(tc.relation, result.payload))
        else:
            actual = Outcome.IGNORE
        if actual is not expected:
            print(
                f"expectation failed: observed {actual.value}, "
                f"expected {expected.value}",
                file=sys.stderr,
            )
            return EXIT_INCONSISTENT
        print(f"expectation met: {expected.value}")
    return EXIT_OK


def _load_observations(path: Path) -> tuple[Protocol, dict[AllenRelation, Observation]]:
    if path.suffix == ".pcap":
        frames = read_pcap(path)
        replies = extract_echo_replies(frames)
        if not replies:
            raise OverlapForgeError(
                f"{path} contains no ICMP/ICMPv6 echo replies; TCP observations "
                "must be supplied as JSON"
            )
        family = frames[0].data[12:14]
        protocol = Protocol.IPV4 if family == b"\x08\x00" else Protocol.IPV6
        observations = {}
        for seq, payload in replies:
            if seq >= len(OVERLAP_ORDER):
                raise OverlapForgeError(
                    f"echo reply sequence {seq} maps to no overlapping relation"
                )
            relation = OVERLAP_ORDER[seq]
            observations[relation] = Observation(relation, payload)
        return protocol, observations
    try:
        return observations_from_dict(json.loads(path.read_text()))
    except (KeyError, ValueError) as exc:
        raise OverlapForgeError(f"malformed observations {path}: {exc}") from exc


def cmd_infer(args: argparse.Namespace) -> int:
    protocol, observations = _load_observations(Path(args.observations))
    testcases = {r: build_single(protocol, r) for r in OVERLAP_ORDER}
    table = infer_policy(observations, testcases, name=args.name)
    document = serialize_table(table, source="inferred from observations")
    text = json.dumps(document, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    if args.verify:
        reference = lookup(args.verify, protocol, Mode.SINGLE)
        mismatches = [
            r.value
            for r in OVERLAP_ORDER
            if table.outcome_for(protocol, Mode.SINGLE, r)
            is not reference.outcome_for(protocol, Mode.SINGLE, r)
        ]
        if mismatches:
            print(
                f"verify failed against {args.verify}: differs at "
                + ", ".join(mismatches),
                file=sys.stderr,
            )
            return EXIT_INCONSISTENT
        print(f"verified: matches {args.verify} ({protocol.value}/single)")
    return EXIT_OK


def cmd_diff(args: argparse.Namespace) -> int:
    protocol = Protocol(args.protocol)
    mode = Mode(args.mode)
    host = _resolve_policy(args.host, protocol, mode)
    nids = _resolve_policy(args.nids, protocol, mode)
    report = compare(host, nids, protocol, mode, host_name=args.host, nids_name=args.nids)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.render_table())
    return EXIT_INCONSISTENT if report.inconsistency_count else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    protocol = Protocol(args.protocol)
    mode = Mode(args.mode)
    pairs = []
    for spec in args.pair:
        host_name, sep, nids_name = spec.partition("=")
        if not sep or not host_name or not nids_name:
            raise OverlapForgeError(
                f"bad --pair {spec!r}; expected OS_PROFILE=NIDS_PROFILE"
            )
        pairs.append((host_name, nids_name))
    if not pairs:
        raise OverlapForgeError("empty OS set: at least one --pair is required")
    hosts = [_resolve_policy(h, protocol, mode) for h, _ in pairs]
    nidses = [_resolve_policy(n, protocol, mode) for _, n in pairs]
    surface = attack_surface(
        hosts,
        nidses,
        protocol,
        mode,
        host_names=[h for h, _ in pairs],
        nids_names=[n for _, n in pairs],
    )
    if args.format == "json":
        print(json.dumps(surface.to_dict(), indent=2))
    else:
        print(surface.render_table())
    return EXIT_INCONSISTENT if surface.inconsistency_count else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="overlap-forge",
        description=(
            "Generate overlap test cases, simulate reassembly policies, infer "
            "policies from observations, and diff host vs NIDS behavior."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write test-case JSON and pcap files")
    p_gen.add_argument(
        "--protocol",
        action="append",
        choices=[p.value for p in Protocol],
        help="protocol(s) to generate (default: all)",
    )
    p_gen.add_argument("--mode", choices=[m.value for m in Mode])
    p_gen.add_argument("--relation", type=_relation, help="single relation to generate")
    p_gen.add_argument("--out", default="testcases", help="output directory")
    p_gen.add_argument(
        "--hexdump", action="store_true", help="also write frame hex dumps"
    )
    _add_netconfig_flags(p_gen)
    p_gen.set_defaults(func=cmd_generate)

    p_sim = sub.add_parser("simulate", help="reassemble a test case under a policy")
    p_sim.add_argument("testcase", help="test-case JSON file")
    p_sim.add_argument("--policy", required=True, help="profile name or policy JSON path")
    p_sim.add_argument("--expect", choices=[o.value for o in Outcome])
    p_sim.add_argument(
        "--ignore-semantics",
        choices=[s.value for s in IgnoreSemantics],
        default=IgnoreSemantics.ABORT.value,
    )
    p_sim.add_argument("--format", choices=["json", "table"], default="table")
    p_sim.set_defaults(func=cmd_simulate)

    p_inf = sub.add_parser("infer", help="recover a policy table from observations")
    p_inf.add_argument(
        "observations",
        help="observations JSON, or a pcap of ICMP/ICMPv6 echo replies",
    )
    p_inf.add_argument("--name", default="inferred", help="name for the emitted table")
    p_inf.add_argument("--verify", help="profile to compare the inferred table against")
    p_inf.add_argument("--out", help="write the policy JSON here instead of stdout")
    p_inf.set_defaults(func=cmd_infer)

    p_diff = sub.add_parser("diff", help="compare host and NIDS policies")
    p_diff.add_argument("host", help="host profile name or path")
    p_diff.add_argument("nids", help="NIDS profile name or path")
    p_diff.add_argument(
        "--protocol", required=True, choices=[p.value for p in Protocol]
    )
    p_diff.add_argument("--mode", choices=[m.value for m in Mode], default="single")
    p_diff.add_argument("--format", choices=["json", "table"], default="table")
    p_diff.set_defaults(func=cmd_diff)

    p_rep = sub.add_parser(
        "report", help="aggregate attack surface over (OS, NIDS-policy) pairs"
    )
    p_rep.add_argument(
        "--pair",
        action="append",
        default=[],
        metavar="OS=NIDS",
        help="host OS profile and the NIDS policy configured for it (repeatable)",
    )
    p_rep.add_argument(
        "--protocol", required=True, choices=[p.value for p in Protocol]
    )
    p_rep.add_argument("--mode", choices=[m.value for m in Mode], default="single")
    p_rep.add_argument("--format", choices=["json", "table"], default="table")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OverlapForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
