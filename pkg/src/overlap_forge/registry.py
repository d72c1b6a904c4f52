"""Built-in reassembly-policy profiles and user-profile loading.

Each profile bundles the observed single/multiple-mode overlap outcomes of
one OS family or NIDS configuration as policy tables.  Rows are stored as
nine-character strings in canonical relation order (F Fi S Si O Oi D Di Eq)
with ``o`` = keep oldest, ``n`` = keep newest, ``-`` = ignore.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .chunks import Mode, Protocol
from .engine import Outcome, PolicyKey, PolicyTable
from .errors import PolicyGapError, PolicySchemaError, ProfileNotFoundError
from .intervals import OVERLAP_ORDER, AllenRelation

#: Environment variable adding colon-separated user profile directories.
PROFILE_DIR_ENV = "OVERLAP_FORGE_PROFILE_DIR"

_ROW_CHARS = {"o": Outcome.OLD, "n": Outcome.NEW, "-": Outcome.IGNORE}


def _row(protocol: Protocol, mode: Mode, text: str) -> dict[PolicyKey, Outcome]:
    if len(text) != 9:
        raise ValueError(f"policy row must have 9 cells, got {text!r}")
    return {
        (protocol, mode, relation): _ROW_CHARS[char]
        for relation, char in zip(OVERLAP_ORDER, text)
    }


def format_row(outcomes: Iterable[Outcome]) -> str:
    """Render outcomes as the compact o/n/- row notation."""
    chars = {Outcome.OLD: "o", Outcome.NEW: "n", Outcome.IGNORE: "-"}
    return "".join(chars[o] for o in outcomes)


@dataclass(frozen=True)
class PolicyProfile:
    """A named set of policy tables covering some (protocol, mode) combinations."""

    name: str
    source: str
    entries: Mapping[PolicyKey, Outcome]

    def coverage(self) -> list[tuple[Protocol, Mode]]:
        combos = sorted(
            {(p, m) for (p, m, _r) in self.entries},
            key=lambda pm: (pm[0].value, pm[1].value),
        )
        return list(combos)

    def covers(self, protocol: Protocol, mode: Mode) -> bool:
        return all((protocol, mode, r) in self.entries for r in OVERLAP_ORDER)

    def table(self, protocol: Protocol, mode: Mode) -> PolicyTable:
        if not self.covers(protocol, mode):
            available = ", ".join(f"{p.value}/{m.value}" for p, m in self.coverage())
            raise ProfileNotFoundError(
                f"profile {self.name!r} does not cover "
                f"{protocol.value}/{mode.value}; available: {available}"
            )
        entries = {
            key: outcome
            for key, outcome in self.entries.items()
            if key[0] is protocol and key[1] is mode
        }
        return PolicyTable(name=f"{self.name}/{protocol.value}/{mode.value}", entries=entries)


def _profile(name: str, source: str, rows: dict[tuple[Protocol, Mode], str]) -> PolicyProfile:
    entries: dict[PolicyKey, Outcome] = {}
    for (protocol, mode), text in rows.items():
        entries.update(_row(protocol, mode, text))
    return PolicyProfile(name=name, source=source, entries=entries)


def _ip_both(v4_multiple: str, v4_single: str, v6_multiple: str, v6_single: str,
             tcp_multiple: str, tcp_single: str) -> dict[tuple[Protocol, Mode], str]:
    return {
        (Protocol.IPV4, Mode.MULTIPLE): v4_multiple,
        (Protocol.IPV4, Mode.SINGLE): v4_single,
        (Protocol.IPV6, Mode.MULTIPLE): v6_multiple,
        (Protocol.IPV6, Mode.SINGLE): v6_single,
        (Protocol.TCP, Mode.MULTIPLE): tcp_multiple,
        (Protocol.TCP, Mode.SINGLE): tcp_single,
    }


def _nids_single(v4: str, v6: str, tcp: str) -> dict[tuple[Protocol, Mode], str]:
    return {
        (Protocol.IPV4, Mode.SINGLE): v4,
        (Protocol.IPV6, Mode.SINGLE): v6,
        (Protocol.TCP, Mode.SINGLE): tcp,
    }


# OS rows.  "any"-mode TCP observations (Windows, FreeBSD) are expanded into
# both modes.  OpenBSD reassembles identically to FreeBSD and aliases it.
_FREEBSD_ROWS = _ip_both(
    v4_multiple="noooonnoo",
    v4_single="n-noonnon",
    v6_multiple="---------",
    v6_single="n-no--non",
    tcp_multiple="noooonnoo",
    tcp_single="noooonnoo",
)

_BUILTINS: dict[str, PolicyProfile] = {
    profile.name: profile
    for profile in (
        _profile(
            "windows-21h2",
            "Windows 10 21H2 / 11 23H2 observed overlap reassembly",
            _ip_both(
                v4_multiple="---------",
                v4_single="n-no--non",
                v6_multiple="---------",
                v6_single="n-no--non",
                tcp_multiple="ooooooooo",
                tcp_single="ooooooooo",
            ),
        ),
        _profile(
            "linux-6.1",
            "Linux 4.9 / 6.1 observed overlap reassembly",
            _ip_both(
                v4_multiple="---------",
                v4_single="n-no--non",
                v6_multiple="---------",
                v6_single="n-no--non",
                tcp_multiple="noooonnoo",
                tcp_single="nonoonnoo",
            ),
        ),
        _profile(
            "sunos-5.11",
            "Solaris 11.2-11.4 (SunOS 5.11) observed overlap reassembly",
            _ip_both(
                v4_multiple="nooooonoo",
                v4_single="n-nooonon",
                v6_multiple="nooooonoo",
                v6_single="n-nooonon",
                tcp_multiple="nonononon",
                tcp_single="nonononoo",
            ),
        ),
        _profile(
            "freebsd-14.1",
            "FreeBSD 10.2 / 12.1 / 14.1 observed overlap reassembly",
            _FREEBSD_ROWS,
        ),
        _profile(
            "openbsd-7.6",
            "OpenBSD 6.0 / 6.9 / 7.6; reassembles identically to FreeBSD",
            _FREEBSD_ROWS,
        ),
        _profile(
            "suricata-7.0.4-bsd",
            "Suricata 7.0.4 configured with the bsd target policy (single mode)",
            _nids_single(v4="nonooonon", v6="nonooonon", tcp="noooonnoo"),
        ),
        _profile(
            "snort-3.1.83-bsd",
            "Snort 3.1.83 configured with the bsd target policy (single mode)",
            _nids_single(v4="n-noonnon", v6="n-noonnon", tcp="noooonnoo"),
        ),
        _profile(
            "zeek-6.2.0",
            "Zeek 6.2.0 (single reassembly policy, not configurable; single mode)",
            _nids_single(v4="nonooonon", v6="ooooooooo", tcp="ooooooooo"),
        ),
    )
}


def builtin_profiles() -> dict[str, PolicyProfile]:
    return dict(_BUILTINS)


def profile_search_dirs(extra: Iterable[str | Path] = ()) -> list[Path]:
    dirs = [Path(p) for p in extra]
    env = os.environ.get(PROFILE_DIR_ENV, "")
    dirs.extend(Path(p) for p in env.split(os.pathsep) if p)
    return dirs


def available_profiles(search_dirs: Iterable[str | Path] = ()) -> list[str]:
    names = set(_BUILTINS)
    for directory in profile_search_dirs(search_dirs):
        if directory.is_dir():
            names.update(p.stem for p in directory.glob("*.json"))
    return sorted(names)


def get_profile(name: str, search_dirs: Iterable[str | Path] = ()) -> PolicyProfile:
    """Resolve a profile by built-in name, user-dir name, or file path."""
    if name in _BUILTINS:
        return _BUILTINS[name]
    candidates = [Path(name)]
    for directory in profile_search_dirs(search_dirs):
        candidates.append(directory / f"{name}.json")
    for path in candidates:
        if path.is_file():
            return load_profile(json.loads(path.read_text()))
    raise ProfileNotFoundError(
        f"unknown policy profile {name!r}; available: "
        + ", ".join(available_profiles(search_dirs))
    )


def lookup(
    name: str,
    protocol: Protocol,
    mode: Mode,
    search_dirs: Iterable[str | Path] = (),
) -> PolicyTable:
    """The complete nine-relation table of a profile for (protocol, mode)."""
    return get_profile(name, search_dirs).table(protocol, mode)


def load_profile(document: Mapping) -> PolicyProfile:
    """Build a profile from a policy JSON document, validating the schema."""
    if not isinstance(document, Mapping):
        raise PolicySchemaError("policy document must be a JSON object")
    try:
        name = document["name"]
        raw_entries = document["entries"]
    except KeyError as exc:
        raise PolicySchemaError(f"policy document missing field {exc}") from None
    source = document.get("source", "")
    if not isinstance(name, str) or not name:
        raise PolicySchemaError("profile name must be a non-empty string")
    if not isinstance(raw_entries, list) or not raw_entries:
        raise PolicySchemaError("entries must be a non-empty list")

    entries: dict[PolicyKey, Outcome] = {}
    for item in raw_entries:
        try:
            protocol = Protocol(item["protocol"])
            mode = Mode(item["mode"])
            relation = AllenRelation(item["relation"])
            outcome = Outcome(item["outcome"])
        except (KeyError, ValueError, TypeError) as exc:
            raise PolicySchemaError(f"bad policy entry {item!r}: {exc}") from None
        if relation not in OVERLAP_ORDER:
            raise PolicySchemaError(
                f"relation {relation.value} is non-overlapping and cannot appear "
                "in a policy table"
            )
        key = (protocol, mode, relation)
        if key in entries:
            raise PolicySchemaError(
                f"duplicate entry for ({protocol.value}, {mode.value}, {relation.value})"
            )
        entries[key] = outcome

    profile = PolicyProfile(name=name, source=source, entries=entries)
    for protocol, mode in profile.coverage():
        for relation in OVERLAP_ORDER:
            if (protocol, mode, relation) not in entries:
                raise PolicyGapError(
                    f"policy gap: profile {name!r} covers "
                    f"({protocol.value}, {mode.value}) but lacks {relation.value}"
                )
    return profile


def serialize_profile(profile: PolicyProfile) -> dict:
    entries = [
        {
            "protocol": protocol.value,
            "mode": mode.value,
            "relation": relation.value,
            "outcome": outcome.value,
        }
        for (protocol, mode, relation), outcome in sorted(
            profile.entries.items(),
            key=lambda kv: (
                kv[0][0].value,
                kv[0][1].value,
                OVERLAP_ORDER.index(kv[0][2]),
            ),
        )
    ]
    return {"name": profile.name, "source": profile.source, "entries": entries}


def serialize_table(table: PolicyTable, source: str = "") -> dict:
    """Render a single PolicyTable in the profile document schema."""
    return serialize_profile(
        PolicyProfile(name=table.name, source=source, entries=dict(table.entries))
    )
