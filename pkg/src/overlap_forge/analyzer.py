"""Classify host/NIDS policy divergences into attack scenarios.

For one overlapping relation, a host outcome and a NIDS outcome either agree
(consistent) or open an attack:

* the NIDS ignores what the host reassembles -> evasion E1;
* the host ignores what the NIDS reassembles -> insertion I1;
* both reassemble but differently -> E2 and I2 at the attacker's choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, unique
from typing import Sequence

from .chunks import Mode, Protocol
from .engine import Outcome, PolicyTable
from .intervals import OVERLAP_ORDER, AllenRelation


@unique
class AttackScenario(Enum):
    E1 = "E1"
    E2 = "E2"
    I1 = "I1"
    I2 = "I2"

    @property
    def is_evasion(self) -> bool:
        return self in (AttackScenario.E1, AttackScenario.E2)

    @property
    def is_insertion(self) -> bool:
        return self in (AttackScenario.I1, AttackScenario.I2)

    def __str__(self) -> str:
        return self.value


def classify(host: Outcome, nids: Outcome) -> frozenset[AttackScenario]:
    """Scenarios opened by one (host, NIDS) outcome pair; empty means consistent."""
    if host is nids:
        return frozenset()
    if nids is Outcome.IGNORE:
        return frozenset({AttackScenario.E1})
    if host is Outcome.IGNORE:
        return frozenset({AttackScenario.I1})
    return frozenset({AttackScenario.E2, AttackScenario.I2})


@dataclass(frozen=True, slots=True)
class AttackFinding:
    relation: AllenRelation
    host_outcome: Outcome
    nids_outcome: Outcome
    scenarios: frozenset[AttackScenario]

    @property
    def consistent(self) -> bool:
        return not self.scenarios

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "host": self.host_outcome.value,
            "nids": self.nids_outcome.value,
            "scenarios": sorted(s.value for s in self.scenarios),
        }


@dataclass(frozen=True)
class ConsistencyReport:
    protocol: Protocol
    mode: Mode
    host_profile: str
    nids_profile: str
    findings: tuple[AttackFinding, ...]

    @property
    def inconsistency_count(self) -> int:
        return sum(1 for f in self.findings if not f.consistent)

    @property
    def inconsistent_relations(self) -> tuple[AllenRelation, ...]:
        return tuple(f.relation for f in self.findings if not f.consistent)

    @property
    def evasion_possible(self) -> bool:
        return any(s.is_evasion for f in self.findings for s in f.scenarios)

    @property
    def insertion_possible(self) -> bool:
        return any(s.is_insertion for f in self.findings for s in f.scenarios)

    def finding(self, relation: AllenRelation) -> AttackFinding:
        for f in self.findings:
            if f.relation is relation:
                return f
        raise KeyError(relation)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "mode": self.mode.value,
            "host": self.host_profile,
            "nids": self.nids_profile,
            "findings": [f.to_dict() for f in self.findings],
            "inconsistency_count": self.inconsistency_count,
            "evasion_possible": self.evasion_possible,
            "insertion_possible": self.insertion_possible,
        }

    def render_table(self) -> str:
        """Aligned text table: one column per relation, paper-style rows."""
        cells = {Outcome.OLD: "o", Outcome.NEW: "n", Outcome.IGNORE: "-"}
        width = 6
        header = "relation".ljust(16) + "".join(
            r.value.ljust(width) for r in OVERLAP_ORDER
        )
        host_row = f"host {self.host_profile}"[:15].ljust(16) + "".join(
            cells[f.host_outcome].ljust(width) for f in self.findings
        )
        nids_row = f"nids {self.nids_profile}"[:15].ljust(16) + "".join(
            cells[f.nids_outcome].ljust(width) for f in self.findings
        )
        scen_row = "scenarios".ljust(16) + "".join(
            (
                "+".join(sorted((s.value for s in f.scenarios), key=str)) or "."
            ).ljust(width)
            for f in self.findings
        )
        summary = (
            f"{self.protocol.value}/{self.mode.value}: "
            f"{self.inconsistency_count} inconsistent relation(s)"
        )
        if self.inconsistency_count:
            summary += (
                " [" + ", ".join(r.value for r in self.inconsistent_relations) + "]"
            )
        return "\n".join((header, host_row, nids_row, scen_row, summary))


def compare(
    host_pt: PolicyTable,
    nids_pt: PolicyTable,
    protocol: Protocol,
    mode: Mode,
    host_name: str | None = None,
    nids_name: str | None = None,
) -> ConsistencyReport:
    """Compare two complete tables relation by relation, canonical order."""
    host_pt.require(protocol, mode)
    nids_pt.require(protocol, mode)
    findings = []
    for relation in OVERLAP_ORDER:
        host = host_pt.outcome_for(protocol, mode, relation)
        nids = nids_pt.outcome_for(protocol, mode, relation)
        findings.append(AttackFinding(relation, host, nids, classify(host, nids)))
    return ConsistencyReport(
        protocol=protocol,
        mode=mode,
        host_profile=host_name or host_pt.name,
        nids_profile=nids_name or nids_pt.name,
        findings=tuple(findings),
    )


def percentage(count: int, os_count: int) -> int:
    """count / (9 * os_count) as a round-half-up integer percent."""
    if os_count <= 0:
        raise ValueError("empty OS set")
    total_cells = 9 * os_count
    return (200 * count + total_cells) // (2 * total_cells)


@dataclass(frozen=True)
class SurfaceReport:
    """Attack surface of one NIDS across a set of host OSes."""

    protocol: Protocol
    mode: Mode
    reports: tuple[ConsistencyReport, ...]

    @property
    def inconsistency_count(self) -> int:
        return sum(r.inconsistency_count for r in self.reports)

    @property
    def percent(self) -> int:
        return percentage(self.inconsistency_count, len(self.reports))

    @property
    def evasion_hosts(self) -> tuple[str, ...]:
        return tuple(r.host_profile for r in self.reports if r.evasion_possible)

    @property
    def insertion_hosts(self) -> tuple[str, ...]:
        return tuple(r.host_profile for r in self.reports if r.insertion_possible)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "mode": self.mode.value,
            "inconsistency_count": self.inconsistency_count,
            "percent": self.percent,
            "evasion_hosts": list(self.evasion_hosts),
            "insertion_hosts": list(self.insertion_hosts),
            "pairs": [
                {
                    "host": r.host_profile,
                    "nids": r.nids_profile,
                    "inconsistency_count": r.inconsistency_count,
                    "inconsistent_relations": [
                        rel.value for rel in r.inconsistent_relations
                    ],
                    "evasion_possible": r.evasion_possible,
                    "insertion_possible": r.insertion_possible,
                }
                for r in self.reports
            ],
        }

    def render_table(self) -> str:
        lines = [
            "host".ljust(20) + "nids".ljust(26) + "inconsistent".ljust(14)
            + "evasion".ljust(9) + "insertion"
        ]
        for r in self.reports:
            lines.append(
                r.host_profile.ljust(20)
                + r.nids_profile.ljust(26)
                + str(r.inconsistency_count).ljust(14)
                + ("yes" if r.evasion_possible else "no").ljust(9)
                + ("yes" if r.insertion_possible else "no")
            )
        lines.append(
            f"total {self.inconsistency_count}/{9 * len(self.reports)} "
            f"({self.percent}%) for {self.protocol.value}/{self.mode.value}"
        )
        return "\n".join(lines)


def attack_surface(
    host_tables: Sequence[PolicyTable],
    nids_tables: Sequence[PolicyTable],
    protocol: Protocol,
    mode: Mode,
    host_names: Sequence[str] | None = None,
    nids_names: Sequence[str] | None = None,
) -> SurfaceReport:
    """Aggregate consistency over paired (host OS, NIDS-configured) tables.

    ``nids_tables[i]`` is the NIDS policy configured for ``host_tables[i]``.
    """
    if len(host_tables) != len(nids_tables):
        raise ValueError(
            f"need one NIDS table per OS table: "
            f"{len(host_tables)} OS vs {len(nids_tables)} NIDS"
        )
    if not host_tables:
        raise ValueError("empty OS set")
    reports = tuple(
        compare(
            host,
            nids,
            protocol,
            mode,
            host_name=host_names[i] if host_names else None,
            nids_name=nids_names[i] if nids_names else None,
        )
        for i, (host, nids) in enumerate(zip(host_tables, nids_tables))
    )
    return SurfaceReport(protocol=protocol, mode=mode, reports=reports)
