"""Per-agent fairness checks with exact integer certificates.

Proportionality-family notions require ``v_i(X_i) >= v_i(M)/n - d_i(X)``.
With ``d_i(X) = num/coef`` this is decided as

    coef * n * v_i(X_i) + n * num >= coef * v_i(M)

so no division ever happens. Envy-family notions compare bundle pairs and
report the tightest pair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import InputError
from .instance import Allocation, Instance, _check_agent, require_valid


class Notion(str, enum.Enum):
    PROP = "PROP"
    PROP1 = "PROP1"
    PROPM = "PROPM"
    PROPAVG = "PROPAVG"
    AVG_EFX = "AVG_EFX"
    PROPX = "PROPX"
    EF = "EF"
    EF1 = "EF1"
    EFX = "EFX"

    @classmethod
    def parse(cls, name: str) -> "Notion":
        key = name.strip().upper().replace("-", "_")
        aliases = {"AVGEFX": "AVG_EFX", "PROP_AVG": "PROPAVG", "PROP_M": "PROPM", "PROP_X": "PROPX"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown fairness notion {name!r}") from None

    @property
    def is_envy(self) -> bool:
        return self in ENVY_NOTIONS


PROPORTIONALITY_NOTIONS = (
    Notion.PROP, Notion.PROPX, Notion.AVG_EFX, Notion.PROPAVG, Notion.PROPM, Notion.PROP1,
)
ENVY_NOTIONS = (Notion.EF, Notion.EFX, Notion.EF1)
ALL_NOTIONS = PROPORTIONALITY_NOTIONS + ENVY_NOTIONS


@dataclass(frozen=True)
class Certificate:
    """Scaled comparison that decided one agent's verdict.

    ``satisfied`` is exactly ``lhs >= rhs``. For envy notions ``other`` is
    the agent of the tightest comparison (``None`` when there is nobody to
    envy).
    """

    agent: int
    lhs: int
    rhs: int
    satisfied: bool
    other: Optional[int] = None

    def to_dict(self) -> dict:
        d = {"agent": self.agent, "lhs": self.lhs, "rhs": self.rhs, "satisfied": self.satisfied}
        if self.other is not None:
            d["other"] = self.other
        return d


@dataclass(frozen=True)
class SatisfactionReport:
    notion: Notion
    certificates: tuple[Certificate, ...]

    @property
    def verdicts(self) -> tuple[bool, ...]:
        return tuple(c.satisfied for c in self.certificates)

    @property
    def satisfied(self) -> bool:
        return all(self.verdicts)

    def failing_agents(self) -> list[int]:
        return [c.agent for c in self.certificates if not c.satisfied]


def _profile(inst: Instance, alloc: Allocation, agent: int):
    """Agent's bundle values, bundle minima and bundle maxima over all bundles."""
    row = inst.values[agent]
    vals, mins, maxs = [], [], []
    for bundle in alloc.bundles:
        goods = [row[g] for g in bundle]
        vals.append(sum(goods))
        mins.append(min(goods, default=0))
        maxs.append(max(goods, default=0))
    return vals, mins, maxs


def _deficiency(notion: Notion, n: int, agent: int, mins, maxs, sizes) -> tuple[int, int]:
    if n == 1 or notion is Notion.PROP:
        return 1, 0
    others = [k for k in range(n) if k != agent]
    if notion is Notion.PROP1:
        return 1, max((maxs[k] for k in others if sizes[k]), default=0)
    if notion is Notion.PROPM:
        return 1, max(mins[k] for k in others)
    if notion is Notion.PROPAVG:
        return n - 1, sum(mins[k] for k in others)
    if notion is Notion.AVG_EFX:
        return n, sum(mins[k] for k in others)
    if notion is Notion.PROPX:
        return 1, min(mins[k] for k in others)
    raise InputError(f"{notion.value} has no deficiency term")


def deficiency_numerator(inst: Instance, alloc: Allocation, agent: int, notion: Notion) -> tuple[int, int]:
    """``d_i(X)`` as the exact fraction ``num / coef``, returned ``(coef, num)``.

    With a single agent every notion degenerates to ``(1, 0)``.
    """
    notion = Notion(notion)
    _check_agent(inst, agent)
    require_valid(inst, alloc)
    _, mins, maxs = _profile(inst, alloc, agent)
    sizes = [len(b) for b in alloc.bundles]
    return _deficiency(notion, inst.n_agents, agent, mins, maxs, sizes)


def certificate(inst: Instance, alloc: Allocation, agent: int, notion: Notion) -> Certificate:
    notion = Notion(notion)
    _check_agent(inst, agent)
    require_valid(inst, alloc)
    return _certificate(inst, alloc, agent, notion)


def _certificate(inst: Instance, alloc: Allocation, agent: int, notion: Notion) -> Certificate:
    n = inst.n_agents
    vals, mins, maxs = _profile(inst, alloc, agent)
    own = vals[agent]
    if not notion.is_envy:
        sizes = [len(b) for b in alloc.bundles]
        coef, num = _deficiency(notion, n, agent, mins, maxs, sizes)
        total = sum(inst.values[agent])
        lhs = coef * n * own + n * num
        rhs = coef * total
        return Certificate(agent, lhs, rhs, lhs >= rhs)

    best = None
    for j in range(n):
        if j == agent:
            continue
        if notion is Notion.EF:
            lhs, rhs = own, vals[j]
        elif notion is Notion.EFX:
            lhs, rhs = own + mins[j], vals[j]
        else:  # EF1; an empty X_j gives rhs 0
            lhs, rhs = own, vals[j] - maxs[j]
        if best is None or lhs - rhs < best[0] - best[1]:
            best = (lhs, rhs, j)
    if best is None:
        return Certificate(agent, own, own, True)
    lhs, rhs, j = best
    return Certificate(agent, lhs, rhs, lhs >= rhs, j)


def is_satisfied(inst: Instance, alloc: Allocation, agent: int, notion: Notion) -> bool:
    return certificate(inst, alloc, agent, notion).satisfied


def verify(inst: Instance, alloc: Allocation, notion: Notion) -> SatisfactionReport:
    """Check every agent; the allocation satisfies ``notion`` iff all do."""
    notion = Notion(notion)
    require_valid(inst, alloc)
    certs = tuple(_certificate(inst, alloc, i, notion) for i in inst.agents)
    return SatisfactionReport(notion, certs)


def verify_many(inst: Instance, alloc: Allocation, notions: Iterable[Notion]) -> dict[Notion, SatisfactionReport]:
    return {Notion(n): verify(inst, alloc, n) for n in notions}
