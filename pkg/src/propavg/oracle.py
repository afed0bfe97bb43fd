"""Exhaustive ground truth for small instances.

Every map goods -> agents is tried in mixed-radix order with good 0 as the
least significant digit, so the first satisfying allocation is canonical.
"""

from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import BudgetError
from .fairness import Notion, _certificate
from .instance import Allocation, Instance

log = logging.getLogger(__name__)

DEFAULT_MAX_ASSIGNMENTS = 10**7


@dataclass(frozen=True)
class EnumerationBudget:
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS

    def __post_init__(self):
        if self.max_assignments < 1:
            raise ValueError("max_assignments must be positive")

    def check(self, inst: Instance) -> None:
        size = inst.n_agents ** inst.n_goods
        if size > self.max_assignments:
            raise BudgetError(
                f"{inst.n_agents}^{inst.n_goods} = {size} assignments exceeds budget {self.max_assignments}"
            )


@dataclass(frozen=True)
class EnumerationResult:
    count: int
    total: int
    witness: Optional[Allocation]

    @property
    def exists(self) -> bool:
        return self.count > 0


def assignments(inst: Instance) -> Iterator[tuple[int, ...]]:
    """Owner of each good, good 0 changing fastest."""
    for digits in itertools.product(range(inst.n_agents), repeat=inst.n_goods):
        yield digits[::-1]


def to_allocation(n_agents: int, owners: tuple[int, ...]) -> Allocation:
    bundles: list[set[int]] = [set() for _ in range(n_agents)]
    for g, a in enumerate(owners):
        bundles[a].add(g)
    return Allocation(tuple(frozenset(b) for b in bundles))


# allocation objects depend only on (n, m); reuse them across sweep instances
_CACHE_LIMIT = 100_000


@functools.lru_cache(maxsize=8)
def _cached_allocations(n_agents: int, n_goods: int) -> tuple[Allocation, ...]:
    dummy = Instance(n_agents, n_goods, tuple((0,) * n_goods for _ in range(n_agents)))
    return tuple(to_allocation(n_agents, owners) for owners in assignments(dummy))


def allocations(inst: Instance) -> Iterator[Allocation]:
    """Every allocation of ``inst`` in enumeration order."""
    if inst.n_agents ** inst.n_goods <= _CACHE_LIMIT:
        yield from _cached_allocations(inst.n_agents, inst.n_goods)
    else:
        for owners in assignments(inst):
            yield to_allocation(inst.n_agents, owners)


def satisfies(inst: Instance, alloc: Allocation, notion: Notion) -> bool:
    return all(_certificate(inst, alloc, i, notion).satisfied for i in inst.agents)


def enumerate_satisfying(
    inst: Instance, notion: Notion, budget: EnumerationBudget = EnumerationBudget()
) -> EnumerationResult:
    """Count allocations satisfying ``notion`` and return the first one."""
    notion = Notion(notion)
    budget.check(inst)
    count = total = 0
    witness = None
    for alloc in allocations(inst):
        total += 1
        if satisfies(inst, alloc, notion):
            count += 1
            if witness is None:
                witness = alloc
    return EnumerationResult(count, total, witness)


def first_satisfying(
    inst: Instance, notion: Notion, budget: EnumerationBudget = EnumerationBudget()
) -> Optional[Allocation]:
    """Same witness as :func:`enumerate_satisfying` but stops at it."""
    notion = Notion(notion)
    budget.check(inst)
    for alloc in allocations(inst):
        if satisfies(inst, alloc, notion):
            return alloc
    return None


@dataclass
class SweepReport:
    notion: Notion
    checked: int = 0
    counterexamples: list[Instance] = field(default_factory=list)
    skipped: list[tuple[int, str]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.counterexamples


def existence_sweep(
    family: Iterable[Instance], notion: Notion, budget: EnumerationBudget = EnumerationBudget()
) -> SweepReport:
    """Collect every instance of ``family`` with no allocation satisfying ``notion``."""
    notion = Notion(notion)
    report = SweepReport(notion)
    for k, inst in enumerate(family):
        try:
            witness = first_satisfying(inst, notion, budget)
        except BudgetError as exc:
            log.warning("instance %d skipped: %s", k, exc)
            report.skipped.append((k, str(exc)))
            continue
        report.checked += 1
        if witness is None:
            report.counterexamples.append(inst)
    return report
