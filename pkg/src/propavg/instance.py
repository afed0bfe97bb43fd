"""Instances, bundles and allocations with exact integer valuations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InputError

Bundle = frozenset  # frozenset[int] of good indices


def _check_int(x, what: str) -> int:
    # bool is an int subclass; reject it explicitly
    if isinstance(x, bool) or not isinstance(x, int):
        raise InputError(f"{what} must be an integer, got {x!r}")
    return x


@dataclass(frozen=True)
class Instance:
    """Additive valuations of ``n_agents`` agents over ``n_goods`` goods.

    ``values[i][g]`` is agent ``i``'s non-negative integer value for good
    ``g``. Values are not normalized; rational inputs have to be scaled to
    integers by the caller.
    """

    n_agents: int
    n_goods: int
    values: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        _check_int(self.n_agents, "n_agents")
        _check_int(self.n_goods, "n_goods")
        if self.n_agents < 1:
            raise InputError("an instance needs at least one agent")
        if self.n_goods < 0:
            raise InputError("n_goods must be non-negative")
        rows = tuple(tuple(row) for row in self.values)
        if len(rows) != self.n_agents:
            raise InputError(f"expected {self.n_agents} valuation rows, got {len(rows)}")
        for i, row in enumerate(rows):
            if len(row) != self.n_goods:
                raise InputError(f"row {i} has {len(row)} entries, expected {self.n_goods}")
            for g, v in enumerate(row):
                _check_int(v, f"values[{i}][{g}]")
                if v < 0:
                    raise InputError(f"values[{i}][{g}] is negative ({v})")
        object.__setattr__(self, "values", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Instance":
        rows = [list(r) for r in rows]
        if not rows:
            raise InputError("an instance needs at least one agent")
        return cls(len(rows), len(rows[0]), tuple(tuple(r) for r in rows))

    @property
    def agents(self) -> range:
        return range(self.n_agents)

    @property
    def goods(self) -> range:
        return range(self.n_goods)

    def scaled_row(self, agent: int, factor: int) -> "Instance":
        """Copy with one agent's row multiplied by ``factor``."""
        rows = [list(r) for r in self.values]
        rows[agent] = [v * factor for v in rows[agent]]
        return Instance.from_rows(rows)


@dataclass(frozen=True)
class Allocation:
    """One bundle per agent. Partition validity is checked separately by
    :func:`validate_allocation` so that malformed allocations can still be
    represented and reported."""

    bundles: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))

    @classmethod
    def from_lists(cls, lists: Iterable[Iterable[int]]) -> "Allocation":
        return cls(tuple(frozenset(b) for b in lists))

    def to_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.bundles]

    def __len__(self) -> int:
        return len(self.bundles)

    def __getitem__(self, agent: int) -> frozenset:
        return self.bundles[agent]


def _check_agent(inst: Instance, agent: int) -> None:
    if isinstance(agent, bool) or not isinstance(agent, int) or not 0 <= agent < inst.n_agents:
        raise InputError(f"agent index {agent!r} out of range [0, {inst.n_agents})")


def _check_goods(inst: Instance, goods: Iterable[int]) -> None:
    for g in goods:
        if isinstance(g, bool) or not isinstance(g, int) or not 0 <= g < inst.n_goods:
            raise InputError(f"good index {g!r} out of range [0, {inst.n_goods})")


def bundle_value(inst: Instance, agent: int, bundle: Iterable[int]) -> int:
    _check_agent(inst, agent)
    bundle = tuple(bundle)
    _check_goods(inst, bundle)
    row = inst.values[agent]
    return sum(row[g] for g in bundle)


def min_good_value(inst: Instance, agent: int, bundle: Iterable[int]) -> int:
    """Value of the agent's least valued good in ``bundle``; 0 if empty."""
    _check_agent(inst, agent)
    bundle = tuple(bundle)
    _check_goods(inst, bundle)
    row = inst.values[agent]
    return min((row[g] for g in bundle), default=0)


def total_value(inst: Instance, agent: int) -> int:
    _check_agent(inst, agent)
    return sum(inst.values[agent])


def validate_allocation(inst: Instance, alloc: Allocation) -> Optional[str]:
    """Return ``None`` if ``alloc`` partitions the goods among the agents,
    otherwise a description of the first problem found."""
    if len(alloc.bundles) != inst.n_agents:
        return f"allocation has {len(alloc.bundles)} bundles for {inst.n_agents} agents"
    owner: dict[int, int] = {}
    for agent, bundle in enumerate(alloc.bundles):
        for g in bundle:
            if isinstance(g, bool) or not isinstance(g, int) or not 0 <= g < inst.n_goods:
                return f"bundle of agent {agent} contains invalid good {g!r}"
        for g in sorted(bundle):
            if g in owner:
                return f"duplicate good {g} in bundles of agents {owner[g]} and {agent}"
            owner[g] = agent
    missing = [g for g in inst.goods if g not in owner]
    if missing:
        return f"uncovered goods: {missing}"
    return None


def require_valid(inst: Instance, alloc: Allocation) -> None:
    problem = validate_allocation(inst, alloc)
    if problem is not None:
        raise InputError(problem)
