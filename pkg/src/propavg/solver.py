"""Recursive cut-and-choose solver for PROPavg allocations.

One recursion level works on an ordered agent list whose last member is the
chooser, plus the set of goods still on the table:

1. Preprocessing hands single goods to agents that are already content with
   one good, and recurses on whoever is left.
2. Otherwise the other agents are solved recursively, their bundles plus an
   empty reserve slot form the initial slot partition, and goods are moved
   into the reserve one at a time (keeping a perfect matching that avoids
   the reserve) until every slot can be left out of some perfect matching.
3. The chooser takes her favourite slot and the matching hands out the rest.

All threshold tests are integer cross-multiplications over unnormalized
values; ``n`` below is always the number of agents at the current level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import InputError, InternalError, InvariantViolation
from .fairness import Notion, verify
from .instance import Allocation, Instance
from .matching import (
    BipartiteGraph,
    Matching,
    hall_deficient_set,
    has_perfect_matching,
    max_matching,
    perfect_after_any_exclusion,
)

log = logging.getLogger(__name__)

# left side size up to which check mode also runs the subset-enumeration bridge
HALL_BRIDGE_CAP = 9


@dataclass(frozen=True)
class SlotPartition:
    """Goods of one level split into ``level_n`` slots, one of them the reserve."""

    bundles: tuple[frozenset, ...]
    reserve_slot: int

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))
        if not 0 <= self.reserve_slot < len(self.bundles):
            raise InputError(f"reserve slot {self.reserve_slot} outside {len(self.bundles)} slots")

    @property
    def level_n(self) -> int:
        return len(self.bundles)

    def goods(self) -> frozenset:
        return frozenset().union(*self.bundles)

    def moved(self, slot: int, good: int) -> "SlotPartition":
        """Partition with ``good`` moved from ``slot`` into the reserve."""
        if slot == self.reserve_slot or good not in self.bundles[slot]:
            raise InputError(f"good {good} is not in non-reserve slot {slot}")
        b = list(self.bundles)
        b[slot] = b[slot] - {good}
        b[self.reserve_slot] = b[self.reserve_slot] | {good}
        return SlotPartition(tuple(b), self.reserve_slot)


@dataclass(frozen=True)
class PropavgGraph:
    """Agents other than the chooser (left) against slots (right)."""

    graph: BipartiteGraph
    partition: SlotPartition
    agents: tuple[int, ...]

    @property
    def reserve_slot(self) -> int:
        return self.partition.reserve_slot


@dataclass(frozen=True)
class PreprocessState:
    active_agents: tuple[int, ...]
    removed: tuple[tuple[int, int], ...]  # (agent, good) in removal order
    active_goods: tuple[int, ...]

    @property
    def removed_agents(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.removed)

    @property
    def removed_goods(self) -> tuple[int, ...]:
        return tuple(g for _, g in self.removed)


@dataclass
class LevelTrace:
    depth: int
    agents: tuple[int, ...]
    n_goods: int
    kind: str = ""  # "single", "preprocessed" or "cut_and_choose"
    removed: list[tuple[int, int]] = field(default_factory=list)
    moves: list[tuple[int, int]] = field(default_factory=list)  # (slot, good)
    reserve_sizes: list[int] = field(default_factory=list)  # reserve size at each loop test
    p1_at_entry: list[bool] = field(default_factory=list)  # filled in check mode only
    chooser_slot: Optional[int] = None

    @property
    def iterations(self) -> int:
        return len(self.moves)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "agents": list(self.agents),
            "goods": self.n_goods,
            "kind": self.kind,
            "preprocessed": [list(p) for p in self.removed],
            "iterations": self.iterations,
            "moves": [list(m) for m in self.moves],
            "chooser_slot": self.chooser_slot,
        }


@dataclass
class SolverTrace:
    levels: list[LevelTrace] = field(default_factory=list)

    @property
    def max_iterations(self) -> int:
        return max((lv.iterations for lv in self.levels), default=0)

    @property
    def total_iterations(self) -> int:
        return sum(lv.iterations for lv in self.levels)

    def to_dict(self) -> list[dict]:
        return [lv.to_dict() for lv in self.levels]


# ---------------------------------------------------------------------------
# level state with cached per-slot statistics


class _Level:
    """Cached slot statistics for the left-side agents of one level.

    For left agent ``a`` and slot ``u`` keeps the bundle value and the two
    smallest good values (as a multiset), which makes the effect of removing
    any single good an O(1) lookup.
    """

    def __init__(self, inst: Instance, agents: Sequence[int], bundles: Sequence[Iterable[int]], reserve: int):
        self.inst = inst
        self.agents = tuple(agents)
        self.n = len(self.agents)
        self.left = self.agents[:-1]
        self.rows = [inst.values[i] for i in self.left]
        self.bundles = [set(b) for b in bundles]
        self.r = reserve
        goods = set().union(*self.bundles) if self.bundles else set()
        self.totals = [sum(row[g] for g in goods) for row in self.rows]
        # right-hand side of every edge test: (n-1) * v_i(M_level)
        self.rhs = [(self.n - 1) * t for t in self.totals]
        self.val = [[0] * self.n for _ in self.left]
        self.lo = [[(0, 0)] * self.n for _ in self.left]
        self.msum = [0] * len(self.left)
        for u in range(self.n):
            self._refresh_slot(u)
        self._refresh_msum()

    def _refresh_slot(self, u: int) -> None:
        b = self.bundles[u]
        for a, row in enumerate(self.rows):
            vs = [row[g] for g in b]
            self.val[a][u] = sum(vs)
            if not vs:
                self.lo[a][u] = (0, 0)
            elif len(vs) == 1:
                self.lo[a][u] = (vs[0], 0)
            else:
                s1 = s2 = None
                for v in vs:
                    if s1 is None or v < s1:
                        s1, s2 = v, s1
                    elif s2 is None or v < s2:
                        s2 = v
                self.lo[a][u] = (s1, s2)

    def _refresh_msum(self) -> None:
        r = self.r
        for a in range(len(self.left)):
            self.msum[a] = sum(self.lo[a][u][0] for u in range(self.n) if u != r)

    def _edge(self, a: int, u: int, val_u: int, min_u: int, msum: int) -> bool:
        n = self.n
        others = msum if u == self.r else msum - min_u
        return n * (n - 1) * val_u + n * others >= self.rhs[a]

    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj = []
        for a in range(len(self.left)):
            va, la, s = self.val[a], self.lo[a], self.msum[a]
            adj.append(tuple(u for u in range(self.n) if self._edge(a, u, va[u], la[u][0], s)))
        return tuple(adj)

    def graph(self) -> BipartiteGraph:
        return BipartiteGraph(len(self.left), self.n, self.adjacency())

    def partition(self) -> SlotPartition:
        return SlotPartition(tuple(frozenset(b) for b in self.bundles), self.r)

    def propavg_graph(self) -> PropavgGraph:
        return PropavgGraph(self.graph(), self.partition(), self.agents)

    # candidate move: good g out of slot u into the reserve

    def _moved_stats(self, a: int, u: int, g: int):
        v = self.rows[a][g]
        s1, s2 = self.lo[a][u]
        new_min_u = 0 if len(self.bundles[u]) == 1 else (s2 if v == s1 else s1)
        msum = self.msum[a] - s1 + new_min_u
        return v, new_min_u, msum

    def _edge_after_move(self, a: int, w: int, u: int, g: int) -> bool:
        v, new_min_u, msum = self._moved_stats(a, u, g)
        if w == u:
            return self._edge(a, w, self.val[a][u] - v, new_min_u, msum)
        if w == self.r:
            return self._edge(a, w, self.val[a][w] + v, 0, msum)
        return self._edge(a, w, self.val[a][w], self.lo[a][w][0], msum)

    def _adjacency_after_move(self, u: int, g: int) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(w for w in range(self.n) if self._edge_after_move(a, w, u, g))
            for a in range(len(self.left))
        )

    def p1_after_move(self, u: int, g: int, matching: Matching) -> bool:
        """P1 for the moved partition; ``matching`` must be perfect in G - r."""
        # G' - r is square, so the source slot must keep at least one neighbour
        if not any(self._edge_after_move(a, u, u, g) for a in range(len(self.left))):
            return False
        if all(self._edge_after_move(a, w, u, g) for a, w in matching.pairs):
            return True
        moved = BipartiteGraph(len(self.left), self.n, self._adjacency_after_move(u, g))
        return len(max_matching(moved, self.r, initial=matching)) == len(self.left)

    def find_move(self) -> tuple[int, int]:
        base = max_matching(self.graph(), self.r)
        if len(base) != len(self.left):
            raise InputError("partition does not satisfy P1")
        for u in range(self.n):
            if u == self.r:
                continue
            for g in sorted(self.bundles[u]):
                if self.p1_after_move(u, g, base):
                    return u, g
        raise InternalError("no P1-preserving move exists")

    def apply_move(self, u: int, g: int) -> None:
        self.bundles[u].discard(g)
        self.bundles[self.r].add(g)
        self._refresh_slot(u)
        self._refresh_slot(self.r)
        self._refresh_msum()


# ---------------------------------------------------------------------------
# public level operations


def _check_level(inst: Instance, agents: Sequence[int], part: SlotPartition) -> None:
    if len(agents) < 2:
        raise InputError("a PROPavg graph needs at least two agents at the level")
    if len(agents) != part.level_n:
        raise InputError(f"{len(agents)} agents but {part.level_n} slots")
    if len(set(agents)) != len(agents) or not all(0 <= a < inst.n_agents for a in agents):
        raise InputError(f"invalid level agent list {list(agents)}")
    seen: set[int] = set()
    for b in part.bundles:
        for g in b:
            if not 0 <= g < inst.n_goods or g in seen:
                raise InputError(f"slot partition is not a partition (good {g})")
            seen.add(g)


def build_propavg_graph(
    inst: Instance, agents: Sequence[int], goods: Iterable[int], part: SlotPartition
) -> PropavgGraph:
    """Edge (i, u) iff slot ``u`` would leave agent ``i`` PROPavg-satisfied
    with the reserve slot's minimum left out of the average."""
    _check_level(inst, agents, part)
    if set(goods) != set(part.goods()):
        raise InputError("slot partition does not cover the level's goods")
    return _Level(inst, agents, part.bundles, part.reserve_slot).propavg_graph()


def satisfies_p1(g: PropavgGraph) -> bool:
    return has_perfect_matching(g.graph, g.reserve_slot)


def satisfies_p2(g: PropavgGraph) -> bool:
    return perfect_after_any_exclusion(g.graph)


def _removal_rule(n: int, value: int, total: int, removed_sum: int) -> bool:
    # v_i(g) >= v_i(M)/n - (1/(n-1)) * sum of removed goods' values, times n(n-1)
    return n * (n - 1) * value >= (n - 1) * total - n * removed_sum


def preprocess(inst: Instance, agents: Sequence[int], goods: Iterable[int]) -> PreprocessState:
    """Hand out single goods to agents already content with them.

    Scans active agents then active goods in ascending order and takes the
    first qualifying pair, repeatedly. The last active agent is never
    removed so no goods are stranded; she receives whatever is left.
    """
    agents = tuple(agents)
    n = len(agents)
    if n < 2:
        raise InputError("preprocessing needs at least two agents")
    active_goods = sorted(goods)
    totals = {i: sum(inst.values[i][g] for g in active_goods) for i in agents}
    removed_sum = {i: 0 for i in agents}
    active = list(agents)
    removed: list[tuple[int, int]] = []
    while len(active) >= 2:
        pick = None
        for i in active:
            row = inst.values[i]
            for g in active_goods:
                if _removal_rule(n, row[g], totals[i], removed_sum[i]):
                    pick = (i, g)
                    break
            if pick:
                break
        if pick is None:
            break
        i, g = pick
        active.remove(i)
        active_goods.remove(g)
        removed.append(pick)
        for j in agents:
            removed_sum[j] += inst.values[j][g]
    return PreprocessState(tuple(active), tuple(removed), tuple(active_goods))


def initial_partition_from_subsolution(
    inst: Instance, agents: Sequence[int], sub_bundles: Sequence[Iterable[int]]
) -> SlotPartition:
    """Bundles of the first ``n-1`` agents plus an empty reserve as the last slot.

    Raises InternalError if the result does not satisfy P1, which cannot
    happen when no agent values any single good at 1/n of the level total or
    more and the sub-solution is PROPavg.
    """
    if len(sub_bundles) != len(agents) - 1:
        raise InputError("sub-solution must have one bundle per non-chooser agent")
    part = SlotPartition(tuple(frozenset(b) for b in sub_bundles) + (frozenset(),), len(agents) - 1)
    _check_level(inst, agents, part)
    if not satisfies_p1(_Level(inst, agents, part.bundles, part.reserve_slot).propavg_graph()):
        raise InternalError("initial partition from the sub-solution violates P1")
    return part


def find_p1_preserving_move(inst: Instance, agents: Sequence[int], g: PropavgGraph) -> tuple[int, int]:
    """First (slot, good) in scan order whose move into the reserve keeps P1."""
    _check_level(inst, agents, g.partition)
    if not satisfies_p1(g):
        raise InputError("partition does not satisfy P1")
    if satisfies_p2(g):
        raise InputError("partition already satisfies P2; no move is needed")
    return _Level(inst, agents, g.partition.bundles, g.reserve_slot).find_move()


def finalize(inst: Instance, agents: Sequence[int], part: SlotPartition, g: PropavgGraph) -> Allocation:
    """Chooser takes her best slot, a perfect matching assigns the others.

    Returned bundles are indexed by position in ``agents``.
    """
    _check_level(inst, agents, part)
    best = _chosen_slot(inst, agents, part)
    m = max_matching(g.graph, best)
    if len(m) != g.graph.left_size:
        raise InternalError(f"no perfect matching after the chooser took slot {best}")
    bundles = [part.bundles[u] for _, u in sorted(m.pairs)] + [part.bundles[best]]
    return Allocation(tuple(bundles))


def _chosen_slot(inst: Instance, agents: Sequence[int], part: SlotPartition) -> int:
    row = inst.values[agents[-1]]
    worth = [sum(row[x] for x in b) for b in part.bundles]
    return max(range(len(worth)), key=lambda u: (worth[u], -u))


# ---------------------------------------------------------------------------
# recursion


def _level_is_propavg(inst: Instance, agents: Sequence[int], goods: Sequence[int], bundles: dict) -> bool:
    """Check a level's output against the verifier on the restricted instance."""
    goods = sorted(goods)
    index = {g: k for k, g in enumerate(goods)}
    sub = Instance(len(agents), len(goods), tuple(tuple(inst.values[i][g] for g in goods) for i in agents))
    alloc = Allocation(tuple(frozenset(index[g] for g in bundles[i]) for i in agents))
    return verify(sub, alloc, Notion.PROPAVG).satisfied


class _Solver:
    def __init__(self, inst: Instance, check: bool):
        self.inst = inst
        self.check = check
        self.trace = SolverTrace()

    def run(self) -> dict[int, frozenset]:
        return self.level(tuple(self.inst.agents), tuple(self.inst.goods), 0)

    def level(self, agents: tuple[int, ...], goods: tuple[int, ...], depth: int) -> dict[int, frozenset]:
        lt = LevelTrace(depth, agents, len(goods))
        self.trace.levels.append(lt)
        if len(agents) == 1:
            lt.kind = "single"
            return {agents[0]: frozenset(goods)}

        state = preprocess(self.inst, agents, goods)
        lt.removed = list(state.removed)
        if state.removed:
            lt.kind = "preprocessed"
            if self.check and len(state.active_agents) >= 2:
                self._check_preprocess_exit(agents, goods, state)
            out = self.level(state.active_agents, state.active_goods, depth + 1)
            for i, g in state.removed:
                out[i] = frozenset((g,))
        else:
            lt.kind = "cut_and_choose"
            out = self.cut_and_choose(agents, goods, depth, lt)
        if self.check and not _level_is_propavg(self.inst, agents, goods, out):
            raise InvariantViolation(f"level {depth} output for agents {list(agents)} is not PROPavg")
        return out

    def cut_and_choose(self, agents, goods, depth, lt: LevelTrace) -> dict[int, frozenset]:
        sub = self.level(agents[:-1], goods, depth + 1)
        part = initial_partition_from_subsolution(self.inst, agents, [sub[i] for i in agents[:-1]])
        state = _Level(self.inst, agents, part.bundles, part.reserve_slot)
        limit = len(goods)
        while True:
            lt.reserve_sizes.append(len(state.bundles[state.r]))
            graph = state.graph()
            p2 = perfect_after_any_exclusion(graph)
            if self.check:
                self._check_iteration(state, graph, p2, lt)
            if p2:
                break
            if lt.iterations >= limit:
                raise InvariantViolation(f"repair loop exceeded {limit} iterations at depth {depth}")
            u, g = state.find_move()
            before = graph if self.check else None
            u_size = len(state.bundles[u])
            state.apply_move(u, g)
            lt.moves.append((u, g))
            if self.check:
                self._check_edges_kept(before, state.graph(), u, u_size)

        final = state.partition()
        pg = PropavgGraph(graph, final, agents)
        lt.chooser_slot = _chosen_slot(self.inst, agents, final)
        alloc = finalize(self.inst, agents, final, pg)
        log.debug("depth %d: %d agents, %d moves, chooser slot %d", depth, len(agents), lt.iterations, lt.chooser_slot)
        return {i: alloc.bundles[k] for k, i in enumerate(agents)}

    # invariant checks (check mode only)

    def _check_preprocess_exit(self, agents, goods, state: PreprocessState) -> None:
        n = len(agents)
        removed_goods = [g for _, g in state.removed]
        for i in state.active_agents:
            row = self.inst.values[i]
            total = sum(row[g] for g in goods)
            rs = sum(row[g] for g in removed_goods)
            for g in state.active_goods:
                if _removal_rule(n, row[g], total, rs):
                    raise InvariantViolation(f"preprocessing stopped with removable pair ({i}, {g})")

    def _check_iteration(self, state: _Level, graph: BipartiteGraph, p2: bool, lt: LevelTrace) -> None:
        fresh = build_propavg_graph(self.inst, state.agents, set().union(*state.bundles), state.partition())
        if fresh.graph != graph:
            raise InvariantViolation("cached PROPavg graph differs from a fresh rebuild")
        p1 = satisfies_p1(fresh)
        lt.p1_at_entry.append(p1)
        if not p1:
            raise InvariantViolation("P1 fails at the start of a repair iteration")
        literal_p2 = all(has_perfect_matching(graph, u) for u in range(graph.right_size))
        if literal_p2 != p2:
            raise InvariantViolation("fast P2 test disagrees with per-slot matchings")
        if graph.left_size <= HALL_BRIDGE_CAP:
            deficient = hall_deficient_set(graph, strict=True)
            if (deficient is None) != p2:
                raise InvariantViolation("P2 disagrees with the strict Hall condition")
        sizes = lt.reserve_sizes
        if len(sizes) >= 2 and sizes[-1] != sizes[-2] + 1:
            raise InvariantViolation("reserve bundle did not grow by exactly one good")

    @staticmethod
    def _check_edges_kept(before: BipartiteGraph, after: BipartiteGraph, u: int, u_size: int) -> None:
        if u_size < 2:
            return
        for a, w in before.edges():
            if w != u and not after.has_edge(a, w):
                raise InvariantViolation(f"edge ({a}, {w}) vanished after moving a good out of slot {u}")


def solve_traced(inst: Instance, check_invariants: bool = False) -> tuple[Allocation, SolverTrace]:
    """Compute a PROPavg allocation and the per-level trace.

    With ``check_invariants`` every repair iteration and every level's output
    is re-verified from scratch; any failure raises InvariantViolation.
    """
    if not isinstance(inst, Instance):
        raise InputError("solve expects an Instance")
    solver = _Solver(inst, check_invariants)
    out = solver.run()
    alloc = Allocation(tuple(out[i] for i in inst.agents))
    return alloc, solver.trace


def solve(inst: Instance, check_invariants: bool = False) -> Allocation:
    return solve_traced(inst, check_invariants)[0]
