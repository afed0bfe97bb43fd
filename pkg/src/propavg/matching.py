"""Bipartite matching and Hall-condition utilities.

Graphs here are small (at most one vertex per agent on each side), so the
matching is plain augmenting-path search with a fixed scan order, which
keeps results reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from .errors import InputError

DEFAULT_HALL_CAP = 20


@dataclass(frozen=True)
class BipartiteGraph:
    left_size: int
    right_size: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.left_size < 0 or self.right_size < 0:
            raise InputError("vertex counts must be non-negative")
        adj = tuple(tuple(sorted(set(nbrs))) for nbrs in self.adjacency)
        if len(adj) != self.left_size:
            raise InputError(f"adjacency has {len(adj)} rows for {self.left_size} left vertices")
        for a, nbrs in enumerate(adj):
            for u in nbrs:
                if not 0 <= u < self.right_size:
                    raise InputError(f"edge ({a}, {u}) points outside the right side")
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, left_size: int, right_size: int, edges: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        adj: list[set[int]] = [set() for _ in range(left_size)]
        for a, u in edges:
            if not 0 <= a < left_size:
                raise InputError(f"edge ({a}, {u}) points outside the left side")
            adj[a].add(u)
        return cls(left_size, right_size, tuple(tuple(s) for s in adj))

    def has_edge(self, left: int, right: int) -> bool:
        return right in self.adjacency[left]

    def edges(self) -> list[tuple[int, int]]:
        return [(a, u) for a, nbrs in enumerate(self.adjacency) for u in nbrs]

    def neighbours(self, left_set: Iterable[int], excluded_right: Optional[int] = None) -> set[int]:
        out: set[int] = set()
        for a in left_set:
            out.update(self.adjacency[a])
        out.discard(excluded_right)
        return out


@dataclass(frozen=True)
class Matching:
    pairs: frozenset = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def left_to_right(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def right_to_left(self) -> dict[int, int]:
        return {u: a for a, u in self.pairs}


def _check_excluded(g: BipartiteGraph, excluded_right: Optional[int]) -> None:
    if excluded_right is not None and not 0 <= excluded_right < g.right_size:
        raise InputError(f"excluded right vertex {excluded_right} out of range")


def _augment(g: BipartiteGraph, start: int, match_l: list, match_r: list, excluded: Optional[int]) -> bool:
    """BFS for an augmenting path from free left vertex ``start``."""
    parent: dict[int, Optional[int]] = {start: None}  # left -> right used to reach it
    via: dict[int, int] = {}  # right -> left it was reached from
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for u in g.adjacency[a]:
            if u == excluded or u in via:
                continue
            via[u] = a
            b = match_r[u]
            if b is None:
                # flip the path back to start
                while u is not None:
                    a = via[u]
                    prev = match_l[a]
                    match_l[a] = u
                    match_r[u] = a
                    u = prev
                return True
            if b not in parent:
                parent[b] = u
                queue.append(b)
    return False


def max_matching(
    g: BipartiteGraph,
    excluded_right: Optional[int] = None,
    initial: Optional[Matching] = None,
) -> Matching:
    """Maximum-cardinality matching of ``g`` with ``excluded_right`` deleted.

    ``initial`` may seed the search with a partial matching; pairs that are
    not edges of the (reduced) graph are dropped first.
    """
    _check_excluded(g, excluded_right)
    match_l: list[Optional[int]] = [None] * g.left_size
    match_r: list[Optional[int]] = [None] * g.right_size
    if initial is not None:
        for a, u in sorted(initial.pairs):
            if (0 <= a < g.left_size and u != excluded_right and g.has_edge(a, u)
                    and match_l[a] is None and match_r[u] is None):
                match_l[a] = u
                match_r[u] = a
    for a in range(g.left_size):
        if match_l[a] is None:
            _augment(g, a, match_l, match_r, excluded_right)
    return Matching(frozenset((a, u) for a, u in enumerate(match_l) if u is not None))


def has_perfect_matching(g: BipartiteGraph, excluded_right: Optional[int] = None) -> bool:
    """True iff every left vertex can be matched once ``excluded_right`` is gone."""
    return len(max_matching(g, excluded_right)) == g.left_size


def freeable_right(g: BipartiteGraph, matching: Matching) -> set[int]:
    """Right vertices left unmatched by some maximum matching.

    ``matching`` must be maximum. These are the right vertices reachable
    from an unmatched right vertex by an even alternating path.
    """
    match_l = matching.left_to_right
    rev: list[list[int]] = [[] for _ in range(g.right_size)]
    for a, nbrs in enumerate(g.adjacency):
        for u in nbrs:
            rev[u].append(a)
    matched_r = set(match_l.values())
    reached = {u for u in range(g.right_size) if u not in matched_r}
    queue = deque(sorted(reached))
    seen_left: set[int] = set()
    while queue:
        u = queue.popleft()
        for a in rev[u]:
            if a in seen_left or a not in match_l:
                continue
            seen_left.add(a)
            w = match_l[a]
            if w not in reached:
                reached.add(w)
                queue.append(w)
    return reached


def perfect_after_any_exclusion(g: BipartiteGraph) -> bool:
    """True iff deleting any single right vertex leaves a left-perfect matching."""
    m = max_matching(g)
    if len(m) < g.left_size:
        return False
    return len(freeable_right(g, m)) == g.right_size


def hall_deficient_set(
    g: BipartiteGraph,
    excluded_right: Optional[int] = None,
    strict: bool = False,
    cap: int = DEFAULT_HALL_CAP,
) -> Optional[frozenset]:
    """Smallest left set violating Hall's condition, by enumeration.

    Non-strict: ``|S| > |N(S)|``. Strict: non-empty ``S`` with
    ``|S| + 1 > |N(S)|``. Returns ``None`` if the condition holds everywhere.
    Exponential in ``left_size``; refuses graphs above ``cap``.
    """
    _check_excluded(g, excluded_right)
    if g.left_size > cap:
        raise InputError(f"left side {g.left_size} exceeds subset-enumeration cap {cap}")
    masks = []
    for nbrs in g.adjacency:
        m = 0
        for u in nbrs:
            if u != excluded_right:
                m |= 1 << u
        masks.append(m)
    slack = 1 if strict else 0
    for size in range(1, g.left_size + 1):
        for subset in combinations(range(g.left_size), size):
            nb = 0
            for a in subset:
                nb |= masks[a]
            if size + slack > bin(nb).count("1"):
                return frozenset(subset)
    return None
