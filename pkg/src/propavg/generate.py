"""Seeded instance generators."""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Sequence

from .errors import InputError
from .instance import Instance


def random_instance(rng: random.Random, n_agents: int, n_goods: int, max_value: int) -> Instance:
    """Independent uniform integer values in ``[0, max_value]``."""
    if n_agents < 1 or n_goods < 0 or max_value < 0:
        raise InputError("need n_agents >= 1, n_goods >= 0, max_value >= 0")
    rows = tuple(tuple(rng.randint(0, max_value) for _ in range(n_goods)) for _ in range(n_agents))
    return Instance(n_agents, n_goods, rows)


def random_instances(n_agents: int, n_goods: int, max_value: int, count: int, seed: int) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng, n_agents, n_goods, max_value) for _ in range(count)]


def random_family(
    agents: Sequence[int], goods: Sequence[int], max_value: int, count: int, seed: int
) -> Iterator[Instance]:
    """``count`` instances with sizes drawn uniformly from the given choices."""
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.choice(list(agents))
        m = rng.choice(list(goods))
        yield random_instance(rng, n, m, max_value)


def exhaustive_family(n_agents: int, n_goods: int, max_value: int) -> Iterator[Instance]:
    """Every valuation matrix with entries in ``0..max_value``."""
    cells = n_agents * n_goods
    for flat in itertools.product(range(max_value + 1), repeat=cells):
        rows = tuple(flat[i * n_goods:(i + 1) * n_goods] for i in range(n_agents))
        yield Instance(n_agents, n_goods, rows)
