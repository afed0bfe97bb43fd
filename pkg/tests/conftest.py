import random
from fractions import Fraction

import pytest

from propavg import Allocation, Instance, Notion

# three identical agents over four goods; goods g1..g4 are indices 0..3
WORKED_ROW = (10, 7, 7, 6)

# four reference allocations and their EFX / PROPavg / PROPm / PROP1 verdicts
VERDICT_TABLE = [
    ([[0], [1, 3], [2]], (True, True, True, True)),
    ([[0], [1, 2], [3]], (False, True, True, True)),
    ([[0], [1, 2, 3], []], (False, False, True, True)),
    ([[0, 1, 2, 3], [], []], (False, False, False, True)),
]
VERDICT_NOTIONS = (Notion.EFX, Notion.PROPAVG, Notion.PROPM, Notion.PROP1)


@pytest.fixture
def worked():
    return Instance.from_rows([WORKED_ROW] * 3)


def random_instance(rng, n, m, vmax):
    return Instance.from_rows([[rng.randint(0, vmax) for _ in range(m)] for _ in range(n)])


def random_allocation(rng, n, m):
    bundles = [set() for _ in range(n)]
    for g in range(m):
        bundles[rng.randrange(n)].add(g)
    return Allocation.from_lists(bundles)


def fraction_verdict(inst, alloc, agent, notion):
    """Independent exact-rational evaluation straight from the definitions."""
    n = inst.n_agents
    row = inst.values[agent]
    total = sum(row)
    if n == 1:
        return True
    val = [Fraction(sum(row[g] for g in b)) for b in alloc.bundles]
    mins = [Fraction(min((row[g] for g in b), default=0)) for b in alloc.bundles]
    others = [k for k in range(n) if k != agent]
    own = val[agent]
    if notion is Notion.EF:
        return all(own >= val[j] for j in others)
    if notion is Notion.EFX:
        return all(own >= val[j] - mins[j] for j in others)
    if notion is Notion.EF1:
        return all(not alloc.bundles[j] or own >= val[j] - max(row[g] for g in alloc.bundles[j]) for j in others)
    d = {
        Notion.PROP: Fraction(0),
        Notion.PROP1: max((Fraction(max(row[g] for g in alloc.bundles[k])) for k in others if alloc.bundles[k]),
                          default=Fraction(0)),
        Notion.PROPM: max(mins[k] for k in others),
        Notion.PROPAVG: sum(mins[k] for k in others) / (n - 1),
        Notion.AVG_EFX: sum(mins[k] for k in others) / n,
        Notion.PROPX: min(mins[k] for k in others),
    }[notion]
    return own >= Fraction(total, n) - d


@pytest.fixture
def rng():
    return random.Random(12345)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, title, ok, detail=""):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}"
    if detail:
        line += f": {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
