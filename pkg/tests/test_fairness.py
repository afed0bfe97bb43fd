import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from propavg import (
    ALL_NOTIONS,
    Allocation,
    InputError,
    Instance,
    Notion,
    certificate,
    deficiency_numerator,
    is_satisfied,
    verify,
)

from .conftest import VERDICT_TABLE, VERDICT_NOTIONS, fraction_verdict, random_allocation, random_instance

# implications that hold for every instance, allocation and agent
SOUND_IMPLICATIONS = [
    (Notion.PROP, Notion.PROPX),
    (Notion.PROPX, Notion.PROPAVG),
    (Notion.AVG_EFX, Notion.PROPAVG),
    (Notion.PROPAVG, Notion.PROPM),
    (Notion.PROPM, Notion.PROP1),
    (Notion.EF, Notion.EFX),
    (Notion.EFX, Notion.AVG_EFX),
    (Notion.EF, Notion.EF1),
    (Notion.EFX, Notion.EF1),
    (Notion.EF, Notion.PROP),
]


@pytest.mark.parametrize("bundles,expected", VERDICT_TABLE)
def test_verdict_table_rows(worked, bundles, expected):
    alloc = Allocation.from_lists(bundles)
    got = tuple(verify(worked, alloc, n).satisfied for n in VERDICT_NOTIONS)
    assert got == expected


def test_propavg_deficiency_example(worked):
    alloc = Allocation.from_lists([[0], [1, 2, 3], []])
    assert deficiency_numerator(worked, alloc, 2, Notion.PROPAVG) == (2, 16)
    assert not is_satisfied(worked, alloc, 2, Notion.PROPAVG)


def test_propavg_certificate_example(worked):
    alloc = Allocation.from_lists([[0], [1, 2], [3]])
    c = certificate(worked, alloc, 2, Notion.PROPAVG)
    assert (c.lhs, c.rhs, c.satisfied) == (87, 60, True)


def test_efx_certificate_example(worked):
    alloc = Allocation.from_lists([[0], [1, 2], [3]])
    c = certificate(worked, alloc, 2, Notion.EFX)
    assert (c.lhs, c.rhs, c.other, c.satisfied) == (13, 14, 1, False)


def test_propm_row4_failures(worked):
    report = verify(worked, Allocation.from_lists([[0, 1, 2, 3], [], []]), Notion.PROPM)
    assert report.failing_agents() == [1, 2]


def test_deficiency_rows(worked):
    alloc = Allocation.from_lists([[0], [1, 3], [2]])
    # agent 0 sees other bundles {g2,g4} and {g3}: minima 6 and 7, maxima 7 and 7
    assert deficiency_numerator(worked, alloc, 0, Notion.PROP) == (1, 0)
    assert deficiency_numerator(worked, alloc, 0, Notion.PROP1) == (1, 7)
    assert deficiency_numerator(worked, alloc, 0, Notion.PROPM) == (1, 7)
    assert deficiency_numerator(worked, alloc, 0, Notion.PROPAVG) == (2, 13)
    assert deficiency_numerator(worked, alloc, 0, Notion.AVG_EFX) == (3, 13)
    assert deficiency_numerator(worked, alloc, 0, Notion.PROPX) == (1, 6)


def test_empty_other_bundle_contributes_zero():
    inst = Instance.from_rows([[4, 5], [1, 1]])
    alloc = Allocation.from_lists([[0, 1], []])
    for notion in (Notion.PROP1, Notion.PROPM, Notion.PROPAVG, Notion.AVG_EFX, Notion.PROPX):
        assert deficiency_numerator(inst, alloc, 0, notion)[1] == 0


@pytest.mark.parametrize("notion", ALL_NOTIONS)
def test_single_agent_always_satisfied(notion):
    inst = Instance.from_rows([[3, 0, 9]])
    alloc = Allocation.from_lists([[0, 1, 2]])
    assert verify(inst, alloc, notion).satisfied
    assert deficiency_numerator(inst, alloc, 0, notion) == (1, 0) or notion.is_envy


def test_envy_notions_have_no_deficiency(worked):
    with pytest.raises(InputError):
        deficiency_numerator(worked, Allocation.from_lists([[0], [1], [2, 3]]), 0, Notion.EF)


@pytest.mark.parametrize("notion", ALL_NOTIONS)
def test_zero_total_agent_satisfied(notion):
    inst = Instance.from_rows([[0, 0, 0], [5, 1, 2], [3, 3, 3]])
    alloc = Allocation.from_lists([[], [0, 1, 2], []])
    assert is_satisfied(inst, alloc, 0, notion)


def test_invalid_allocation_rejected(worked):
    with pytest.raises(InputError):
        verify(worked, Allocation.from_lists([[0], [1], []]), Notion.PROPAVG)


def test_notion_parse():
    assert Notion.parse("propavg") is Notion.PROPAVG
    assert Notion.parse("Avg-EFX") is Notion.AVG_EFX
    with pytest.raises(InputError):
        Notion.parse("PROP2")


def test_matches_fraction_oracle():
    rng = random.Random(99)
    for _ in range(1500):
        n, m = rng.randint(1, 5), rng.randint(0, 7)
        inst = random_instance(rng, n, m, rng.choice([1, 3, 20]))
        alloc = random_allocation(rng, n, m)
        i = rng.randrange(n)
        for notion in ALL_NOTIONS:
            assert is_satisfied(inst, alloc, i, notion) == fraction_verdict(inst, alloc, i, notion), (inst, alloc, notion)


def test_deficiency_matches_fraction_oracle():
    from fractions import Fraction

    rng = random.Random(5)
    for _ in range(500):
        n, m = rng.randint(2, 5), rng.randint(0, 7)
        inst = random_instance(rng, n, m, 20)
        alloc = random_allocation(rng, n, m)
        i = rng.randrange(n)
        row = inst.values[i]
        mins = [min((row[g] for g in b), default=0) for k, b in enumerate(alloc.bundles) if k != i]
        coef, num = deficiency_numerator(inst, alloc, i, Notion.PROPAVG)
        assert Fraction(num, coef) == Fraction(sum(mins), n - 1)
        coef, num = deficiency_numerator(inst, alloc, i, Notion.AVG_EFX)
        assert Fraction(num, coef) == Fraction(sum(mins), n)


def test_propx_does_not_imply_avg_efx():
    # PROPx only subtracts the smallest minimum; Avg-EFX subtracts sum/n, which for
    # two agents is half of it, so the former can hold while the latter fails
    inst = Instance.from_rows([[5, 5], [5, 5]])
    alloc = Allocation.from_lists([[], [0, 1]])
    assert is_satisfied(inst, alloc, 0, Notion.PROPX)
    assert not is_satisfied(inst, alloc, 0, Notion.AVG_EFX)
    assert is_satisfied(inst, alloc, 0, Notion.PROPAVG)


small_cases = st.tuples(st.integers(1, 5), st.integers(0, 7)).flatmap(
    lambda nm: st.tuples(
        st.lists(st.lists(st.integers(0, 12), min_size=nm[1], max_size=nm[1]), min_size=nm[0], max_size=nm[0]),
        st.lists(st.integers(0, nm[0] - 1), min_size=nm[1], max_size=nm[1]),
        st.integers(0, nm[0] - 1),
    )
)


def _case(rows, owners):
    inst = Instance.from_rows(rows)
    bundles = [[g for g, o in enumerate(owners) if o == a] for a in range(inst.n_agents)]
    return inst, Allocation.from_lists(bundles)


@settings(max_examples=400)
@given(small_cases)
def test_implications(case):
    rows, owners, agent = case
    inst, alloc = _case(rows, owners)
    verdict = {n: is_satisfied(inst, alloc, agent, n) for n in ALL_NOTIONS}
    for a, b in SOUND_IMPLICATIONS:
        assert not verdict[a] or verdict[b], (a, b)


@settings(max_examples=200)
@given(small_cases, st.sampled_from([2, 7, 1000]))
def test_scaling_invariance(case, c):
    rows, owners, agent = case
    inst, alloc = _case(rows, owners)
    scaled = inst.scaled_row(agent, c)
    for n in ALL_NOTIONS:
        assert verify(inst, alloc, n).verdicts == verify(scaled, alloc, n).verdicts


@settings(max_examples=200)
@given(small_cases, st.randoms(use_true_random=False))
def test_relabelling_other_bundles(case, rnd):
    rows, owners, agent = case
    inst, alloc = _case(rows, owners)
    others = [k for k in inst.agents if k != agent]
    perm = others[:]
    rnd.shuffle(perm)
    bundles = list(alloc.bundles)
    relabelled = list(bundles)
    for src, dst in zip(others, perm):
        relabelled[dst] = bundles[src]
    alt = Allocation(tuple(relabelled))
    for n in ALL_NOTIONS:
        assert is_satisfied(inst, alloc, agent, n) == is_satisfied(inst, alt, agent, n)


def test_report_shape(worked):
    report = verify(worked, Allocation.from_lists([[0], [1, 2], [3]]), Notion.EFX)
    assert report.verdicts == (True, True, False)
    assert not report.satisfied
    for c in report.certificates:
        assert c.satisfied == (c.lhs >= c.rhs)


def test_exhaustive_tiny_against_oracle():
    # every allocation of every 2x3 instance with values 0..2
    for flat in itertools.product(range(3), repeat=6):
        inst = Instance.from_rows([flat[:3], flat[3:]])
        for owners in itertools.product(range(2), repeat=3):
            alloc = Allocation.from_lists([[g for g in range(3) if owners[g] == a] for a in range(2)])
            for notion in (Notion.PROPAVG, Notion.PROPX, Notion.EFX, Notion.PROP1):
                assert is_satisfied(inst, alloc, 0, notion) == fraction_verdict(inst, alloc, 0, notion)
