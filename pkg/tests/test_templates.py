import itertools
import random
from math import perm

import pytest
from hypothesis import given, strategies as st

from oracles import aps_by_subsets
from rainbowap.ground import cyclic, interval
from rainbowap.progressions import gamma_closed_form
from rainbowap.templates import (
    coloring_to_template, container_statistic, count_rainbow_aps_of_coloring,
    count_rainbow_subtemplates, full_template, is_subtemplate, make_coloring, make_template,
    parse_coloring_literal, parse_template, rainbow_witness,
)


def test_coloring_basics():
    c = make_coloring(interval(4), {1: 1, 2: 2, 3: 2, 4: 3})
    assert c.r == 3 and c.is_exact
    assert c[3] == 2
    assert c.literal() == "1:1,2:2,3:2,4:3"
    assert make_coloring(interval(3), [1, 1, 1], r=2).is_exact is False
    with pytest.raises(ValueError):
        make_coloring(interval(3), {1: 1, 2: 1})
    with pytest.raises(ValueError):
        make_coloring(interval(3), [1, 4, 1], r=3)


def test_parse_coloring_literal():
    assert parse_coloring_literal("1:1, 2:2,3:2") == {1: 1, 2: 2, 3: 2}
    for bad in ["", "1-2", "1:a"]:
        with pytest.raises(ValueError):
            parse_coloring_literal(bad)


def test_rainbow_witness_examples():
    c = make_coloring(interval(3), [1, 2, 3])
    assert rainbow_witness(c, 3).members == (1, 2, 3)
    assert rainbow_witness(make_coloring(interval(4), [1, 2, 2, 3]), 3) is None
    assert rainbow_witness(make_coloring(interval(5), [1, 1, 2, 2, 1]), 3) is None
    # first in (first, diff) order, not the shortest difference
    c = make_coloring(interval(5), [1, 1, 2, 1, 3])
    assert rainbow_witness(c, 3).members == (1, 3, 5)
    z = make_coloring(cyclic(4), [1, 1, 2, 3])
    assert rainbow_witness(z, 3) is not None


@given(st.integers(3, 9).flatmap(lambda n: st.lists(st.integers(1, 4), min_size=n, max_size=n)),
       st.integers(2, 4))
def test_rainbow_witness_against_subset_oracle(colors, k):
    n = len(colors)
    c = make_coloring(interval(n), colors, r=4)
    rainbow = [ap for ap in aps_by_subsets(range(1, n + 1), k)
               if len({colors[x - 1] for x in ap}) == k]
    w = rainbow_witness(c, k)
    assert (w is None) == (not rainbow)
    assert count_rainbow_aps_of_coloring(c, k) == len(rainbow)
    if w is not None:
        assert w.members in rainbow


def test_template_parsing_and_order():
    P = parse_template("1: 1 2\n2: 3\n3:\n")
    assert P.order == 3 and P.r == 3
    assert P(3) == frozenset()
    assert parse_template(P.to_text(), r=3) == P
    with pytest.raises(ValueError):
        parse_template("1: 1\n3: 2\n")
    with pytest.raises(ValueError):
        make_template(2, 2, {1: [3]})


def test_subtemplate():
    full = full_template(4, 3)
    c = make_coloring(interval(4), [1, 2, 2, 3])
    P = coloring_to_template(c, 4)
    assert is_subtemplate(P, full)
    assert not is_subtemplate(full, P)
    with pytest.raises(ValueError):
        coloring_to_template(make_coloring(cyclic(4), [1, 2, 2, 3]), 4)


def test_rainbow_subtemplates_of_full_template():
    for n in range(1, 41):
        for r in range(2, 7):
            for k in range(2, r + 1):
                want = gamma_closed_form(n, k) * perm(r, k) if n >= k else 0
                assert count_rainbow_subtemplates(full_template(n, r), k) == want


def test_rainbow_subtemplates_of_coloring_template():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(1, 8)
        r = rng.randint(1, 4)
        c = make_coloring(interval(n), [rng.randint(1, r) for _ in range(n)], r=r)
        for k in (2, 3):
            assert count_rainbow_subtemplates(coloring_to_template(c, n), k) == \
                count_rainbow_aps_of_coloring(c, k)


def test_rainbow_subtemplates_by_brute_force():
    P = make_template(5, 3, {1: [1, 2], 2: [2], 3: [1, 2, 3], 4: [3], 5: [1, 3]})
    want = 0
    for ap in aps_by_subsets(range(1, 6), 3):
        want += sum(1 for pick in itertools.product(*(sorted(P(x)) for x in ap))
                    if len(set(pick)) == 3)
    assert count_rainbow_subtemplates(P, 3) == want


def test_container_statistic():
    c = make_coloring(interval(4), [1, 2, 3, 1])
    stat = container_statistic(coloring_to_template(c, 4), 3)
    assert stat.rk == 2
    assert stat.bound == pytest.approx(4 ** (5 / 3) / 3)
    assert stat.satisfies is True
    assert container_statistic(full_template(4, 3), 3).satisfies is False
    empty = make_template(6, 3, {})
    assert container_statistic(empty, 3).satisfies is True
    # larger palettes only add rainbow subtemplates
    assert container_statistic(full_template(10, 3), 3).rk == 6 * 20


def test_full_palette_on_5_violates_container_bound():
    stat = container_statistic(full_template(5, 3), 3)
    assert stat.rk == 24
    assert stat.bound == pytest.approx(5 ** (5 / 3) / 3)
    assert stat.satisfies is False


palette_maps = st.integers(3, 9).flatmap(lambda n: st.lists(
    st.frozensets(st.integers(1, 4)), min_size=n, max_size=n))


@given(palette_maps, st.data())
def test_rainbow_count_monotone_under_subtemplates(pals, data):
    n = len(pals)
    big = make_template(n, 4, dict(enumerate(pals, start=1)))
    small = make_template(n, 4, {x: data.draw(st.sets(st.sampled_from(sorted(p))) if p
                                               else st.just(set()))
                                 for x, p in enumerate(pals, start=1)})
    assert is_subtemplate(small, big)
    for k in (2, 3):
        assert count_rainbow_subtemplates(small, k) <= count_rainbow_subtemplates(big, k)


colorings = st.integers(3, 10).flatmap(
    lambda n: st.lists(st.integers(1, 4), min_size=n, max_size=n))


@given(colorings, st.permutations([1, 2, 3, 4]), st.integers(2, 4))
def test_rainbow_count_invariant_under_relabeling(colors, perm_, k):
    n = len(colors)
    a = make_coloring(interval(n), colors, r=4)
    b = make_coloring(interval(n), [perm_[c - 1] for c in colors], r=4)
    assert count_rainbow_aps_of_coloring(a, k) == count_rainbow_aps_of_coloring(b, k)


@given(colorings, st.integers(1, 4), st.integers(1, 4), st.integers(2, 4))
def test_merging_colors_never_adds_rainbow_aps(colors, a, b, k):
    n = len(colors)
    before = make_coloring(interval(n), colors, r=4)
    after = make_coloring(interval(n), [a if c == b else c for c in colors], r=4)
    assert count_rainbow_aps_of_coloring(after, k) <= count_rainbow_aps_of_coloring(before, k)
