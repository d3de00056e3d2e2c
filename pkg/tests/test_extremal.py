from fractions import Fraction

import pytest

from oracles import naive_aw, naive_free_count, naive_g, pattern_solutions
from rainbowap.counting import BudgetExceeded
from rainbowap.extremal import (
    UndefinedAw, anti_vdw, anti_vdw_definitional, check_merge_monotonicity, colorings_with_at_most,
    cyclic_compare, find_exact_free_coloring, merge_classes, scan_subsets, sidon_experiment,
)
from rainbowap.ground import interval, subset
from rainbowap.templates import make_coloring, rainbow_witness

# tests/oracles.naive_aw on [n], k = 3, n = 3..9
FROZEN_AW = [3, 4, 4, 4, 4, 5, 4]


def test_aw_frozen_values():
    assert [anti_vdw(interval(n), 3).aw for n in range(3, 10)] == FROZEN_AW


def test_aw_matches_oracle_on_subsets():
    for elems in [(1, 2, 3, 5), (1, 3, 5, 7), (2, 3, 4, 6, 8)]:
        S = subset(8, elems)
        assert anti_vdw(S, 3).aw == naive_aw(elems, 3) == anti_vdw_definitional(S, 3)


def test_aw_witness_is_rainbow_free_and_exact():
    res = anti_vdw(interval(8), 3)
    assert res.witness.r == res.aw - 1
    assert res.witness.is_exact
    assert rainbow_witness(res.witness, 3) is None
    assert res.to_dict()["aw"] == 5


def test_aw_undefined_without_aps():
    with pytest.raises(UndefinedAw):
        anti_vdw(subset(5, [1, 2, 4]), 3)
    with pytest.raises(UndefinedAw):
        anti_vdw_definitional(subset(5, [1, 2, 4]), 3)


def test_find_exact_free_coloring():
    c = find_exact_free_coloring(interval(4), 3, 3)
    assert c.literal() == "1:1,2:2,3:2,4:3"
    assert find_exact_free_coloring(interval(4), 3, 4) is None
    assert find_exact_free_coloring(interval(4), 3, 5) is None


def test_merge_classes():
    c = make_coloring(interval(4), [1, 2, 2, 3])
    m = merge_classes(c, 1, 3)
    assert m.colors == (1, 2, 2, 1) and m.r == 2
    with pytest.raises(ValueError):
        merge_classes(c, 2, 2)
    assert check_merge_monotonicity(c, 3)
    assert not check_merge_monotonicity(make_coloring(interval(3), [1, 2, 3]), 3)


def test_scan_deletions_and_violations():
    res = scan_subsets(6, 3, 3)
    assert res.full_count == naive_g(range(1, 7), 3, 3)
    assert len(res.rows) == 6
    for s, c in res.rows:
        assert c == naive_g(s, 3, 3)
    assert res.violations == [s for s, c in res.rows if c >= res.full_count]
    assert res.max_count == max(c for _, c in res.rows)
    rows = res.csv_rows()
    assert set(rows[0]) == {"subset", "count", "is_max", "violation"}


def test_scan_all_subsets_small():
    res = scan_subsets(5, 3, 3, "all_subsets")
    assert len(res.rows) == 2**5 - 2
    assert [len(s) for s, _ in res.rows] == sorted(len(s) for s, _ in res.rows)
    with pytest.raises(BudgetExceeded):
        scan_subsets(15, 3, 3, "all_subsets")


def test_scan_random_reproducible():
    a = scan_subsets(9, 3, 3, "random", samples=20, seed=5)
    b = scan_subsets(9, 3, 3, "random", samples=20, seed=5, workers=3)
    assert a.rows == b.rows
    with pytest.raises(ValueError):
        scan_subsets(5, 3, 3, "greedy")


def test_cyclic_compare():
    res = cyclic_compare(6, 3, 3)
    assert (res.g_cyclic, res.g_interval) == (207, 225)
    assert res.ratio_cyclic == Fraction(207, 64)
    assert res.target == 3


def test_colorings_with_at_most():
    assert colorings_with_at_most(4, 3, 4) == 4**4 - 24
    assert colorings_with_at_most(2, 3, 5) == 2**5


def test_sidon_experiment():
    rep = sidon_experiment(4, 4)
    assert rep.g_full == 232
    assert rep.few_color_fraction == Fraction(4**4 - 24, 232)
    assert rep.to_dict()["g"] == "232"
    rep5 = sidon_experiment(5, 4)
    assert rep5.few_color_fraction == Fraction(98, 101)
    sets = sorted({tuple(sorted(x)) for x in pattern_solutions([[1, -1, 1, -1]], range(1, 6))})
    assert rep5.g_full == naive_free_count(range(1, 6), 4, sets) == 808


def test_aw_within_trivial_bounds():
    for n in range(3, 16):
        aw = anti_vdw(interval(n), 3).aw
        assert 3 <= aw <= n


def test_deletion_scan_on_4():
    res = scan_subsets(4, 3, 3)
    counts = dict(res.rows)
    assert counts[(1, 2, 3)] == 21
    assert counts[(1, 2, 4)] == 27
    assert res.full_count == 51 and res.violations == []


def test_sidon_fraction_at_most_one():
    for n in range(1, 7):
        rep = sidon_experiment(n, 4)
        assert 0 < rep.few_color_fraction <= 1
        if n <= 3:
            assert rep.g_full == 4**n and rep.few_color_fraction == Fraction(
                colorings_with_at_most(4, 3, n), 4**n)
