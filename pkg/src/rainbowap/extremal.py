"""Experiment drivers: subset extremality scans, anti-van der Waerden numbers,
the cyclic-group comparison, and the Sidon-pattern experiment."""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

from . import counting
from .counting import DEFAULT_BUDGET, Budget, ap_system, pattern_system
from .ground import GroundSet, cyclic, interval, subset
from .progressions import SIDON, LinearPattern, gamma_k
from .templates import Coloring, make_coloring, rainbow_witness

STRATEGIES = ("all_subsets", "deletions", "random")
ALL_SUBSETS_MAX_N = 14


@dataclass
class ScanResult:
    n: int
    r: int
    k: object  # int for APs, pattern label for linear patterns
    strategy: str
    full_count: int
    max_subset: Optional[tuple[int, ...]]
    max_count: int
    violations: list[tuple[int, ...]]
    rows: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    nodes: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n, "r": self.r, "k": self.k, "strategy": self.strategy,
            "full_count": str(self.full_count),
            "max_subset": list(self.max_subset) if self.max_subset else None,
            "max_count": str(self.max_count),
            "violations": [list(s) for s in self.violations],
            "scanned": len(self.rows),
            "nodes": self.nodes,
        }

    def csv_rows(self) -> list[dict]:
        return [
            {
                "subset": " ".join(map(str, s)),
                "count": str(c),
                "is_max": int(s == self.max_subset),
                "violation": int(c >= self.full_count),
            }
            for s, c in self.rows
        ]


def _proper_subsets(n: int, strategy: str, samples: int, density: float, seed: int):
    if strategy == "all_subsets":
        for size in range(1, n):
            yield from itertools.combinations(range(1, n + 1), size)
    elif strategy == "deletions":
        if n > 1:  # [1] minus its element is empty
            for x in range(1, n + 1):
                yield tuple(y for y in range(1, n + 1) if y != x)
    elif strategy == "random":
        rng = random.Random(seed)
        seen = set()
        for _ in range(samples):
            s = tuple(x for x in range(1, n + 1) if rng.random() < density)
            if 0 < len(s) < n and s not in seen:
                seen.add(s)
                yield s
    else:
        raise ValueError(f"unknown strategy {strategy!r}")


def _scan(n: int, r: int, label, make_system, strategy: str, budget: Budget, workers: int,
          samples: int, density: float, seed: int) -> ScanResult:
    if strategy == "all_subsets" and n > ALL_SUBSETS_MAX_N:
        raise counting.BudgetExceeded(
            f"all_subsets scan limited to n <= {ALL_SUBSETS_MAX_N}, got n={n}")
    full_count, nodes = counting.pruned_count(make_system(interval(n)), r, budget=budget)
    subsets = sorted(set(_proper_subsets(n, strategy, samples, density, seed)),
                     key=lambda s: (len(s), s))

    def one(s: tuple[int, ...]):
        return counting.pruned_count(make_system(subset(n, s)), r, budget=budget)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, subsets))
    else:
        results = [one(s) for s in subsets]

    rows = [(s, c) for s, (c, _) in zip(subsets, results)]
    nodes += sum(nd for _, nd in results)
    best: Optional[tuple[int, ...]] = None
    best_count = -1
    for s, c in rows:
        if c > best_count:
            best, best_count = s, c
    violations = [s for s, c in rows if c >= full_count]
    return ScanResult(n, r, label, strategy, full_count, best, max(best_count, 0),
                      violations, rows, nodes)


def scan_subsets(n: int, r: int, k: int, strategy: str = "deletions", *,
                 budget: Budget = DEFAULT_BUDGET, workers: int = 1, samples: int = 200,
                 density: float = 0.5, seed: int = 0) -> ScanResult:
    """Count rainbow k-AP-free colorings of proper subsets of [n] and compare with [n].

    Subsets with ``g(S) >= g([n])`` are listed in ``violations``; at small n
    these are findings, since the strict inequality is only guaranteed for
    large n.
    """
    return _scan(n, r, k, lambda S: ap_system(S, k), strategy, budget, workers,
                 samples, density, seed)


# --------------------------------------------------------------------------- #
# anti-van der Waerden numbers
# --------------------------------------------------------------------------- #

@dataclass
class AwResult:
    ground: GroundSet
    k: int
    aw: int
    witness: Coloring
    exact_counts: list[int]  # canonical rainbow-free counts by colors used

    def to_dict(self) -> dict:
        return {
            "ground": self.ground.descriptor(),
            "k": self.k,
            "aw": self.aw,
            "witness": self.witness.literal(),
            "exact_counts": [str(c) for c in self.exact_counts],
        }


class UndefinedAw(ValueError):
    """The ground set has no k-AP, so no number of colors forces a rainbow one."""


def find_exact_free_coloring(S: GroundSet, k: int, t: int) -> Optional[Coloring]:
    """Lexicographically first canonical exact t-coloring of ``S`` with no rainbow k-AP."""
    system = ap_system(S, k)
    m = system.m
    if t > m or t < 1:
        return None
    ends = [[] for _ in range(m)]
    for s in system.sets:
        ends[s[-1]].append(s)
    col = [0] * m

    def rec(p: int, used: int) -> bool:
        if p == m:
            return used == t
        if t - used > m - p:
            return False
        for c in range(min(used + 1, t)):
            col[p] = c
            if any(len({col[i] for i in s}) == k for s in ends[p]):
                continue
            if rec(p + 1, used + (c == used)):
                return True
        return False

    if not rec(0, 0):
        return None
    return make_coloring(S, [c + 1 for c in col], r=t)


def merge_classes(c: Coloring, a: int, b: int) -> Coloring:
    """Recolor class ``b`` with ``a`` and relabel to ``1..r-1``."""
    if a == b:
        raise ValueError("merging a color class with itself")
    merged = [a if x == b else x for x in c.colors]
    labels = {old: new for new, old in enumerate(sorted(set(merged)), start=1)}
    return Coloring(c.ground, c.r - 1, tuple(labels[x] for x in merged))


def check_merge_monotonicity(c: Coloring, k: int) -> bool:
    """Every merge of two classes of a rainbow-free exact coloring stays rainbow-free and exact."""
    if rainbow_witness(c, k) is not None or not c.is_exact:
        return False
    for a, b in itertools.combinations(sorted(c.used), 2):
        merged = merge_classes(c, a, b)
        if not merged.is_exact or rainbow_witness(merged, k) is not None:
            return False
    return True


def anti_vdw(S: GroundSet, k: int, *, budget: Budget = DEFAULT_BUDGET,
             workers: int = 1) -> AwResult:
    """Least r for which every exact r-coloring of ``S`` has a rainbow k-AP.

    Rainbow-free exact colorings exist for every t up to some frontier (merging
    two classes never creates a rainbow progression), so the answer is one
    more than the largest t with a rainbow-free exact t-coloring.
    """
    if gamma_k(S, k) == 0:
        raise UndefinedAw(f"{S} contains no {k}-AP; aw is undefined")
    canon, _ = counting.canonical_counts(ap_system(S, k), len(S), budget=budget, workers=workers)
    top = max(t for t, c in enumerate(canon) if c > 0)
    witness = find_exact_free_coloring(S, k, top)
    assert witness is not None
    if not check_merge_monotonicity(witness, k):
        raise AssertionError(f"merge monotonicity failed on witness {witness.literal()}")
    return AwResult(S, k, top + 1, witness, canon)


def anti_vdw_definitional(S: GroundSet, k: int, *, budget: Budget = DEFAULT_BUDGET) -> int:
    """Scan all exact r-colorings for r = 2, 3, ... by brute force."""
    if gamma_k(S, k) == 0:
        raise UndefinedAw(f"{S} contains no {k}-AP; aw is undefined")
    system = ap_system(S, k)
    for r in range(1, len(S) + 1):
        hist, _ = counting.bruteforce_histogram(system, r, budget=budget)
        if hist[r] == 0:
            return r
    return len(S) + 1


# --------------------------------------------------------------------------- #
# Cyclic groups
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class CyclicComparison:
    n: int
    r: int
    k: int
    g_interval: int
    g_cyclic: int
    ratio_cyclic: Fraction
    target: int

    def to_dict(self) -> dict:
        return {
            "n": self.n, "r": self.r, "k": self.k,
            "g_interval": str(self.g_interval), "g_cyclic": str(self.g_cyclic),
            "ratio_cyclic": float(self.ratio_cyclic), "target": self.target,
        }


def cyclic_compare(n: int, r: int, k: int, *, budget: Budget = DEFAULT_BUDGET,
                   workers: int = 1) -> CyclicComparison:
    """Counts on [n] and on Z_n, where progressions may wrap around."""
    gi = counting.count_pruned(interval(n), r, k, budget=budget, workers=workers).count
    gc = counting.count_pruned(cyclic(n), r, k, budget=budget, workers=workers).count
    # shifting [n] to 0..n-1 maps every AP of [n] to an AP of Z_n
    assert gc <= gi, (n, r, k, gc, gi)
    return CyclicComparison(n, r, k, gi, gc, Fraction(gc, (k - 1) ** n), comb(r, k - 1))


# --------------------------------------------------------------------------- #
# Sidon pattern
# --------------------------------------------------------------------------- #

def colorings_with_at_most(r: int, colors: int, s: int) -> int:
    """Colorings of an s-set from [r] that use at most ``colors`` colors."""
    return sum(comb(r, j) * counting.f_exact(j, s) for j in range(1, min(colors, r) + 1))


@dataclass
class SidonReport:
    n: int
    r: int
    g_full: int
    scan: ScanResult
    full_is_max: bool
    few_color_fraction: Fraction  # share of rainbow-free colorings of [n] using <= 3 colors

    def to_dict(self) -> dict:
        d = {
            "n": self.n, "r": self.r, "g": str(self.g_full),
            "full_is_max": self.full_is_max,
            "few_color_fraction": float(self.few_color_fraction),
            "few_color_fraction_exact": f"{self.few_color_fraction.numerator}/"
                                        f"{self.few_color_fraction.denominator}",
        }
        d["scan"] = self.scan.to_dict()
        return d


def sidon_experiment(n: int, r: int, strategy: str = "deletions", *,
                     pattern: LinearPattern = SIDON, budget: Budget = DEFAULT_BUDGET,
                     workers: int = 1, samples: int = 200, density: float = 0.5,
                     seed: int = 0) -> SidonReport:
    """Rainbow-free colorings for the pattern x1 - x2 + x3 - x4 = 0 on [n] and its subsets.

    Reports whether [n] beats every scanned proper subset and which share of
    the rainbow-free colorings of [n] uses at most 3 colors.  Both are
    evidence only; nothing is asserted.
    """
    scan = _scan(n, r, pattern.label(), lambda S: pattern_system(S, pattern), strategy,
                 budget, workers, samples, density, seed)
    few = colorings_with_at_most(r, pattern.cols - 1, n)
    return SidonReport(n, r, scan.full_count, scan, not scan.violations,
                       Fraction(few, scan.full_count))
