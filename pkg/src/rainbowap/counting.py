"""Exact counts of rainbow-free colorings, closed formulas, and ratio reports.

Every counter works on a :class:`ConstraintSystem`: the ground set's
elements in ascending order plus a family of equal-size element sets (k-APs
or pattern solution sets).  A coloring is *free* when no set in the family
receives pairwise-distinct colors.
"""
from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, factorial, log
from typing import Callable, Optional, Sequence

from . import _backend
from .ground import GroundSet, Kind, interval
from .progressions import LinearPattern, enumerate_k_aps, pattern_constraint_sets

METHODS = ("bruteforce", "pruned", "symmetry", "inclusion_exclusion", "formula")

# Largest magnitude the compiled inclusion-exclusion kernel may accumulate.
_INT64_SAFE = 1 << 62
# Colors are packed into 64-bit masks inside the kernels.
MAX_COLORS = 63


class BudgetExceeded(RuntimeError):
    """A counter hit its node, time, or brute-force ceiling."""

    def __init__(self, message: str, nodes: int = 0):
        super().__init__(message)
        self.nodes = nodes


class TooManyConstraints(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    nodes: int = 10**10
    seconds: Optional[float] = None
    brute_force_ceiling: int = 10**9
    ie_limit: int = 20


DEFAULT_BUDGET = Budget()


# --------------------------------------------------------------------------- #
# Constraint systems
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class ConstraintSystem:
    ground: GroundSet
    k: int
    sets: tuple[tuple[int, ...], ...]  # ascending position indices, sorted by (max, ...)
    label: str

    @property
    def m(self) -> int:
        return len(self.ground)

    def layout(self) -> tuple[list[int], list[int]]:
        """``(ptr, members)`` arrays in the kernels' layout."""
        ptr = [0] * (self.m + 1)
        for s in self.sets:
            ptr[s[-1] + 1] += 1
        for p in range(self.m):
            ptr[p + 1] += ptr[p]
        members = [i for s in self.sets for i in s]
        return ptr, members

    def free_positions(self) -> list[int]:
        touched = {i for s in self.sets for i in s}
        return [p for p in range(self.m) if p not in touched]

    def without_free(self) -> tuple["ConstraintSystem", int]:
        """Drop positions in no constraint set; returns the system and how many were dropped."""
        free = set(self.free_positions())
        if not free:
            return self, 0
        keep = [p for p in range(self.m) if p not in free]
        remap = {p: i for i, p in enumerate(keep)}
        # internal only: may be empty, which make_ground would reject
        core = GroundSet(Kind.SUBSET, self.ground.n, tuple(self.ground.elements[p] for p in keep))
        sets = tuple(tuple(remap[i] for i in s) for s in self.sets)
        return ConstraintSystem(core, self.k, sets, self.label), len(free)


def _system(S: GroundSet, k: int, value_sets, label: str) -> ConstraintSystem:
    index = S.index_of()
    sets = sorted(tuple(sorted(index[v] for v in vs)) for vs in value_sets)
    sets.sort(key=lambda s: (s[-1], s))
    return ConstraintSystem(S, k, tuple(sets), label)


def ap_system(S: GroundSet, k: int) -> ConstraintSystem:
    return _system(S, k, [p.members for p in enumerate_k_aps(S, k)], f"k={k}")


def pattern_system(S: GroundSet, M: LinearPattern) -> ConstraintSystem:
    if S.kind is Kind.CYCLIC:
        raise ValueError("linear patterns are defined over subsets of [n] only")
    return _system(S, M.cols, pattern_constraint_sets(M, S), f"M={M.label()}")


# --------------------------------------------------------------------------- #
# Formulas
# --------------------------------------------------------------------------- #

def f_exact(t: int, s: int) -> int:
    """Number of exact (surjective) t-colorings of an s-element set."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return 0
    return sum(comb(t, i) * (t - i) ** s * (-1) ** i for i in range(t))


def f_below_k(r: int, k: int, s: int) -> int:
    """Colorings of an s-set with colors from [r] that use at most k-1 colors.

    Evaluated as the double sum over ``t`` (the number of colors actually
    appearing) after exchanging the order of summation.
    """
    _check_below_k(r, k, s)
    total = 0
    for t in range(1, k):
        inner = sum(comb(r, j) * comb(j, j - t) * (-1) ** (j - t) for j in range(t, k))
        total += t**s * inner
    return total


def f_below_k_by_exact(r: int, k: int, s: int) -> int:
    _check_below_k(r, k, s)
    return sum(comb(r, j) * f_exact(j, s) for j in range(1, k))


def _check_below_k(r: int, k: int, s: int) -> None:
    if k < 2:
        raise ValueError("k must be >= 2")
    if r < k:
        raise ValueError(f"needs r >= k, got r={r}, k={k}")
    if s < 1:
        raise ValueError("s must be >= 1")


class SurjectiveCountTable:
    """Memoized ``f(t, s)`` values."""

    def __init__(self):
        self.entries: dict[tuple[int, int], int] = {}

    def __getitem__(self, key: tuple[int, int]) -> int:
        v = self.entries.get(key)
        if v is None:
            t, s = key
            v = self.entries[key] = f_exact(t, s)
        return v


# --------------------------------------------------------------------------- #
# Reports
# --------------------------------------------------------------------------- #

@dataclass
class CountReport:
    ground: dict
    r: int
    k_or_pattern: object
    method: str
    count: int
    elapsed_ms: float = 0.0
    nodes: int = 0
    detail: dict = field(default_factory=dict)

    def to_dict(self, stable: bool = False) -> dict:
        d = asdict(self)
        d["count"] = str(self.count)
        if not self.detail:
            del d["detail"]
        if stable:
            del d["elapsed_ms"]
        return d

    def to_json(self, stable: bool = False) -> str:
        return json.dumps(self.to_dict(stable), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "CountReport":
        return cls(
            ground=d["ground"],
            r=int(d["r"]),
            k_or_pattern=d["k_or_pattern"],
            method=d["method"],
            count=int(d["count"]),
            elapsed_ms=float(d.get("elapsed_ms", 0.0)),
            nodes=int(d.get("nodes", 0)),
            detail=d.get("detail", {}),
        )

    @classmethod
    def from_json(cls, line: str) -> "CountReport":
        return cls.from_dict(json.loads(line))


def _report(system: ConstraintSystem, r: int, method: str, count: int, t0: float,
            nodes: int, detail: Optional[dict] = None) -> CountReport:
    kp: object = system.k if system.label.startswith("k=") else system.label[2:]
    return CountReport(
        ground=system.ground.descriptor(),
        r=r,
        k_or_pattern=kp,
        method=method,
        count=count,
        elapsed_ms=round((time.perf_counter() - t0) * 1000.0, 3),
        nodes=nodes,
        detail=detail or {},
    )


# --------------------------------------------------------------------------- #
# Sharded execution
# --------------------------------------------------------------------------- #

def _run_shards(task: Callable, shards: Sequence, workers: int, budget: Budget) -> list:
    """Run ``task`` on every shard; results come back in shard order."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    deadline = None if budget.seconds is None else time.monotonic() + budget.seconds

    def guarded(shard):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded(f"time budget of {budget.seconds}s exceeded")
        return task(shard)

    if workers == 1 or len(shards) <= 1:
        results = [guarded(s) for s in shards]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(guarded, shards))
    nodes = sum(res[1] for res in results)
    if any(res[2] for res in results) or nodes > budget.nodes:
        raise BudgetExceeded(f"node budget of {budget.nodes} exceeded", nodes)
    return results


def _node_limit(budget: Budget) -> int:
    return min(budget.nodes, (1 << 63) - 1)


def _free_prefixes(system: ConstraintSystem, r: int, depth: int,
                   canonical: bool) -> tuple[list[tuple[int, ...]], int]:
    """Free colorings of the first ``depth`` positions (the search shards).

    Also returns the number of search nodes spent building them.
    """
    ends = [[] for _ in range(system.m)]
    for s in system.sets:
        ends[s[-1]].append(s)
    out: list[tuple[int, ...]] = []
    nodes = 0

    def rec(prefix: list[int], used: int) -> None:
        nonlocal nodes
        p = len(prefix)
        if p == depth:
            out.append(tuple(prefix))
            return
        top = min(used + 1, r) if canonical else r
        for c in range(top):
            prefix.append(c)
            if not any(len({prefix[i] for i in s}) == system.k for s in ends[p]):
                nodes += 1
                rec(prefix, used + (c == used))
            prefix.pop()

    rec([], 0)
    return out, nodes


def _check_colors(r: int) -> None:
    if r < 1:
        raise ValueError("r must be >= 1")
    if r > MAX_COLORS:
        raise ValueError(f"at most {MAX_COLORS} colors are supported by the search kernels")


# --------------------------------------------------------------------------- #
# Counters on constraint systems
# --------------------------------------------------------------------------- #

def bruteforce_histogram(system: ConstraintSystem, r: int, *, workers: int = 1,
                         budget: Budget = DEFAULT_BUDGET, shard_depth: int = 3,
                         backend: Optional[str] = None) -> tuple[list[int], int]:
    """Free colorings among all ``r^m``, bucketed by the number of colors used."""
    _check_colors(r)
    m = system.m
    if r**m > budget.brute_force_ceiling:
        raise BudgetExceeded(f"{r}^{m} colorings exceed the brute-force ceiling "
                             f"{budget.brute_force_ceiling}")
    kern = _backend.get(backend)
    ptr, members = system.layout()
    depth = min(shard_depth, m)
    shards = list(itertools.product(range(r), repeat=depth))
    limit = _node_limit(budget)
    results = _run_shards(lambda pre: kern.brute_force(m, r, system.k, ptr, members, pre, limit),
                          shards, workers, budget)
    hist = [0] * (r + 1)
    for h, _, _ in results:
        for i, v in enumerate(h):
            hist[i] += v
    return hist, sum(res[1] for res in results)


def pruned_count(system: ConstraintSystem, r: int, *, workers: int = 1,
                 budget: Budget = DEFAULT_BUDGET, shard_depth: int = 3,
                 backend: Optional[str] = None) -> tuple[int, int]:
    _check_colors(r)
    if r <= system.k - 1:
        return r**system.m, 0  # fewer than k colors can never be rainbow
    core, n_free = system.without_free()
    m = core.m
    kern = _backend.get(backend)
    ptr, members = core.layout()
    shards, pre_nodes = _free_prefixes(core, r, min(shard_depth, m), canonical=False)
    limit = _node_limit(budget)
    results = _run_shards(lambda pre: kern.pruned(m, r, core.k, ptr, members, pre, limit),
                          shards, workers, budget)
    count = sum(res[0] for res in results)
    return count * r**n_free, pre_nodes + sum(res[1] for res in results)


def canonical_counts(system: ConstraintSystem, r: int, *, workers: int = 1,
                     budget: Budget = DEFAULT_BUDGET, shard_depth: int = 3,
                     backend: Optional[str] = None) -> tuple[list[int], int]:
    """Free colorings up to relabeling, bucketed by the number of colors used.

    Entry ``t`` counts colorings in first-use canonical form (labels appear
    in increasing order) that use exactly ``t`` colors.
    """
    _check_colors(r)
    m = system.m
    kern = _backend.get(backend)
    ptr, members = system.layout()
    shards, pre_nodes = _free_prefixes(system, r, min(shard_depth, m), canonical=True)
    limit = _node_limit(budget)
    results = _run_shards(lambda pre: kern.canonical(m, r, system.k, ptr, members, pre, limit),
                          shards, workers, budget)
    counts = [0] * (r + 1)
    for c, _, _ in results:
        for i, v in enumerate(c):
            counts[i] += v
    return counts, pre_nodes + sum(res[1] for res in results)


def exact_free_counts(system: ConstraintSystem, r: int, **kw) -> tuple[list[int], int]:
    """``e[t]``: free colorings onto a fixed set of ``t`` colors, for ``t = 0..r``."""
    canon, nodes = canonical_counts(system, r, **kw)
    return [factorial(t) * c for t, c in enumerate(canon)], nodes


def inclusion_exclusion_count(system: ConstraintSystem, r: int, *, workers: int = 1,
                              budget: Budget = DEFAULT_BUDGET, shard_depth: int = 4,
                              backend: Optional[str] = None) -> tuple[int, int]:
    _check_colors(r)
    nsets = len(system.sets)
    if nsets > budget.ie_limit:
        raise TooManyConstraints(f"{nsets} constraint sets exceed the inclusion-exclusion "
                                 f"limit {budget.ie_limit}")
    m, k = system.m, system.k
    members = [i for s in system.sets for i in s]
    depth = min(shard_depth, nsets)
    shards = list(itertools.product((0, 1), repeat=depth))
    limit = _node_limit(budget)
    kern = _backend.get(backend)
    if kern is not _backend.python_kernels and (m > 64 or r**m << (nsets - depth) >= _INT64_SAFE):
        kern = _backend.python_kernels
    results = _run_shards(lambda dec: kern.ie(m, r, k, members, dec, limit), shards, workers, budget)
    return sum(res[0] for res in results), sum(res[1] for res in results)


# --------------------------------------------------------------------------- #
# Public counters
# --------------------------------------------------------------------------- #

def count_system(system: ConstraintSystem, r: int, method: str = "pruned", **kw) -> CountReport:
    t0 = time.perf_counter()
    detail = None
    if method == "bruteforce":
        hist, nodes = bruteforce_histogram(system, r, **kw)
        count = sum(hist)
    elif method == "pruned":
        count, nodes = pruned_count(system, r, **kw)
    elif method == "symmetry":
        exact, nodes = exact_free_counts(system, r, **kw)
        count = sum(comb(r, t) * e for t, e in enumerate(exact))
        detail = {"exact": [str(e) for e in exact]}
    elif method == "inclusion_exclusion":
        count, nodes = inclusion_exclusion_count(system, r, **kw)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _report(system, r, method, count, t0, nodes, detail)


def _ap_count(method: str):
    def counter(S: GroundSet, r: int, k: int, **kw) -> CountReport:
        if k < 2:
            raise ValueError("k must be >= 2")
        return count_system(ap_system(S, k), r, method, **kw)
    counter.__name__ = f"count_{method}"
    return counter


count_bruteforce = _ap_count("bruteforce")
count_pruned = _ap_count("pruned")
count_symmetry = _ap_count("symmetry")
count_inclusion_exclusion = _ap_count("inclusion_exclusion")

COUNTERS = {
    "bruteforce": count_bruteforce,
    "pruned": count_pruned,
    "symmetry": count_symmetry,
    "inclusion_exclusion": count_inclusion_exclusion,
}


def count_pattern_free(S: GroundSet, r: int, M: LinearPattern, method: str = "pruned",
                       **kw) -> CountReport:
    """r-colorings of ``S`` where no solution set of ``M`` is rainbow."""
    return count_system(pattern_system(S, M), r, method, **kw)


def g(S: GroundSet, r: int, k: int, **kw) -> int:
    return count_pruned(S, r, k, **kw).count


@dataclass(frozen=True)
class RatioReport:
    n: int
    r: int
    k: int
    g: int
    ratio: Fraction
    lower: Fraction
    target: int
    error_term: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "n": self.n, "r": self.r, "k": self.k, "g": str(self.g),
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "ratio_float": float(self.ratio),
            "lower": f"{self.lower.numerator}/{self.lower.denominator}",
            "lower_float": float(self.lower),
            "target": self.target,
            "error_term_formula": ERROR_TERM_FORMULA,
            "error_term": self.error_term,
        }


ERROR_TERM_FORMULA = "(k-1)^(-(1-log(k-2)/log(k-1)) * n / (8 k^3 log n))"


def error_term(n: int, k: int) -> Optional[float]:
    """The asymptotic error factor of the upper bound; informational only.

    Undefined for k = 2 (log 0) and n = 1 (log 1 in the denominator).
    """
    if k < 3 or n < 2:
        return None
    expo = (1 - log(k - 2) / log(k - 1)) * n / (8 * k**3 * log(n))
    return (k - 1) ** -expo


def ratio_report(n: int, r: int, k: int, **kw) -> RatioReport:
    """Compare g_{r,k}([n]) / (k-1)^n with its lower bound and limiting value."""
    count = g(interval(n), r, k, **kw)
    scale = (k - 1) ** n
    lower = Fraction(f_below_k(r, k, n), scale)
    ratio = Fraction(count, scale)
    return RatioReport(n, r, k, count, ratio, lower, comb(r, k - 1), error_term(n, k))
