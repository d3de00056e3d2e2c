"""Colorings, palette templates, and rainbow-subtemplate counts."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .ground import GroundSet, Kind, interval
from .progressions import Progression, enumerate_k_aps


@dataclass(frozen=True)
class Coloring:
    ground: GroundSet
    r: int
    colors: tuple[int, ...]  # aligned with ground.elements; values in 1..r

    def __post_init__(self):
        if len(self.colors) != len(self.ground):
            raise ValueError("a coloring assigns exactly one color per ground element")
        bad = [c for c in self.colors if not 1 <= c <= self.r]
        if bad:
            raise ValueError(f"colors {bad} outside [1, {self.r}]")

    def __getitem__(self, x: int) -> int:
        return self.as_dict()[x]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.ground.elements, self.colors))

    @property
    def used(self) -> frozenset[int]:
        return frozenset(self.colors)

    @property
    def is_exact(self) -> bool:
        return len(self.used) == self.r

    def literal(self) -> str:
        return ",".join(f"{x}:{c}" for x, c in zip(self.ground.elements, self.colors))


def make_coloring(ground: GroundSet, colors: Mapping[int, int] | Iterable[int],
                  r: Optional[int] = None) -> Coloring:
    if isinstance(colors, Mapping):
        if set(colors) != ground.element_set:
            raise ValueError("coloring must be defined exactly on the ground set")
        seq = tuple(int(colors[x]) for x in ground.elements)
    else:
        seq = tuple(int(c) for c in colors)
    if r is None:
        r = max(seq)
    return Coloring(ground, r, seq)


def parse_coloring_literal(text: str) -> dict[int, int]:
    """``"1:1,2:2,3:2"`` -> ``{1: 1, 2: 2, 3: 2}``."""
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            x, c = item.split(":")
            out[int(x)] = int(c)
        except ValueError as exc:
            raise ValueError(f"malformed coloring entry {item!r}") from exc
    if not out:
        raise ValueError("empty coloring literal")
    return out


@dataclass(frozen=True)
class Template:
    """An r-template of order n: a palette ``P(x)`` for every ``x`` in ``1..n``."""

    order: int
    r: int
    palettes: tuple[frozenset[int], ...]  # palettes[x - 1] = P(x)

    def __post_init__(self):
        if len(self.palettes) != self.order:
            raise ValueError("one palette per element of [n] required")
        for pal in self.palettes:
            if any(not 1 <= c <= self.r for c in pal):
                raise ValueError(f"palette {sorted(pal)} not inside [1, {self.r}]")

    def __call__(self, x: int) -> frozenset[int]:
        return self.palettes[x - 1]

    def to_text(self) -> str:
        return "".join(f"{x}: {' '.join(map(str, sorted(p)))}".rstrip() + "\n"
                       for x, p in enumerate(self.palettes, start=1))


def make_template(order: int, r: int, palettes: Mapping[int, Iterable[int]]) -> Template:
    pals = [frozenset()] * order
    for x, pal in palettes.items():
        if not 1 <= x <= order:
            raise ValueError(f"element {x} outside [1, {order}]")
        pals[x - 1] = frozenset(int(c) for c in pal)
    return Template(order, r, tuple(pals))


def full_template(order: int, r: int) -> Template:
    return Template(order, r, (frozenset(range(1, r + 1)),) * order)


def parse_template(text: str, r: Optional[int] = None) -> Template:
    """Lines ``"x: c1 c2 ..."`` for ``x = 1..n``; an empty list is the empty palette."""
    pals: dict[int, list[int]] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        head, _, tail = line.partition(":")
        try:
            x = int(head)
            pals[x] = [int(c) for c in tail.split()]
        except ValueError as exc:
            raise ValueError(f"malformed template line {line!r}") from exc
    order = len(pals)
    if sorted(pals) != list(range(1, order + 1)):
        raise ValueError("template lines must cover 1..n exactly once")
    if r is None:
        r = max((c for pal in pals.values() for c in pal), default=1)
    return make_template(order, r, pals)


def load_template(path: str | Path, r: Optional[int] = None) -> Template:
    return parse_template(Path(path).read_text(), r)


def coloring_to_template(c: Coloring, n: int) -> Template:
    if c.ground.kind is Kind.CYCLIC or c.ground.elements[-1] > n or c.ground.elements[0] < 1:
        raise ValueError(f"coloring's ground set {c.ground} is not inside [{n}]")
    return make_template(n, c.r, {x: (col,) for x, col in zip(c.ground.elements, c.colors)})


def is_subtemplate(P1: Template, P2: Template) -> bool:
    if P1.order != P2.order or P1.r != P2.r:
        raise ValueError("templates differ in order or number of colors")
    return all(a <= b for a, b in zip(P1.palettes, P2.palettes))


def rainbow_witness(c: Coloring, k: int) -> Optional[Progression]:
    """First k-AP (canonical order) whose colors are pairwise distinct, if any."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(c.used) < k:
        return None
    col = c.as_dict()
    for ap in enumerate_k_aps(c.ground, k):
        if len({col[x] for x in ap.members}) == k:
            return ap
    return None


def count_rainbow_aps_of_coloring(c: Coloring, k: int) -> int:
    if k < 2:
        raise ValueError("k must be >= 2")
    col = c.as_dict()
    return sum(1 for ap in enumerate_k_aps(c.ground, k)
               if len({col[x] for x in ap.members}) == k)


def _distinct_choices(palettes: list[frozenset[int]]) -> int:
    """Ways to pick one color per palette with all picks distinct."""
    palettes = sorted(palettes, key=len)
    if not palettes[0]:
        return 0

    def rec(i: int, used: frozenset[int]) -> int:
        if i == len(palettes):
            return 1
        return sum(rec(i + 1, used | {c}) for c in palettes[i] - used)

    return rec(0, frozenset())


def count_rainbow_subtemplates(P: Template, k: int) -> int:
    """Number of rainbow k-AP templates contained in ``P``."""
    if k < 2:
        raise ValueError("k must be >= 2")
    total = 0
    cache: dict[tuple[frozenset[int], ...], int] = {}
    for ap in enumerate_k_aps(interval(P.order), k) if P.order >= 1 else ():
        key = tuple(sorted((P(x) for x in ap.members), key=sorted))
        v = cache.get(key)
        if v is None:
            v = cache[key] = _distinct_choices(list(key))
        total += v
    return total


@dataclass(frozen=True)
class ContainerStatistic:
    rk: int
    bound: float
    satisfies: bool


def container_statistic(P: Template, k: int) -> ContainerStatistic:
    """Compare R_k(P) with ``n^(2 - 1/k) / k`` for a template of order n."""
    rk = count_rainbow_subtemplates(P, k)
    n = P.order
    # rk < n^((2k-1)/k) / k  <=>  (k * rk)^k < n^(2k-1), exactly in integers
    satisfies = (k * rk) ** k < n ** (2 * k - 1)
    return ContainerStatistic(rk, n ** (2 - 1 / k) / k, satisfies)
