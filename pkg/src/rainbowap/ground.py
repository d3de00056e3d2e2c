"""Colored domains: the interval [n], a subset of [n], or the cyclic group Z_n."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Optional


class Kind(str, enum.Enum):
    INTERVAL = "interval"
    SUBSET = "subset"
    CYCLIC = "cyclic"


@dataclass(frozen=True)
class GroundSet:
    """An immutable, ascending set of integers with an ambient size ``n``.

    Interval and subset elements are 1-based (inside ``1..n``); cyclic
    elements are the residues ``0..n-1``.  Build instances with
    :func:`make_ground` rather than directly.
    """

    kind: Kind
    n: int
    elements: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and contains(self, x)

    @cached_property
    def element_set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def is_cyclic(self) -> bool:
        return self.kind is Kind.CYCLIC

    def index_of(self) -> dict[int, int]:
        """Map each element to its position in ascending order."""
        return {x: i for i, x in enumerate(self.elements)}

    def descriptor(self) -> dict:
        d: dict = {"kind": self.kind.value, "n": self.n}
        if self.kind is Kind.SUBSET:
            d["elements"] = list(self.elements)
        return d

    def label(self) -> str:
        if self.kind is Kind.INTERVAL:
            return f"[{self.n}]"
        if self.kind is Kind.CYCLIC:
            return f"Z_{self.n}"
        return "{" + ",".join(map(str, self.elements)) + "}"

    def __str__(self) -> str:
        return self.label()


def make_ground(kind: Kind | str, n: int, elements: Optional[Iterable[int]] = None) -> GroundSet:
    kind = Kind(kind)
    if n < 1:
        raise ValueError(f"ambient size must be >= 1, got {n}")
    if kind is Kind.INTERVAL:
        return GroundSet(kind, n, tuple(range(1, n + 1)))
    if kind is Kind.CYCLIC:
        return GroundSet(kind, n, tuple(range(n)))
    if elements is None:
        raise ValueError("subset ground set needs an element list")
    elems = sorted(set(int(x) for x in elements))
    if not elems:
        raise ValueError("subset ground set must be non-empty")
    bad = [x for x in elems if not 1 <= x <= n]
    if bad:
        raise ValueError(f"elements {bad} lie outside [1, {n}]")
    return GroundSet(kind, n, tuple(elems))


def interval(n: int) -> GroundSet:
    return make_ground(Kind.INTERVAL, n)


def cyclic(n: int) -> GroundSet:
    return make_ground(Kind.CYCLIC, n)


def subset(n: int, elements: Iterable[int]) -> GroundSet:
    return make_ground(Kind.SUBSET, n, elements)


def from_descriptor(d: dict) -> GroundSet:
    return make_ground(d["kind"], d["n"], d.get("elements"))


def contains(S: GroundSet, x: int) -> bool:
    if S.kind is Kind.CYCLIC:
        return True  # every integer reduces to a residue of Z_n
    if S.kind is Kind.INTERVAL:
        return 1 <= x <= S.n
    return x in S.element_set


def parse_subset_literal(text: str) -> list[int]:
    """Parse ``"1,2,5,9"`` or ``"@path"`` (one integer per line)."""
    text = text.strip()
    if text.startswith("@"):
        lines = Path(text[1:]).read_text().split()
        tokens = [t for t in lines if t]
    else:
        tokens = [t.strip() for t in text.split(",") if t.strip()]
    if not tokens:
        raise ValueError("empty subset literal")
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise ValueError(f"malformed subset literal {text!r}") from exc
