"""k-term arithmetic progressions and distinct-valued linear-pattern solutions."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

from .ground import GroundSet, Kind


@dataclass(frozen=True, order=True)
class Progression:
    first: int
    diff: int
    length: int
    members: tuple[int, ...]  # ascending element values

    @property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)


def _check_k(k: int) -> None:
    if k < 2:
        raise ValueError(f"progression length must be >= 2, got {k}")


def _cyclic_aps(n: int, k: int) -> list[Progression]:
    # Smallest (diff, first) traversal is kept as the representative of each set.
    seen: set[tuple[int, ...]] = set()
    out = []
    for d in range(1, n):
        if n // gcd(n, d) < k:
            continue  # residues would repeat
        for a in range(n):
            members = tuple(sorted((a + i * d) % n for i in range(k)))
            if members in seen:
                continue
            seen.add(members)
            out.append(Progression(a, d, k, members))
    out.sort(key=lambda p: (p.first, p.diff))
    return out


def enumerate_k_aps(S: GroundSet, k: int) -> list[Progression]:
    """All k-APs of ``S`` in ``(first, diff)`` order, one per element set."""
    _check_k(k)
    if S.kind is Kind.CYCLIC:
        return _cyclic_aps(S.n, k)
    members_of = S.element_set
    top = S.elements[-1]
    out = []
    for a in S.elements:
        d = 1
        while a + (k - 1) * d <= top:
            terms = tuple(a + i * d for i in range(k))
            if all(t in members_of for t in terms[1:]):
                out.append(Progression(a, d, k, terms))
            d += 1
    return out


def gamma_k(S: GroundSet, k: int) -> int:
    """Number of k-APs in ``S``, counted per common difference."""
    _check_k(k)
    if S.kind is Kind.INTERVAL:
        n = S.n
        return sum(n - (k - 1) * d for d in range(1, (n - 1) // (k - 1) + 1)) if n >= k else 0
    if S.kind is Kind.CYCLIC:
        # distinct element sets; several traversals can share one set
        n = S.n
        seen = set()
        for d in range(1, n):
            if n // gcd(n, d) < k:
                continue
            for a in range(n):
                mask = 0
                for i in range(k):
                    mask |= 1 << ((a + i * d) % n)
                seen.add(mask)
        return len(seen)
    members_of = S.element_set
    top, bottom = S.elements[-1], S.elements[0]
    total = 0
    for d in range(1, (top - bottom) // (k - 1) + 1):
        for a in S.elements:
            if a + (k - 1) * d > top:
                break
            if all(a + i * d in members_of for i in range(1, k)):
                total += 1
    return total


def gamma_closed_form(n: int, k: int) -> int:
    """Exact closed form for the number of k-APs in [n]."""
    _check_k(k)
    if n < k:
        raise ValueError(f"closed form needs n >= k, got n={n}, k={k}")
    m = k - 1
    kp = n % m
    num = n * n - n * m + kp * (m - kp)
    q, rem = divmod(num, 2 * m)
    assert rem == 0, (n, k)
    return q


def gamma_first_term(a: int, S: GroundSet, k: int) -> int:
    """Number of k-APs of ``S`` whose canonical first term is ``a``."""
    _check_k(k)
    if a not in S.element_set:
        raise ValueError(f"{a} is not an element of {S}")
    if S.kind is Kind.CYCLIC:
        return sum(1 for p in _cyclic_aps(S.n, k) if p.first == a)
    members_of = S.element_set
    top = S.elements[-1]
    count = 0
    for d in range(1, (top - a) // (k - 1) + 1):
        if all(a + i * d in members_of for i in range(1, k)):
            count += 1
    return count


def refine_difference_set(a: int, D: Iterable[int], B: Iterable[int], k: int) -> set[int]:
    """Keep the differences ``d`` with ``a + i*d`` in ``B`` for every ``i`` in ``1..k-1``.

    Runs as k-1 successive intersections, round ``i`` dropping the ``d`` whose
    ``i``-th term leaves ``B``.
    """
    _check_k(k)
    B = set(B)
    D = set(D)
    for i in range(1, k):
        D = D & {d for d in D if a + i * d in B}
    return D


@dataclass(frozen=True)
class LinearPattern:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("pattern needs at least one row")
        width = len(self.entries[0])
        if width < 2:
            raise ValueError("pattern needs at least two columns")
        for row in self.entries:
            if len(row) != width:
                raise ValueError("ragged pattern matrix")
            if not any(row):
                raise ValueError("pattern row with all zero entries")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def label(self) -> str:
        return ";".join(" ".join(str(v) for v in row) for row in self.entries)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(str(v) for v in row) for row in self.entries]
        return "\n".join(lines) + "\n"


def make_pattern(rows: Sequence[Sequence[int]]) -> LinearPattern:
    return LinearPattern(tuple(tuple(int(v) for v in row) for row in rows))


def ap_pattern(k: int) -> LinearPattern:
    """The (k-2) x k second-difference matrix whose solutions are k-APs."""
    if k < 3:
        raise ValueError("the AP matrix needs k >= 3")
    rows = []
    for i in range(k - 2):
        row = [0] * k
        row[i], row[i + 1], row[i + 2] = 1, -2, 1
        rows.append(row)
    return make_pattern(rows)


SIDON = make_pattern([[1, -1, 1, -1]])


def parse_pattern(text: str) -> LinearPattern:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError("pattern header must be 'rows cols'")
    try:
        ell, k = int(lines[0][0]), int(lines[0][1])
        rows = [[int(v) for v in ln] for ln in lines[1:]]
    except ValueError as exc:
        raise ValueError("non-integer entry in pattern file") from exc
    if len(rows) != ell or any(len(r) != k for r in rows):
        raise ValueError(f"pattern body does not match header {ell}x{k}")
    return make_pattern(rows)


def load_pattern(path: str | Path) -> LinearPattern:
    return parse_pattern(Path(path).read_text())


def enumerate_pattern_solutions(M: LinearPattern, S: GroundSet) -> list[tuple[int, ...]]:
    """Ordered tuples of pairwise-distinct elements of ``S`` solving ``M x = 0``.

    Coordinates are assigned left to right.  A row whose last nonzero column
    is ``j`` pins ``x_j`` once the earlier columns are set; rows that still
    have free columns are pruned by interval bounds on their partial sums.
    """
    if S.kind is Kind.CYCLIC:
        raise ValueError("linear patterns are defined over subsets of [n] only")
    k = M.cols
    rows = M.entries
    last = [max(j for j, v in enumerate(row) if v) for row in rows]
    pinning = [[i for i in range(len(rows)) if last[i] == j] for j in range(k)]
    elems = S.elements
    lo, hi = elems[0], elems[-1]
    members_of = S.element_set
    # tail[i][j]: range of sum_{c >= j} row_i[c] * x_c over x_c in [lo, hi]
    tail = []
    for row in rows:
        t = [(0, 0)] * (k + 1)
        for j in range(k - 1, -1, -1):
            a, b = row[j] * lo, row[j] * hi
            t[j] = (t[j + 1][0] + min(a, b), t[j + 1][1] + max(a, b))
        tail.append(t)

    out: list[tuple[int, ...]] = []
    x = [0] * k
    partial = [0] * len(rows)

    def feasible(j: int) -> bool:
        for i, row in enumerate(rows):
            if last[i] >= j:
                lo_t, hi_t = tail[i][j]
                if not lo_t <= -partial[i] <= hi_t:
                    return False
        return True

    def place(j: int, v: int) -> None:
        x[j] = v
        for i, row in enumerate(rows):
            partial[i] += row[j] * v

    def unplace(j: int, v: int) -> None:
        for i, row in enumerate(rows):
            partial[i] -= row[j] * v

    def rec(j: int) -> None:
        if j == k:
            out.append(tuple(x))
            return
        used = x[:j]
        if pinning[j]:
            i0 = pinning[j][0]
            coef = rows[i0][j]
            q, rem = divmod(-partial[i0], coef)
            if rem or q not in members_of or q in used:
                return
            candidates: Iterable[int] = (q,)
        else:
            candidates = elems
        for v in candidates:
            if v in used:
                continue
            place(j, v)
            if all(partial[i] == 0 for i in pinning[j]) and feasible(j + 1):
                rec(j + 1)
            unplace(j, v)

    rec(0)
    return out


def pattern_constraint_sets(M: LinearPattern, S: GroundSet) -> list[tuple[int, ...]]:
    """Distinct element sets underlying the pattern's solutions, sorted."""
    return sorted({tuple(sorted(sol)) for sol in enumerate_pattern_solutions(M, S)})
