"""Bijections D: Z x Z -> {1, 2, ...} that label lattice modes with bands."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import isqrt
from pathlib import Path
from typing import Iterator, Optional, Sequence

__all__ = [
    "PairingError",
    "TableMiss",
    "BadIndex",
    "PairingSpec",
    "SPIRAL",
    "spiral_pair",
    "spiral_unpair",
    "boustrophedon_pair",
    "boustrophedon_unpair",
    "pair",
    "unpair",
    "verify_bijection",
    "BijectionReport",
    "load_table",
    "save_table",
]

SCHEMES = ("spiral", "boustrophedon", "table")


class PairingError(ValueError):
    pass


class TableMiss(PairingError, KeyError):
    pass


class BadIndex(PairingError):
    pass


def spiral_pair(k: int, l: int) -> int:
    """Counterclockwise square spiral: (0,0)->1, (1,0)->2, (1,1)->3, ..."""
    r = max(abs(k), abs(l))
    if r == 0:
        return 1
    base = (2 * r - 1) ** 2
    if k == r and l > -r:
        return base + (l + r)
    if l == r:
        return base + 2 * r + (r - k)
    if k == -r:
        return base + 4 * r + (r - l)
    return base + 6 * r + (k + r)


def spiral_unpair(m: int) -> tuple[int, int]:
    if m < 1:
        raise BadIndex(f"pairing index must be >= 1, got {m}")
    if m == 1:
        return (0, 0)
    # smallest ring r with (2r+1)^2 >= m
    s = isqrt(m - 1)
    r = (s + 1) // 2
    if (2 * r + 1) ** 2 < m:
        r += 1
    off = m - (2 * r - 1) ** 2
    side, pos = divmod(off - 1, 2 * r)
    pos += 1
    if side == 0:
        return (r, pos - r)
    if side == 1:
        return (r - pos, r)
    if side == 2:
        return (-r, r - pos)
    return (pos - r, -r)


def _fold(z: int) -> int:
    return 2 * z if z >= 0 else -2 * z - 1


def _unfold(n: int) -> int:
    return n // 2 if n % 2 == 0 else -(n + 1) // 2


def boustrophedon_pair(k: int, l: int) -> int:
    """Fold Z onto N, then walk anti-diagonals of N x N alternating direction."""
    a, b = _fold(k), _fold(l)
    d = a + b
    start = d * (d + 1) // 2
    return start + (b if d % 2 == 0 else a) + 1


def boustrophedon_unpair(m: int) -> tuple[int, int]:
    if m < 1:
        raise BadIndex(f"pairing index must be >= 1, got {m}")
    n = m - 1
    d = (isqrt(8 * n + 1) - 1) // 2
    t = n - d * (d + 1) // 2
    if d % 2 == 0:
        b, a = t, d - t
    else:
        a, b = t, d - t
    return (_unfold(a), _unfold(b))


@dataclass(frozen=True)
class PairingSpec:
    """A pairing scheme. ``table[i] = (k, l)`` means ``D(k, l) = i + 1``."""

    scheme: str = "spiral"
    table: Optional[tuple] = None
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise PairingError(f"unknown pairing scheme {self.scheme!r}")
        if self.scheme == "table":
            if not self.table:
                raise PairingError("table scheme needs a non-empty table")
            # None entries are gaps: no mode carries that value
            table = tuple(None if e is None else (int(e[0]), int(e[1])) for e in self.table)
            object.__setattr__(self, "table", table)
            index: dict = {}
            for i, kl in enumerate(table):
                if kl is not None:
                    index.setdefault(kl, i + 1)
            object.__setattr__(self, "_index", index)

    @classmethod
    def from_table(cls, entries: Sequence) -> "PairingSpec":
        return cls("table", tuple(entries))

    @property
    def size(self) -> Optional[int]:
        """Number of known values, ``None`` for the unbounded schemes."""
        return len(self.table) if self.scheme == "table" else None

    def pair(self, k: int, l: int) -> int:
        if self.scheme == "spiral":
            return spiral_pair(k, l)
        if self.scheme == "boustrophedon":
            return boustrophedon_pair(k, l)
        try:
            return self._index[(k, l)]
        except KeyError:
            raise TableMiss(f"mode ({k}, {l}) is not in the pairing table") from None

    def unpair(self, m: int) -> tuple[int, int]:
        if m < 1:
            raise BadIndex(f"pairing index must be >= 1, got {m}")
        if self.scheme == "spiral":
            return spiral_unpair(m)
        if self.scheme == "boustrophedon":
            return boustrophedon_unpair(m)
        if m > len(self.table):
            raise TableMiss(f"index {m} beyond table of length {len(self.table)}")
        kl = self.table[m - 1]
        if kl is None:
            raise TableMiss(f"index {m} is a gap in the pairing table")
        return kl

    def known(self, k: int, l: int) -> bool:
        return self.scheme != "table" or (k, l) in self._index

    def enumerate(self, limit: int) -> Iterator[tuple[int, int, int]]:
        """Yield ``(m, k, l)`` for ``m = 1 .. limit`` (clipped to a table)."""
        if self.size is not None:
            limit = min(limit, self.size)
        for m in range(1, limit + 1):
            if self.scheme == "table" and self.table[m - 1] is None:
                continue
            k, l = self.unpair(m)
            yield m, k, l

    def to_json(self) -> dict:
        out = {"scheme": self.scheme}
        if self.scheme == "table":
            out["table"] = [None if e is None else {"k": e[0], "l": e[1]} for e in self.table]
        return out


SPIRAL = PairingSpec("spiral")


def pair(spec: PairingSpec, k: int, l: int) -> int:
    return spec.pair(k, l)


def unpair(spec: PairingSpec, m: int) -> tuple[int, int]:
    return spec.unpair(m)


def load_table(path) -> PairingSpec:
    data = json.loads(Path(path).read_text())
    return PairingSpec.from_table([None if e is None else (int(e["k"]), int(e["l"])) for e in data])


def save_table(spec: PairingSpec, n: int, path) -> None:
    rows = [{"k": k, "l": l} for _, k, l in spec.enumerate(n)]
    Path(path).write_text(json.dumps(rows))


@dataclass
class BijectionReport:
    ok: bool
    checked: int
    failure: Optional[str] = None
    where: Optional[object] = None

    def to_json(self) -> dict:
        return {"check": "bijection", "pass": self.ok, "checked": self.checked,
                "failure": self.failure, "where": self.where}


def _spiral_cells(n: int) -> Iterator[tuple[int, int]]:
    for m in range(1, n + 1):
        yield spiral_unpair(m)


def verify_bijection(spec: PairingSpec, n: int) -> BijectionReport:
    """Check ``pair`` and ``unpair`` are mutually inverse on finite prefixes.

    Tests ``unpair(pair(k, l)) == (k, l)`` on the first ``n`` spiral cells
    and ``pair(unpair(m)) == m`` for ``m`` in ``1..n``.  Table schemes are
    also checked for duplicate entries and for gaps in the prefix.
    """
    if n < 1:
        raise BadIndex("verify_bijection needs N >= 1")
    if spec.scheme == "table":
        seen: dict = {}
        for i, kl in enumerate(spec.table[:n]):
            if kl is None:
                continue
            if kl in seen:
                return BijectionReport(False, i + 1, "duplicate", {"index": i + 1, "k": kl[0], "l": kl[1],
                                                                  "first": seen[kl]})
            seen[kl] = i + 1
        if len(spec.table) < n:
            return BijectionReport(False, len(spec.table), "surjectivity",
                                   {"missing": len(spec.table) + 1})
    for m in range(1, n + 1):
        try:
            k, l = spec.unpair(m)
            back = spec.pair(k, l)
        except TableMiss:
            return BijectionReport(False, m, "surjectivity", {"missing": m})
        if back != m:
            return BijectionReport(False, m, "pair(unpair(m)) != m", {"m": m, "got": back})
    if spec.scheme != "table":
        for i, (k, l) in enumerate(_spiral_cells(n)):
            m = spec.pair(k, l)
            if spec.unpair(m) != (k, l):
                return BijectionReport(False, i + 1, "unpair(pair(k,l)) != (k,l)", {"k": k, "l": l})
    return BijectionReport(True, n)
