"""Synthetic block decompositions of a 3D index space and Morton ordering.

Boxes are created x-fastest (then y, then z), so a power-of-two tiling comes
out of :func:`make_box_array` already in Z-order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

__all__ = [
    "IndexBox",
    "BoxArray",
    "MortonKey",
    "MORTON_BITS",
    "make_box_array",
    "morton_key",
    "interleave3",
    "sfc_order",
]

MORTON_BITS = 21
_MORTON_LIMIT = 1 << MORTON_BITS


@dataclass(frozen=True)
class IndexBox:
    """Rectilinear block of cells, ``lo`` and ``hi`` both inclusive."""

    lo: tuple[int, int, int]
    hi: tuple[int, int, int]

    def __post_init__(self):
        if len(self.lo) != 3 or len(self.hi) != 3:
            raise ValueError("IndexBox needs three coordinates per corner")
        for d in range(3):
            if self.lo[d] < 0:
                raise ValueError(f"negative coordinate in lo={self.lo}")
            if self.lo[d] > self.hi[d]:
                raise ValueError(f"lo={self.lo} exceeds hi={self.hi} along axis {d}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def num_cells(self) -> int:
        nx, ny, nz = self.shape
        return nx * ny * nz

    def intersects(self, other: "IndexBox") -> bool:
        return all(
            self.lo[d] <= other.hi[d] and other.lo[d] <= self.hi[d] for d in range(3)
        )


@dataclass(frozen=True)
class BoxArray:
    domain: IndexBox
    boxes: tuple[IndexBox, ...]

    def __len__(self) -> int:
        return len(self.boxes)

    def __getitem__(self, j: int) -> IndexBox:
        return self.boxes[j]

    def __iter__(self):
        return iter(self.boxes)


class MortonKey(NamedTuple):
    key: int
    box_index: int


def _factor_triple(target: int, extent: Sequence[int]) -> tuple[int, int, int]:
    best = None
    for bx in range(1, target + 1):
        if target % bx or bx > extent[0]:
            continue
        rest = target // bx
        for by in range(1, rest + 1):
            if rest % by or by > extent[1]:
                continue
            bz = rest // by
            if bz > extent[2]:
                continue
            triple = (bx, by, bz)
            # exact ratio comparison via cross-multiplication
            num, den = max(triple), min(triple)
            if best is None:
                best = (triple, num, den)
                continue
            _, bnum, bden = best
            if num * bden < bnum * den or (num * bden == bnum * den and triple > best[0]):
                best = (triple, num, den)
    if best is None:
        raise ValueError(
            f"cannot split extent {tuple(extent)} into exactly {target} boxes"
        )
    return best[0]


def _split_axis(length: int, parts: int) -> list[tuple[int, int]]:
    base, extra = divmod(length, parts)
    intervals = []
    start = 0
    for i in range(parts):
        size = base + 1 if i < extra else base
        intervals.append((start, start + size - 1))
        start += size
    return intervals


def make_box_array(domain_extent: Sequence[int], target_box_count: int) -> BoxArray:
    """Chop a domain anchored at the origin into exactly ``target_box_count`` boxes.

    The box count is factored into per-axis split counts ``(bx, by, bz)`` that
    minimize max/min; ties go to the lexicographically largest triple so the
    x axis receives the largest factor. An axis that does not divide evenly
    gets floor/ceil interval lengths with the longer intervals first.
    """
    extent = tuple(int(e) for e in domain_extent)
    if len(extent) != 3 or any(e < 1 for e in extent):
        raise ValueError(f"domain extent must be three positive integers, got {domain_extent}")
    if target_box_count < 1:
        raise ValueError(f"target_box_count must be >= 1, got {target_box_count}")
    total_cells = extent[0] * extent[1] * extent[2]
    if target_box_count > total_cells:
        raise ValueError(
            f"target_box_count {target_box_count} exceeds the {total_cells} cells in the domain"
        )

    bx, by, bz = _factor_triple(target_box_count, extent)
    xs, ys, zs = (_split_axis(n, b) for n, b in zip(extent, (bx, by, bz)))
    boxes = tuple(
        IndexBox((x0, y0, z0), (x1, y1, z1))
        for z0, z1 in zs
        for y0, y1 in ys
        for x0, x1 in xs
    )
    domain = IndexBox((0, 0, 0), tuple(e - 1 for e in extent))
    return BoxArray(domain=domain, boxes=boxes)


def _spread_bits(v: int) -> int:
    # 21-bit value -> every third bit of a 63-bit word
    v &= 0x1FFFFF
    v = (v | (v << 32)) & 0x1F00000000FFFF
    v = (v | (v << 16)) & 0x1F0000FF0000FF
    v = (v | (v << 8)) & 0x100F00F00F00F00F
    v = (v | (v << 4)) & 0x10C30C30C30C30C3
    v = (v | (v << 2)) & 0x1249249249249249
    return v


def interleave3(x: int, y: int, z: int) -> int:
    """Morton code of a point; x lands in the lowest bit of each 3-bit group."""
    for c in (x, y, z):
        if c < 0 or c >= _MORTON_LIMIT:
            raise ValueError(f"coordinate {c} outside Morton range [0, 2**{MORTON_BITS})")
    return _spread_bits(x) | (_spread_bits(y) << 1) | (_spread_bits(z) << 2)


def morton_key(box: IndexBox, box_index: int = 0) -> MortonKey:
    return MortonKey(interleave3(*box.lo), box_index)


def sfc_order(box_array: BoxArray | Sequence[IndexBox]) -> list[int]:
    """Box indices sorted by the Morton key of each box's lo corner.

    Ties keep the original index order.
    """
    boxes = box_array.boxes if isinstance(box_array, BoxArray) else tuple(box_array)
    if not boxes:
        raise ValueError("cannot order an empty box array")
    keys = [morton_key(b, j) for j, b in enumerate(boxes)]
    keys.sort()
    return [k.box_index for k in keys]
