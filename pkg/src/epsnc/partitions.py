"""Canonical set partitions of {1,...,n}: enumeration, refinement order,
lattice operations, restriction and standardization.

Blocks are kept as bitmasks (bit i-1 stands for element i) so that meets,
restrictions and containment tests are single word operations.  All values
are immutable; every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import SizeLimitError

# Hard ceiling for full enumeration; Bell(10) = 115975 is still desk scale,
# anything beyond needs a deliberate override.
DEFAULT_MAX_ENUM_N = 10


def _mask_to_elems(mask: int) -> tuple[int, ...]:
    elems = []
    while mask:
        low = mask & -mask
        elems.append(low.bit_length())
        mask ^= low
    return tuple(elems)


def _elems_to_mask(elems: Iterable[int], n: int) -> int:
    mask = 0
    for e in elems:
        if not 1 <= e <= n:
            raise ValueError(f"element {e} outside ground set [1,{n}]")
        bit = 1 << (e - 1)
        if mask & bit:
            raise ValueError(f"repeated element {e}")
        mask |= bit
    return mask


def _is_interval_mask(mask: int) -> bool:
    # contiguous run of set bits
    q = mask // (mask & -mask)
    return (q & (q + 1)) == 0


@dataclass(frozen=True, order=True)
class SetPartition:
    """A partition of {1,...,n} into disjoint nonempty blocks.

    Canonical form: blocks sorted by their minimum element, which the
    constructor enforces.  Equality and hashing are structural, so
    partitions can key memo tables directly.
    """

    n: int
    block_masks: tuple[int, ...]

    def __post_init__(self) -> None:
        union = 0
        prev_low = 0
        for m in self.block_masks:
            if m <= 0:
                raise ValueError("empty block")
            if m & union:
                raise ValueError("blocks overlap")
            low = m & -m
            if low <= prev_low:
                raise ValueError("blocks not sorted by minimum element")
            prev_low = low
            union |= m
        if union != (1 << self.n) - 1:
            raise ValueError(f"blocks do not cover [1,{self.n}]")

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        masks = sorted((_elems_to_mask(b, n) for b in blocks), key=lambda m: m & -m)
        return cls(n, tuple(masks))

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """Blocks as ascending element tuples, in canonical order."""
        return tuple(_mask_to_elems(m) for m in self.block_masks)

    @property
    def block_count(self) -> int:
        return len(self.block_masks)

    def block_index_of(self, element: int) -> int:
        bit = 1 << (element - 1)
        for i, m in enumerate(self.block_masks):
            if m & bit:
                return i
        raise ValueError(f"element {element} outside ground set [1,{self.n}]")

    def __str__(self) -> str:
        if self.n == 0:
            return "{}"
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


def zero_partition(n: int) -> SetPartition:
    """The all-singletons partition, minimal in the refinement order."""
    return SetPartition(n, tuple(1 << i for i in range(n)))


def one_partition(n: int) -> SetPartition:
    """The single-block partition, maximal in the refinement order."""
    if n == 0:
        return SetPartition(0, ())
    return SetPartition(n, ((1 << n) - 1,))


def _rgs_to_masks(rgs: Sequence[int]) -> tuple[int, ...]:
    nblocks = max(rgs) + 1 if rgs else 0
    masks = [0] * nblocks
    for pos, v in enumerate(rgs):
        masks[v] |= 1 << pos
    return tuple(masks)


def iter_partitions(n: int):
    """Yield all partitions of [n] in restricted-growth-string lexicographic
    order.  Growth strings index blocks by first appearance, so the induced
    block order is already canonical."""
    if n == 0:
        yield SetPartition(0, ())
        return
    a = [0] * n

    def rec(i: int, mx: int):
        if i == n:
            yield SetPartition(n, _rgs_to_masks(a))
            return
        for v in range(mx + 2):
            a[i] = v
            yield from rec(i + 1, mx if v <= mx else v)

    yield from rec(1, 0)


def enumerate_partitions(n: int, *, max_n: int = DEFAULT_MAX_ENUM_N) -> list[SetPartition]:
    """All partitions of [n], deterministically ordered; length is Bell(n)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > max_n:
        raise SizeLimitError(f"enumeration of partitions of [{n}] exceeds limit {max_n}")
    return list(iter_partitions(n))


def is_noncrossing(p: SetPartition) -> bool:
    """True iff no two blocks interleave as i < j < k < l with i,k in one
    block and j,l in the other."""
    masks = p.block_masks
    k = len(masks)
    for a in range(k):
        for b in range(a + 1, k):
            if _blocks_cross(masks[a], masks[b]):
                return False
    return True


def _blocks_cross(ma: int, mb: int) -> bool:
    # merge-scan the two blocks; crossing iff the membership sequence
    # alternates through four or more runs (ABAB or BABA)
    union = ma | mb
    runs = 0
    last = 0
    while union:
        low = union & -union
        side = 1 if ma & low else 2
        if side != last:
            runs += 1
            if runs >= 4:
                return True
            last = side
        union ^= low
    return False


def refines(p: SetPartition, q: SetPartition) -> bool:
    """True iff every block of p is contained in some block of q."""
    if p.n != q.n:
        raise ValueError("partitions have different ground sets")
    for m in p.block_masks:
        low = m & -m
        for qm in q.block_masks:
            if qm & low:
                if m & ~qm:
                    return False
                break
    return True


def meet_pn(p: SetPartition, q: SetPartition) -> SetPartition:
    """Meet in the full partition lattice: pairwise block intersections."""
    if p.n != q.n:
        raise ValueError("partitions have different ground sets")
    masks = []
    for a in p.block_masks:
        for b in q.block_masks:
            m = a & b
            if m:
                masks.append(m)
    masks.sort(key=lambda m: m & -m)
    return SetPartition(p.n, tuple(masks))


def join_pn(p: SetPartition, q: SetPartition) -> SetPartition:
    """Join in the full partition lattice via transitive closure of block
    overlap (union-find over elements)."""
    if p.n != q.n:
        raise ValueError("partitions have different ground sets")
    n = p.n
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for masks in (p.block_masks, q.block_masks):
        for m in masks:
            root = find((m & -m).bit_length() - 1)
            mm = m
            while mm:
                low = mm & -mm
                parent[find(low.bit_length() - 1)] = root
                mm ^= low
    groups: dict[int, int] = {}
    for i in range(n):
        groups.setdefault(find(i), 0)
        groups[find(i)] |= 1 << i
    masks_out = sorted(groups.values(), key=lambda m: m & -m)
    return SetPartition(n, tuple(masks_out))


def restrict_standardize(p: SetPartition, subset: Iterable[int]) -> SetPartition:
    """Restrict p to a subset of [n] and relabel through the unique
    order-preserving bijection onto an initial segment."""
    xs = sorted(set(subset))
    if xs and (xs[0] < 1 or xs[-1] > p.n):
        raise ValueError(f"subset not contained in [1,{p.n}]")
    pos = {x: i for i, x in enumerate(xs)}
    masks = []
    for m in p.block_masks:
        new = 0
        mm = m
        while mm:
            low = mm & -mm
            e = low.bit_length()
            if e in pos:
                new |= 1 << pos[e]
            mm ^= low
        if new:
            masks.append(new)
    masks.sort(key=lambda m: m & -m)
    return SetPartition(len(xs), tuple(masks))


def kernel(labels: Sequence[int]) -> SetPartition:
    """Partition of positions by equal label: blocks are the nonempty
    preimages of each label value."""
    groups: dict[int, int] = {}
    for i, lab in enumerate(labels):
        groups[lab] = groups.get(lab, 0) | (1 << i)
    masks = sorted(groups.values(), key=lambda m: m & -m)
    return SetPartition(len(labels), tuple(masks))


def transpose_adjacent(p: SetPartition, i: int) -> SetPartition:
    """Transport blocks through the adjacent transposition (i, i+1)."""
    if not 1 <= i <= p.n - 1:
        raise ValueError(f"position {i} outside [1,{p.n - 1}]")
    lo = 1 << (i - 1)
    pair = lo | (lo << 1)
    masks = []
    for m in p.block_masks:
        t = m & pair
        if t and t != pair:
            m ^= pair
        masks.append(m)
    masks.sort(key=lambda m: m & -m)
    return SetPartition(p.n, tuple(masks))
