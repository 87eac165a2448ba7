"""Decorated partitions, the epsilon matrix, allowed moves, the
eps-noncrossing decision procedure, enumeration, admissible label tuples,
and the lattice operations on eps-noncrossing partitions.

The decision procedure is an exhaustive memoized search over the reduction
tree: a decorated partition counts as eps-noncrossing when some sequence of
allowed moves and removals of interval blocks empties it.  No greedy
shortcut is trusted; confluence of the reduction relation is an open
question (see scripts/greedy_vs_exhaustive.py).

Memo keys are canonicalized up to label renaming: a decoration is replaced
by its first-occurrence pattern together with the epsilon submatrix induced
on the labels it actually uses.  Renaming labels is an isomorphism of the
whole structure, so this is sound and lets sweeps over many decorations
share work.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import LatticeViolationError, SizeLimitError, StateLimitError
from .partitions import (
    SetPartition,
    _is_interval_mask,
    iter_partitions,
    join_pn,
    meet_pn,
    refines,
    zero_partition,
)

DEFAULT_MAX_EPS_ENUM_N = 8
DEFAULT_STATE_LIMIT = 10**6

Decoration = tuple[int, ...]


@dataclass(frozen=True)
class EpsilonMatrix:
    """Symmetric {0,1} matrix over a finite label set, diagonal included.

    ``labels`` declares the index set; ``rows`` holds the entries in label
    order.  Decorations are validated against ``labels`` at API boundaries.
    """

    labels: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.labels)
        if len(set(self.labels)) != k:
            raise ValueError("duplicate labels")
        if len(self.rows) != k or any(len(r) != k for r in self.rows):
            raise ValueError("entry matrix is not square over the label set")
        for i in range(k):
            for j in range(k):
                v = self.rows[i][j]
                if v not in (0, 1):
                    raise ValueError("entries must be 0 or 1")
                if v != self.rows[j][i]:
                    raise ValueError("entry matrix is not symmetric")

    @cached_property
    def _index(self) -> dict[int, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def value(self, a: int, b: int) -> int:
        """Entry for the (possibly equal) labels a, b."""
        idx = self._index
        return self.rows[idx[a]][idx[b]]

    def has_label(self, a: int) -> bool:
        return a in self._index

    @classmethod
    def constant(cls, labels: Sequence[int], offdiag: int, diag: int) -> "EpsilonMatrix":
        labs = tuple(labels)
        rows = tuple(
            tuple(diag if i == j else offdiag for j in range(len(labs)))
            for i in range(len(labs))
        )
        return cls(labs, rows)

    @classmethod
    def from_links(
        cls,
        labels: Sequence[int],
        links: Iterable[tuple[int, int]] = (),
        diag: Sequence[int] | int = 0,
    ) -> "EpsilonMatrix":
        """Matrix with the given off-diagonal pairs set to 1, everything else
        0, and the stated diagonal (scalar or per-label sequence)."""
        labs = tuple(labels)
        idx = {lab: i for i, lab in enumerate(labs)}
        k = len(labs)
        grid = [[0] * k for _ in range(k)]
        diags = [diag] * k if isinstance(diag, int) else list(diag)
        if len(diags) != k:
            raise ValueError("diagonal length mismatch")
        for i, v in enumerate(diags):
            grid[i][i] = v
        for a, b in links:
            if a == b:
                raise ValueError("links must join distinct labels")
            grid[idx[a]][idx[b]] = 1
            grid[idx[b]][idx[a]] = 1
        return cls(labs, tuple(tuple(r) for r in grid))


def validate_decoration(d: Sequence[int], eps: EpsilonMatrix) -> Decoration:
    d = tuple(d)
    for lab in d:
        if not eps.has_label(lab):
            raise ValueError(f"label {lab} not declared in the epsilon matrix")
    return d


@dataclass(frozen=True, order=True)
class DecoratedPartition:
    """A set partition together with a label for every position."""

    partition: SetPartition
    decoration: Decoration

    def __post_init__(self) -> None:
        if len(self.decoration) != self.partition.n:
            raise ValueError("decoration length differs from ground-set size")

    @property
    def n(self) -> int:
        return self.partition.n

    def __str__(self) -> str:
        if self.n == 0:
            return "{}"
        d = self.decoration
        return "".join(
            "{" + ",".join(f"{e}_{d[e - 1]}" for e in b) + "}"
            for b in self.partition.blocks
        )


# ---------------------------------------------------------------------------
# allowed moves and orbits


def is_allowed_move(dp: DecoratedPartition, i: int, eps: EpsilonMatrix) -> bool:
    """An adjacent transposition (i, i+1) is allowed when the two labels
    carry epsilon value 1 and either differ, or agree while the positions
    sit in different blocks."""
    if not 1 <= i <= dp.n - 1:
        raise ValueError(f"position {i} outside [1,{dp.n - 1}]")
    a = dp.decoration[i - 1]
    b = dp.decoration[i]
    if eps.value(a, b) != 1:
        return False
    if a != b:
        return True
    return dp.partition.block_index_of(i) != dp.partition.block_index_of(i + 1)


def apply_move(dp: DecoratedPartition, i: int, eps: EpsilonMatrix) -> DecoratedPartition:
    """Apply the allowed transposition (i, i+1): blocks are transported and
    the decoration entries at i, i+1 swap.  Involutive."""
    if not is_allowed_move(dp, i, eps):
        raise ValueError(f"transposition ({i},{i + 1}) is not an allowed move here")
    return _apply_move_unchecked(dp, i)


def _apply_move_unchecked(dp: DecoratedPartition, i: int) -> DecoratedPartition:
    from .partitions import transpose_adjacent

    d = dp.decoration
    nd = d[: i - 1] + (d[i], d[i - 1]) + d[i + 1 :]
    return DecoratedPartition(transpose_adjacent(dp.partition, i), nd)


def allowed_orbit(
    dp: DecoratedPartition,
    eps: EpsilonMatrix,
    *,
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> set[DecoratedPartition]:
    """Breadth-first closure of dp under allowed moves.

    Allowed-ness is re-tested at every reached state, since it depends on
    the current partition and decoration; the closure therefore realizes a
    groupoid action rather than a group action.  States are canonical
    decorated partitions, so rearrangements that produce an identical
    canonical form coincide.
    """
    validate_decoration(dp.decoration, eps)
    seen = {dp}
    queue = deque([dp])
    while queue:
        cur = queue.popleft()
        for i in range(1, cur.n):
            if is_allowed_move(cur, i, eps):
                nxt = _apply_move_unchecked(cur, i)
                if nxt not in seen:
                    if len(seen) >= state_limit:
                        raise StateLimitError(
                            f"orbit exceeded the state limit of {state_limit}"
                        )
                    seen.add(nxt)
                    queue.append(nxt)
    return seen


# ---------------------------------------------------------------------------
# the decision procedure
#
# Internal states are (block_masks, decoration_indices) pairs where the
# decoration entries index directly into a small epsilon table.  The memo
# key canonicalizes the decoration to its first-occurrence pattern plus the
# induced epsilon submatrix.

_DECISION_MEMO: dict[tuple, bool] = {}


def _class_key(masks: tuple[int, ...], dec: tuple[int, ...], tbl) -> tuple:
    order: list[int] = []
    remap: dict[int, int] = {}
    pattern = []
    for v in dec:
        j = remap.get(v)
        if j is None:
            j = len(order)
            remap[v] = j
            order.append(v)
        pattern.append(j)
    sub = tuple(tuple(tbl[a][b] for b in order) for a in order)
    return (masks, tuple(pattern), sub)


def _compact_mask(mask: int, removed: int) -> int:
    # drop the bit positions of `removed` and close the gaps
    out = mask
    rem = removed
    shift_positions = []
    while rem:
        low = rem & -rem
        shift_positions.append(low.bit_length() - 1)
        rem ^= low
    for p in reversed(shift_positions):
        out = (out & ((1 << p) - 1)) | ((out >> (p + 1)) << p)
    return out


def _remove_block(
    masks: tuple[int, ...], dec: tuple[int, ...], bi: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    removed = masks[bi]
    new_masks = tuple(
        _compact_mask(m, removed) for j, m in enumerate(masks) if j != bi
    )
    new_dec = tuple(d for i, d in enumerate(dec) if not (removed >> i) & 1)
    return new_masks, new_dec


def _swap_state(
    masks: tuple[int, ...], dec: tuple[int, ...], i: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    lo = 1 << (i - 1)
    pair = lo | (lo << 1)
    out = []
    for m in masks:
        t = m & pair
        if t and t != pair:
            m ^= pair
        out.append(m)
    out.sort(key=lambda m: m & -m)
    nd = dec[: i - 1] + (dec[i], dec[i - 1]) + dec[i + 1 :]
    return tuple(out), nd


def _blocks_differ(masks: tuple[int, ...], i: int) -> bool:
    lo = 1 << (i - 1)
    hi = lo << 1
    for m in masks:
        if m & lo:
            return not (m & hi)
    raise AssertionError("position not covered")


def _decide(masks: tuple[int, ...], dec: tuple[int, ...], tbl, budget: list[int]) -> bool:
    if not masks:
        return True
    start_key = _class_key(masks, dec, tbl)
    hit = _DECISION_MEMO.get(start_key)
    if hit is not None:
        return hit
    n = len(dec)
    start = (masks, dec)
    seen = {start}
    queue = deque([start])
    result = False
    while queue:
        pm, pd = queue.popleft()
        if (pm, pd) != start:
            h = _DECISION_MEMO.get(_class_key(pm, pd, tbl))
            if h is not None:
                # same orbit, same answer
                result = h
                break
        for bi, m in enumerate(pm):
            if _is_interval_mask(m):
                rm, rd = _remove_block(pm, pd, bi)
                if _decide(rm, rd, tbl, budget):
                    result = True
                    break
        if result:
            break
        for i in range(1, n):
            a = pd[i - 1]
            b = pd[i]
            if tbl[a][b] and (a != b or _blocks_differ(pm, i)):
                nxt = _swap_state(pm, pd, i)
                if nxt not in seen:
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise StateLimitError("search exceeded its state budget")
                    seen.add(nxt)
                    queue.append(nxt)
    for pm, pd in seen:
        _DECISION_MEMO[_class_key(pm, pd, tbl)] = result
    return result


def is_eps_noncrossing(
    dp: DecoratedPartition,
    eps: EpsilonMatrix,
    *,
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> bool:
    """Decide whether dp can be emptied by repeatedly moving some block
    into an interval with allowed moves and removing it (standardizing the
    remainder each time)."""
    validate_decoration(dp.decoration, eps)
    idx = eps._index
    dec = tuple(idx[v] for v in dp.decoration)
    return _decide(dp.partition.block_masks, dec, eps.rows, [state_limit])


def _class_partitions(
    n: int,
    pattern: tuple[int, ...],
    tbl: tuple[tuple[int, ...], ...],
    budget: list[int],
) -> tuple[SetPartition, ...]:
    """All eps-noncrossing partitions for one decoration class, in
    enumeration order.  Cached, since many decorations share a class."""
    key = (n, pattern, tbl)
    cached = _ENUM_CACHE.get(key)
    if cached is None:
        cached = tuple(
            p for p in iter_partitions(n) if _decide(p.block_masks, pattern, tbl, budget)
        )
        _ENUM_CACHE[key] = cached
    return cached


_ENUM_CACHE: dict[tuple, tuple[SetPartition, ...]] = {}


def _canonical_class(
    d: Decoration, eps: EpsilonMatrix
) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    idx = eps._index
    dec = tuple(idx[v] for v in d)
    key = _class_key((), dec, eps.rows)
    return key[1], key[2]


def enumerate_eps_nc(
    d: Sequence[int],
    eps: EpsilonMatrix,
    *,
    max_n: int = DEFAULT_MAX_EPS_ENUM_N,
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> list[DecoratedPartition]:
    """All d-decorated eps-noncrossing partitions of [len(d)], in the
    deterministic enumeration order of the underlying partitions."""
    d = validate_decoration(d, eps)
    n = len(d)
    if n > max_n:
        raise SizeLimitError(f"eps-noncrossing enumeration at n={n} exceeds limit {max_n}")
    pattern, tbl = _canonical_class(d, eps)
    parts = _class_partitions(n, pattern, tbl, [state_limit])
    return [DecoratedPartition(p, d) for p in parts]


def in_admissible(seq: Sequence[int], eps: EpsilonMatrix) -> bool:
    """Admissible label tuples: any two equal entries must be separated by
    some entry with a different label and epsilon value 0 against them."""
    seq = validate_decoration(seq, eps)
    if not seq:
        raise ValueError("label sequence must be nonempty")
    for k in range(len(seq)):
        for l in range(k + 1, len(seq)):
            if seq[k] != seq[l]:
                continue
            if not any(
                seq[p] != seq[k] and eps.value(seq[p], seq[k]) == 0
                for p in range(k + 1, l)
            ):
                return False
    return True


# ---------------------------------------------------------------------------
# lattice operations


def _require_enc(dp: DecoratedPartition, eps: EpsilonMatrix, state_limit: int) -> None:
    if not is_eps_noncrossing(dp, eps, state_limit=state_limit):
        raise ValueError(f"{dp} is not eps-noncrossing")


def meet_eps(
    dp1: DecoratedPartition,
    dp2: DecoratedPartition,
    eps: EpsilonMatrix,
    *,
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> DecoratedPartition:
    """Meet of two eps-noncrossing partitions with the same decoration;
    coincides with the meet of the underlying partitions."""
    if dp1.decoration != dp2.decoration:
        raise ValueError("decorations differ")
    _require_enc(dp1, eps, state_limit)
    _require_enc(dp2, eps, state_limit)
    met = DecoratedPartition(meet_pn(dp1.partition, dp2.partition), dp1.decoration)
    if not is_eps_noncrossing(met, eps, state_limit=state_limit):
        raise LatticeViolationError(
            f"meet of {dp1} and {dp2} is not eps-noncrossing: {met}"
        )
    return met


def join_eps(
    dp1: DecoratedPartition,
    dp2: DecoratedPartition,
    eps: EpsilonMatrix,
    *,
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> DecoratedPartition:
    """Join: the unique minimal eps-noncrossing partition coarser than both.

    Found by filtering the enumeration; every upper bound lies above the
    plain-partition join, which bounds the candidate set.  Failure of
    uniqueness aborts loudly, since it would falsify the lattice property.
    """
    if dp1.decoration != dp2.decoration:
        raise ValueError("decorations differ")
    _require_enc(dp1, eps, state_limit)
    _require_enc(dp2, eps, state_limit)
    d = dp1.decoration
    lower = join_pn(dp1.partition, dp2.partition)
    pattern, tbl = _canonical_class(d, eps)
    candidates = [
        p
        for p in _class_partitions(len(d), pattern, tbl, [state_limit])
        if refines(lower, p)
    ]
    minimal = [
        p
        for p in candidates
        if not any(q is not p and refines(q, p) for q in candidates)
    ]
    if len(minimal) != 1:
        raise LatticeViolationError(
            f"{len(minimal)} minimal upper bounds for {dp1} and {dp2}"
        )
    return DecoratedPartition(minimal[0], d)


def lift_inverse_image(
    dp: DecoratedPartition, cuts: Sequence[int], n: int
) -> DecoratedPartition:
    """Inverse image of a decorated partition of [m] under the grouping
    surjection [n] -> [m] with the given strictly increasing cut points.

    Group j is the interval (cuts[j-1], cuts[j]]; every element j of [m] is
    replaced by its group, and positions inherit their group's label.
    """
    m = dp.n
    cuts = tuple(cuts)
    if m == 0:
        if cuts or n != 0:
            raise ValueError("empty partition lifts only to the empty partition")
        return DecoratedPartition(SetPartition(0, ()), ())
    if len(cuts) != m - 1:
        raise ValueError(f"expected {m - 1} cut points for m={m}")
    bounds = (0,) + cuts + (n,)
    for a, b in zip(bounds, bounds[1:]):
        if a >= b:
            raise ValueError("cut points must be strictly increasing inside [1,n-1]")
    group_masks = [
        (((1 << bounds[j + 1]) - 1) ^ ((1 << bounds[j]) - 1)) for j in range(m)
    ]
    masks = []
    for bm in dp.partition.block_masks:
        lifted = 0
        mm = bm
        while mm:
            low = mm & -mm
            lifted |= group_masks[low.bit_length() - 1]
            mm ^= low
        masks.append(lifted)
    masks.sort(key=lambda x: x & -x)
    dec = []
    for j in range(m):
        dec.extend([dp.decoration[j]] * (bounds[j + 1] - bounds[j]))
    return DecoratedPartition(SetPartition(n, tuple(masks)), tuple(dec))


def join_condition(
    phi: DecoratedPartition,
    cuts: Sequence[int],
    gamma: DecoratedPartition,
    eps: EpsilonMatrix,
    *,
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> bool:
    """True iff the join of phi with the lifted all-singletons partition of
    the groups equals the lift of gamma."""
    n = phi.n
    tilde0 = lift_inverse_image(
        DecoratedPartition(zero_partition(gamma.n), gamma.decoration), cuts, n
    )
    if phi.decoration != tilde0.decoration:
        raise ValueError("phi's decoration does not match the lifted grouping")
    target = lift_inverse_image(gamma, cuts, n)
    return join_eps(phi, tilde0, eps, state_limit=state_limit) == target


# ---------------------------------------------------------------------------
# experimental greedy reducer (kept for the confluence experiment)


def greedy_trivializable(
    dp: DecoratedPartition,
    eps: EpsilonMatrix,
    *,
    state_limit: int = DEFAULT_STATE_LIMIT,
) -> bool:
    """Commit to the first reduction found (breadth-first over the orbit,
    blocks in canonical order) with no backtracking.  Experimental
    comparator for the exhaustive search; not used by the engine."""
    validate_decoration(dp.decoration, eps)
    idx = eps._index
    masks = dp.partition.block_masks
    dec = tuple(idx[v] for v in dp.decoration)
    tbl = eps.rows
    budget = state_limit
    while masks:
        found = None
        seen = {(masks, dec)}
        queue = deque([(masks, dec)])
        while queue and found is None:
            pm, pd = queue.popleft()
            for bi, m in enumerate(pm):
                if _is_interval_mask(m):
                    found = _remove_block(pm, pd, bi)
                    break
            if found is not None:
                break
            for i in range(1, len(pd)):
                a = pd[i - 1]
                b = pd[i]
                if tbl[a][b] and (a != b or _blocks_differ(pm, i)):
                    nxt = _swap_state(pm, pd, i)
                    if nxt not in seen:
                        budget -= 1
                        if budget < 0:
                            raise StateLimitError("greedy search exceeded its state budget")
                        seen.add(nxt)
                        queue.append(nxt)
        if found is None:
            return False
        masks, dec = found
    return True
