"""Words over decorated generators, moment functionals, and recursive
cumulant extraction over eps-noncrossing partitions.

A word is a tuple of letters; a letter is a (label, symbol) pair.  The
symbol is an opaque hashable id; the reserved symbol UNIT marks the unit
of the algebra carrying that label.  Cumulants are memoized on the literal
letter sequence; invariance under allowed swaps is a verified property,
not an assumed canonicalization.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Sequence

from .epsilon import (
    DEFAULT_MAX_EPS_ENUM_N,
    DEFAULT_STATE_LIMIT,
    DecoratedPartition,
    EpsilonMatrix,
    apply_move,
    enumerate_eps_nc,
    is_allowed_move,
    is_eps_noncrossing,
    join_condition,
    lift_inverse_image,
)
from .errors import InputError
from .partitions import SetPartition, zero_partition

UNIT = "1"
GENERATOR = "x"

Letter = tuple[int, Hashable]
Word = tuple[Letter, ...]


def letter(label: int, symbol: Hashable = GENERATOR) -> Letter:
    return (label, symbol)


def unit_letter(label: int) -> Letter:
    return (label, UNIT)


def word_from_labels(labels: Sequence[int], symbol: Hashable = GENERATOR) -> Word:
    return tuple((lab, symbol) for lab in labels)


def word_labels(w: Word) -> tuple[int, ...]:
    return tuple(lab for lab, _ in w)


def strip_units(w: Word) -> Word:
    return tuple(l for l in w if l[1] != UNIT)


def subword_by_mask(w: Word, mask: int) -> Word:
    out = []
    while mask:
        low = mask & -mask
        out.append(w[low.bit_length() - 1])
        mask ^= low
    return tuple(out)


def swap_letters(w: Word, i: int) -> Word:
    """Swap the letters at positions i and i+1 (1-based)."""
    if not 1 <= i <= len(w) - 1:
        raise ValueError(f"position {i} outside [1,{len(w) - 1}]")
    return w[: i - 1] + (w[i], w[i - 1]) + w[i + 1 :]


class MomentFunctional:
    """Evaluation contract: word -> exact rational, unital, insensitive to
    UNIT letters."""

    def moment(self, w: Word) -> Fraction:
        raise NotImplementedError


class DictMomentFunctional(MomentFunctional):
    """Moment data given extensionally on unit-free words.

    Missing words are an error, never an implicit zero.
    """

    def __init__(self, data: dict[Word, Fraction]):
        self.data = {strip_units(w): Fraction(v) for w, v in data.items()}

    def moment(self, w: Word) -> Fraction:
        w = strip_units(w)
        if not w:
            return Fraction(1)
        try:
            return self.data[w]
        except KeyError:
            raise InputError(f"no moment data for word {w!r}") from None


def phi_on_partition(phi: MomentFunctional, part: SetPartition, w: Word) -> Fraction:
    """Product over blocks of phi on the subword in position order."""
    if len(w) != part.n:
        raise ValueError("word length differs from the partition's ground set")
    prod = Fraction(1)
    for m in part.block_masks:
        prod *= phi.moment(subword_by_mask(w, m))
    return prod


class CumulantEngine:
    """Extracts cumulants of a fixed moment functional with respect to a
    fixed epsilon matrix.

    Defining recursion: the moment of a word equals the sum, over all
    eps-noncrossing partitions decorated by the word's labels, of the
    product of cumulants of the standardized block subwords.  Solving for
    the full-block term gives the cumulant of the word itself.
    """

    def __init__(
        self,
        phi: MomentFunctional,
        eps: EpsilonMatrix,
        *,
        max_n: int = DEFAULT_MAX_EPS_ENUM_N,
        state_limit: int = DEFAULT_STATE_LIMIT,
    ):
        self.phi = phi
        self.eps = eps
        self.max_n = max_n
        self.state_limit = state_limit
        self._memo: dict[Word, Fraction] = {}

    def cumulant(self, w: Word) -> Fraction:
        """The cumulant of the literal letter sequence w."""
        v = self._memo.get(w)
        if v is not None:
            return v
        if not w:
            raise ValueError("cumulants are defined for nonempty words")
        if len(w) == 1:
            v = self.phi.moment(w)
        else:
            rest = Fraction(0)
            for dp in self._enc(word_labels(w)):
                if dp.partition.block_count == 1:
                    continue
                rest += self._block_product(dp.partition, w)
            v = self.phi.moment(w) - rest
        self._memo[w] = v
        return v

    def _enc(self, d: tuple[int, ...]) -> list[DecoratedPartition]:
        return enumerate_eps_nc(
            d, self.eps, max_n=self.max_n, state_limit=self.state_limit
        )

    def _block_product(self, part: SetPartition, w: Word) -> Fraction:
        prod = Fraction(1)
        for m in part.block_masks:
            prod *= self.cumulant(subword_by_mask(w, m))
        return prod

    def cumulant_on_partition(self, dp: DecoratedPartition, w: Word) -> Fraction:
        """Product of cumulants over the blocks of an eps-noncrossing dp."""
        if dp.decoration != word_labels(w):
            raise ValueError("partition decoration does not match the word's labels")
        if not is_eps_noncrossing(dp, self.eps, state_limit=self.state_limit):
            raise ValueError(f"{dp} is not eps-noncrossing")
        return self._block_product(dp.partition, w)

    def moment_from_cumulants(self, w: Word) -> Fraction:
        """Forward sum over all eps-noncrossing partitions; equals the
        moment of w exactly when the table is consistent."""
        if not w:
            return Fraction(1)
        total = Fraction(0)
        for dp in self._enc(word_labels(w)):
            total += self._block_product(dp.partition, w)
        return total

    def unit_cumulant_vanishes(self, w: Word) -> bool:
        """For words of length >= 2 containing a UNIT letter, the cumulant
        must vanish."""
        if len(w) < 2 or all(l[1] != UNIT for l in w):
            raise ValueError("expected a word of length >= 2 with a UNIT letter")
        return self.cumulant(w) == 0

    def move_invariance_check(self, dp: DecoratedPartition, w: Word, i: int) -> bool:
        """Both the blockwise moment product and the blockwise cumulant
        product must be unchanged by an allowed swap of letters i, i+1
        together with the transported partition."""
        if dp.decoration != word_labels(w):
            raise ValueError("partition decoration does not match the word's labels")
        dp2 = apply_move(dp, i, self.eps)  # raises if the move is not allowed
        w2 = swap_letters(w, i)
        return (
            phi_on_partition(self.phi, dp.partition, w)
            == phi_on_partition(self.phi, dp2.partition, w2)
        ) and (
            self.cumulant_on_partition(dp, w)
            == self.cumulant_on_partition(dp2, w2)
        )

    def grouping_identity(
        self, w: Word, cuts: Sequence[int], gamma: DecoratedPartition
    ) -> tuple[Fraction, Fraction]:
        """Compare the blockwise cumulant of grouped product letters with
        the sum over partitions whose join with the group partition lifts
        gamma.

        Each group of consecutive letters must carry a single label; the
        group becomes an opaque product letter whose moments delegate to
        phi on the concatenated underlying word.  Returns (lhs, rhs).
        """
        n = len(w)
        m = gamma.n
        cuts = tuple(cuts)
        bounds = (0,) + cuts + (n,)
        if len(cuts) != m - 1:
            raise ValueError(f"expected {m - 1} cut points for m={m}")
        groups = [w[bounds[j] : bounds[j + 1]] for j in range(m)]
        for j, g in enumerate(groups):
            if not g:
                raise ValueError("cut points must be strictly increasing inside [1,n-1]")
            labs = {lab for lab, _ in g}
            if len(labs) != 1:
                raise ValueError(f"group {j + 1} mixes labels {sorted(labs)}")
            if next(iter(labs)) != gamma.decoration[j]:
                raise ValueError("gamma's decoration does not match the group labels")
        if not is_eps_noncrossing(gamma, self.eps, state_limit=self.state_limit):
            raise ValueError(f"{gamma} is not eps-noncrossing")

        b_word: Word = tuple((gamma.decoration[j], tuple(groups[j])) for j in range(m))
        grouped_engine = CumulantEngine(
            _FlattenedMoments(self.phi),
            self.eps,
            max_n=self.max_n,
            state_limit=self.state_limit,
        )
        lhs = grouped_engine.cumulant_on_partition(gamma, b_word)

        rhs = Fraction(0)
        for phi_part in self._enc(word_labels(w)):
            if join_condition(phi_part, cuts, gamma, self.eps, state_limit=self.state_limit):
                rhs += self._block_product(phi_part.partition, w)
        return lhs, rhs


class _FlattenedMoments(MomentFunctional):
    """Moments of product letters: concatenate the underlying letters and
    delegate to the base functional."""

    def __init__(self, base: MomentFunctional):
        self.base = base

    def moment(self, w: Word) -> Fraction:
        flat: list[Letter] = []
        for _, symbol in w:
            if isinstance(symbol, tuple):
                flat.extend(symbol)
            else:
                raise ValueError("expected product letters")
        return self.base.moment(tuple(flat))
