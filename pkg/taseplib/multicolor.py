"""This module implements the color-position symmetry of multicolor TASEP.

Applying swap operators ``W_{s_1}`` through ``W_{s_k}`` to the identity
bijection gives the inverse of applying them in the reversed order. The
random counterpart relates the process that is sorted before running the
dynamics with the inverse of the process that is sorted afterwards.
"""

from dataclasses import dataclass
from enum import Enum
from typing import ClassVar

import numpy as np

from taseplib.kinetics import evolve, PoissonField
from taseplib.lattice_core import (
    apply_swap,
    ColorConfig,
    ICKind,
    invert,
    make_initial,
)


class Order(Enum):
    """The enum class for the order in which swaps are applied."""

    FORWARD = 'forward'
    """The first bond first."""
    REVERSED = 'reversed'
    """The last bond first."""


@dataclass(frozen=True)
class TranspositionSeq:
    """The class for sequences of adjacent transpositions.

    Each entry ``z`` denotes the transposition of sites ``z`` and ``z + 1``.

    >>> TranspositionSeq.sorter(0, 2).bonds
    (0, 1, 0)
    """

    bonds: tuple[int, ...]
    """The left sites of the transposed bonds."""

    def __post_init__(self) -> None:
        object.__setattr__(self, 'bonds', tuple(map(int, self.bonds)))

    def __len__(self) -> int:
        return len(self.bonds)

    @property
    def span(self) -> tuple[int, int]:
        """Get the smallest window containing every bond.

        :return: The leftmost and rightmost sites.
        """
        if not self.bonds:
            return 0, 0

        return min(self.bonds), max(self.bonds) + 1

    def reversed(self) -> 'TranspositionSeq':
        return TranspositionSeq(self.bonds[::-1])

    @classmethod
    def sorter(cls, lo: int, hi: int) -> 'TranspositionSeq':
        """Get a reduced word of the reversal of sites ``lo`` through ``hi``.

        Applied to the identity it sorts the window in decreasing order
        using ``L (L - 1) / 2`` swaps for a window of ``L`` sites.

        :param lo: The leftmost site.
        :param hi: The rightmost site.
        :return: The sequence.
        """
        if lo > hi:
            raise ValueError('lo exceeds hi')

        return cls(
            tuple(
                z
                for last in range(hi - 1, lo - 1, -1)
                for z in range(lo, last + 1)
            ),
        )

    @classmethod
    def random(
            cls,
            rng: np.random.Generator,
            k_max: int,
            lo: int,
            hi: int,
    ) -> 'TranspositionSeq':
        """Draw a sequence with uniform length and uniform bonds.

        :param rng: The generator.
        :param k_max: The largest length.
        :param lo: The smallest bond.
        :param hi: The largest bond.
        :return: The sequence.
        """
        if k_max < 1:
            raise ValueError('k_max must be positive')
        elif lo > hi:
            raise ValueError('lo exceeds hi')

        length = int(rng.integers(1, k_max, endpoint=True))

        return cls(tuple(rng.integers(lo, hi, length, endpoint=True).tolist()))


def apply_seq(
        config: ColorConfig,
        seq: TranspositionSeq,
        order: Order = Order.FORWARD,
) -> ColorConfig:
    """Compose swap operators.

    >>> identity = make_initial(ICKind.IDENTITY, -1, 1)
    >>> apply_seq(identity, TranspositionSeq((0,))).colors.tolist()
    [-1, 1, 0]

    :param config: The configuration.
    :param seq: The bonds.
    :param order: Whether the first or the last bond is applied first.
    :return: The resulting configuration.
    """
    if not config.is_bijection:
        raise ValueError('swaps of a bijection need distinct finite colors')

    bonds = seq.bonds if order is Order.FORWARD else seq.bonds[::-1]

    for z in bonds:
        config = apply_swap(config, z)

    return config


def check_symmetry_deterministic(seq: TranspositionSeq) -> bool:
    """Check ``W_{s_k} ... W_{s_1} id = inv(W_{s_1} ... W_{s_k} id)``.

    >>> check_symmetry_deterministic(TranspositionSeq((0, 1, 0, 2)))
    True

    :param seq: The bonds.
    :return: ``True`` iff both sides agree on the window of the bonds.
    """
    identity = make_initial(ICKind.IDENTITY, *seq.span)
    forward = apply_seq(identity, seq, Order.FORWARD)
    backward = apply_seq(identity, seq, Order.REVERSED)

    return forward == invert(backward)


@dataclass(frozen=True)
class SymmetryReport:
    """The class for the outcome of randomized symmetry checks."""

    COUNT: ClassVar[int] = 1000
    """The default number of sequences."""
    K_MAX: ClassVar[int] = 50
    """The default largest length."""
    BOND_RANGE: ClassVar[tuple[int, int]] = -20, 19
    """The default range of bonds."""
    seed: int
    """The seed of the sequence stream."""
    count: int
    """The number of checked sequences."""
    failures: int
    """The number of violations."""
    first_failure: TranspositionSeq | None = None
    """The first violating sequence, if any."""

    @property
    def passed(self) -> bool:
        return not self.failures


def check_symmetry_random(
        seed: int,
        count: int = SymmetryReport.COUNT,
        k_max: int = SymmetryReport.K_MAX,
        bond_range: tuple[int, int] = SymmetryReport.BOND_RANGE,
        check_reversed: bool = True,
) -> SymmetryReport:
    """Check the deterministic symmetry on random sequences.

    :param seed: The seed of the sequence stream.
    :param count: The number of sequences.
    :param k_max: The largest length.
    :param bond_range: The smallest and largest bonds.
    :param check_reversed: Whether each reversed sequence is checked too.
    :return: The report.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    failures = 0
    first_failure = None

    for _ in range(count):
        seq = TranspositionSeq.random(rng, k_max, *bond_range)
        candidates = (seq, seq.reversed()) if check_reversed else (seq,)

        for candidate in candidates:
            if not check_symmetry_deterministic(candidate):
                failures += 1

                if first_failure is None:
                    first_failure = candidate

    return SymmetryReport(seed, count, failures, first_failure)


def sample_gen_pair(
        seq: TranspositionSeq,
        t: float,
        field_pair: tuple[PoissonField, PoissonField],
) -> tuple[ColorConfig, ColorConfig]:
    """Sample the process sorted before and the inverse of the one after.

    The first output starts from the identity, applies the swaps in order and
    runs the dynamics for time ``t`` on the first field. The second runs the
    dynamics from the identity on the second field, applies the swaps in
    reversed order and is then inverted. Both have the same law.

    :param seq: The bonds.
    :param t: The time.
    :param field_pair: Two independent fields on one window.
    :return: The two configurations.
    """
    first_field, second_field = field_pair

    if first_field.window != second_field.window:
        raise ValueError('fields differ in window')
    elif t < 0:
        raise ValueError('negative time')

    identity = make_initial(ICKind.IDENTITY, *first_field.window)
    sorted_first = apply_seq(identity, seq, Order.FORWARD)
    evolved_second = identity

    if t > 0:
        sorted_first, _ = evolve(sorted_first, first_field, 0, t, record=False)
        evolved_second, _ = evolve(
            identity,
            second_field,
            0,
            t,
            record=False,
        )

    return sorted_first, invert(
        apply_seq(evolved_second, seq, Order.REVERSED),
    )
