"""This module implements the lattice configurations of multicolor TASEP.

A configuration assigns an integer color to every site of a finite window.
Holes carry the sentinel :data:`INF`, which compares greater than every
finite color, so the swap rule is a plain integer comparison.
"""

from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Final

import numpy as np
import numpy.typing as npt

INF: Final[int] = int(np.iinfo(np.int64).max)
"""The color of a hole."""
COLOR_DTYPE: Final = np.int64
"""The array type of colors."""

ColorArray = npt.NDArray[np.int64]


class Boundary(Enum):
    """The enum class for window edge conventions."""

    CLOSED = 'closed'
    """An inert wall; nothing crosses the edge."""
    EMPTY = 'empty'
    """Empty space; particles leaving through the edge are counted."""


@dataclass(frozen=True)
class PackedColor:
    """The class for an infinite reservoir of particles left of a window."""

    color: int = 1
    """The color of the reservoir particles."""

    def __post_init__(self) -> None:
        if self.color >= INF:
            raise ValueError('reservoir color must be finite')


LeftBoundary = PackedColor | Boundary


class ICKind(Enum):
    """The enum class for initial conditions."""

    STEP = 'step'
    """Sites at or left of ``y`` occupied by color 1, holes elsewhere."""
    ONE_SHOCK_SECOND_CLASS = 'one_shock_second_class'
    """One packed block right of the origin with a second class particle."""
    ONE_SHOCK_COLORED = 'one_shock_colored'
    """The colored variant of the one-shock configuration."""
    TWO_SHOCK_SECOND_CLASS = 'two_shock_second_class'
    """Two packed blocks with a second class particle at ``m``."""
    TWO_SHOCK_COLORED = 'two_shock_colored'
    """The colored variant of the two-shock configuration."""
    BERNOULLI = 'bernoulli'
    """Independent occupation with a given density."""
    IDENTITY = 'identity'
    """The identity bijection, color equal to site."""


@dataclass(frozen=True, eq=False)
class ColorConfig:
    """The class for colored configurations on a finite window.

    >>> config = make_initial(ICKind.STEP, -2, 2)
    >>> config.colors.tolist() == [1, 1, 1, INF, INF]
    True
    >>> count_particles(config, -1)
    2
    """

    window_lo: int
    """The leftmost site of the window."""
    colors: ColorArray
    """The colors of the sites ``window_lo`` through ``window_hi``."""
    left_boundary: LeftBoundary = Boundary.CLOSED
    """The convention left of the window."""
    right_boundary: Boundary = Boundary.CLOSED
    """The convention right of the window."""
    exited: tuple[int, ...] = ()
    """The colors that left through the right edge, in exit order."""
    absorbed: tuple[int, ...] = ()
    """The finite colors pushed into the left reservoir, in order."""

    def __post_init__(self) -> None:
        colors = np.array(self.colors, dtype=COLOR_DTYPE)

        if colors.ndim != 1 or not colors.size:
            raise ValueError('colors must be a nonempty sequence')
        elif self.left_boundary is Boundary.EMPTY:
            raise ValueError('left boundary is a reservoir or closed')
        elif not isinstance(self.right_boundary, Boundary):
            raise ValueError('right boundary is empty or closed')
        elif self.exited and self.right_boundary is not Boundary.EMPTY:
            raise ValueError('exits require an empty right boundary')
        elif self.absorbed and not isinstance(self.left_boundary, PackedColor):
            raise ValueError('absorption requires a reservoir')

        colors.setflags(write=False)
        object.__setattr__(self, 'colors', colors)
        object.__setattr__(self, 'exited', tuple(map(int, self.exited)))
        object.__setattr__(self, 'absorbed', tuple(map(int, self.absorbed)))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, ColorConfig):
            return NotImplemented

        return (
            self.window_lo == other.window_lo
            and np.array_equal(self.colors, other.colors)
            and self.left_boundary == other.left_boundary
            and self.right_boundary == other.right_boundary
            and self.exited == other.exited
            and self.absorbed == other.absorbed
        )

    def __hash__(self) -> int:
        return hash(self.key)

    def __len__(self) -> int:
        return int(self.colors.size)

    @property
    def key(self) -> tuple[Any, ...]:
        """Get a hashable summary of the dynamic state.

        :return: The window start, colors, sorted exited colors and sorted
                 absorbed colors.
        """
        return (
            self.window_lo,
            tuple(self.colors.tolist()),
            tuple(sorted(self.exited)),
            tuple(sorted(self.absorbed)),
        )

    @property
    def window_hi(self) -> int:
        return self.window_lo + len(self) - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.window_lo, self.window_hi

    @property
    def sites(self) -> npt.NDArray[np.int64]:
        return np.arange(self.window_lo, self.window_hi + 1)

    @property
    def is_bijection(self) -> bool:
        """Check whether all colors are finite and distinct.

        :return: ``True`` for bijection-mode configurations.
        """
        return bool(
            (self.colors < INF).all()
            and np.unique(self.colors).size == len(self),
        )

    def contains(self, z: int) -> bool:
        return self.window_lo <= z <= self.window_hi

    def index(self, z: int) -> int:
        """Get the array index of a site.

        :param z: The site.
        :return: The index into :attr:`colors`.
        """
        if not self.contains(z):
            raise ValueError(f'site {z} outside window {self.window}')

        return z - self.window_lo

    def color_at(self, z: int) -> int:
        return int(self.colors[self.index(z)])

    def occupancy(self, threshold: int = INF) -> npt.NDArray[np.bool_]:
        """Get the two-species projection of the window.

        :param threshold: Colors below it are particles.
        :return: The occupation variables.
        """
        return self.colors < threshold

    def with_colors(self, colors: npt.ArrayLike) -> 'ColorConfig':
        return replace(self, colors=np.asarray(colors, dtype=COLOR_DTYPE))


def make_initial(
        kind: ICKind,
        window_lo: int,
        window_hi: int,
        *,
        y: int = 0,
        m_plus: int | None = None,
        m_minus: int | None = None,
        m: int | None = None,
        n: int | None = None,
        density: float | None = None,
        rng: np.random.Generator | None = None,
        left_boundary: LeftBoundary | None = None,
        right_boundary: Boundary | None = None,
) -> ColorConfig:
    """Create an initial condition truncated to a window.

    Packed and shock initial conditions default to a color-1 reservoir on
    the left and empty space on the right; Bernoulli and identity initial
    conditions default to closed edges.

    >>> make_initial(
    ...     ICKind.ONE_SHOCK_SECOND_CLASS, -3, 3, m_plus=2, m_minus=1,
    ... ).colors.tolist()[:6]
    [1, 1, 9223372036854775807, 2, 1, 1]

    :param kind: The kind of initial condition.
    :param window_lo: The leftmost site.
    :param window_hi: The rightmost site.
    :param y: The step location of :attr:`ICKind.STEP`.
    :param m_plus: The right block length of one-shock conditions.
    :param m_minus: The left gap length of one-shock conditions.
    :param m: The middle block length of two-shock conditions.
    :param n: The right block length of two-shock conditions.
    :param density: The Bernoulli density.
    :param rng: The generator of Bernoulli occupations.
    :param left_boundary: An override of the left convention.
    :param right_boundary: An override of the right convention.
    :return: The configuration.
    """
    if window_lo > window_hi:
        raise ValueError('empty window')

    sites = np.arange(window_lo, window_hi + 1)
    colors = np.full(sites.size, INF, dtype=COLOR_DTYPE)
    left: LeftBoundary = PackedColor(1)
    right = Boundary.EMPTY

    match kind:
        case ICKind.STEP:
            if not window_lo <= y < window_hi:
                raise ValueError('step location not inside window')

            colors[sites <= y] = 1
        case ICKind.ONE_SHOCK_SECOND_CLASS | ICKind.ONE_SHOCK_COLORED:
            if m_plus is None or m_minus is None:
                raise ValueError('one-shock conditions need m_plus, m_minus')
            elif m_plus < 1 or m_minus < 1:
                raise ValueError('block lengths must be positive')
            elif window_lo > -m_minus - 1 or window_hi < m_plus + 1:
                raise ValueError('window too small for declared blocks')

            colors[sites < -m_minus] = 1

            if kind is ICKind.ONE_SHOCK_SECOND_CLASS:
                colors[(1 <= sites) & (sites <= m_plus)] = 1
                colors[sites == 0] = 2
            else:
                colors[(0 <= sites) & (sites <= m_plus)] = 2
        case ICKind.TWO_SHOCK_SECOND_CLASS | ICKind.TWO_SHOCK_COLORED:
            if m is None or n is None:
                raise ValueError('two-shock conditions need m, n')
            elif m < 1 or n < 1:
                raise ValueError('block lengths must be positive')
            elif window_lo > -m - n - 1 or window_hi < m + n + 1:
                raise ValueError('window too small for declared blocks')

            colors[sites < -m - n] = 1
            middle = (-m <= sites) & (sites <= -1)

            if kind is ICKind.TWO_SHOCK_SECOND_CLASS:
                colors[middle] = 1
                colors[(m + 1 <= sites) & (sites <= m + n)] = 1
                colors[sites == m] = 2
            else:
                colors[middle] = 2
                colors[(m <= sites) & (sites <= m + n)] = 3
        case ICKind.BERNOULLI:
            if density is None or not 0 < density < 1:
                raise ValueError('density not in (0, 1)')
            elif rng is None:
                raise ValueError('bernoulli conditions need a generator')

            colors[rng.random(sites.size) < density] = 1
            left = Boundary.CLOSED
            right = Boundary.CLOSED
        case ICKind.IDENTITY:
            colors = sites.astype(COLOR_DTYPE)
            left = Boundary.CLOSED
            right = Boundary.CLOSED
        case _:
            raise ValueError(f'unknown initial condition {kind}')

    return ColorConfig(
        window_lo,
        colors,
        left if left_boundary is None else left_boundary,
        right if right_boundary is None else right_boundary,
    )


def project(config: ColorConfig, threshold: int = INF) -> ColorConfig:
    """Project onto particles (colors below ``threshold``) and holes.

    Absorbed colors are dropped: in the projection a displacement either
    swaps two equal particles or fills a hole.

    :param config: The configuration.
    :param threshold: The smallest hole color.
    :return: The two-species configuration with particle color 1.
    """
    colors = np.where(config.occupancy(threshold), 1, INF)
    left = config.left_boundary

    if isinstance(left, PackedColor):
        left = PackedColor(1) if left.color < threshold else Boundary.CLOSED

    exited = tuple(1 for color in config.exited if color < threshold)

    return ColorConfig(
        config.window_lo,
        colors,
        left,
        config.right_boundary,
        exited,
    )


def _require_empty_right(config: ColorConfig) -> None:
    if config.right_boundary is not Boundary.EMPTY:
        raise ValueError('counts need an empty right boundary')


def count_particles(
        config: ColorConfig,
        x: int,
        threshold: int = INF,
) -> int:
    """Count the particles weakly right of ``x``, exits included.

    :param config: The configuration.
    :param x: The site.
    :param threshold: Colors below it are particles.
    :return: ``N(x)``.
    """
    _require_empty_right(config)

    if x < config.window_lo and isinstance(config.left_boundary, PackedColor):
        raise ValueError('count reaches into the reservoir')

    start = min(max(x - config.window_lo, 0), len(config))
    inside = int((config.colors[start:] < threshold).sum())

    return inside + sum(color < threshold for color in config.exited)


def count_colored(config: ColorConfig, c: int, x: int) -> int:
    """Count the particles of color ``c`` weakly right of ``x``.

    :param config: The configuration.
    :param c: The color.
    :param x: The site.
    :return: The colored count, exits included.
    """
    _require_empty_right(config)

    if (
            x < config.window_lo
            and isinstance(config.left_boundary, PackedColor)
            and config.left_boundary.color == c
    ):
        raise ValueError('count reaches into the reservoir')

    start = min(max(x - config.window_lo, 0), len(config))

    return int((config.colors[start:] == c).sum()) + Counter(config.exited)[c]


def second_class_position(config: ColorConfig, color: int = 2) -> int:
    """Locate the unique particle of the given color.

    A particle pushed into the reservoir is reported at ``window_lo - 1``
    and one that exited at ``window_hi + 1``.

    >>> config = ColorConfig(0, [1, 1], PackedColor(1), absorbed=(2,))
    >>> second_class_position(config)
    -1

    :param config: The configuration.
    :param color: The second class color.
    :return: Its site.
    """
    if color in config.absorbed:
        return config.window_lo - 1
    elif color in config.exited:
        return config.window_hi + 1

    (indices,) = np.nonzero(config.colors == color)

    if indices.size != 1:
        raise ValueError(f'{indices.size} particles of color {color}')

    return config.window_lo + int(indices[0])


def apply_swap(config: ColorConfig, z: int) -> ColorConfig:
    """Apply the totally asymmetric swap operator at bond ``(z, z + 1)``.

    >>> config = ColorConfig(0, [1, 2])
    >>> apply_swap(config, 0).colors.tolist()
    [2, 1]
    >>> apply_swap(apply_swap(config, 0), 0).colors.tolist()
    [2, 1]

    :param config: The configuration.
    :param z: The left site of the bond.
    :return: The swapped configuration when ``color(z) < color(z + 1)``.
    """
    if not (config.contains(z) and config.contains(z + 1)):
        raise ValueError(f'bond ({z}, {z + 1}) outside window')

    i = z - config.window_lo

    if config.colors[i] >= config.colors[i + 1]:
        return config

    colors = config.colors.copy()
    colors[i], colors[i + 1] = colors[i + 1], colors[i]

    return config.with_colors(colors)


def sort_descending(config: ColorConfig, lo: int, hi: int) -> ColorConfig:
    """Sort the colors of sites ``lo`` through ``hi`` in decreasing order.

    :param config: The configuration.
    :param lo: The leftmost sorted site.
    :param hi: The rightmost sorted site.
    :return: The sorted configuration.
    """
    if lo > hi:
        raise ValueError('lo exceeds hi')
    elif not (config.contains(lo) and config.contains(hi)):
        raise ValueError('sorted range outside window')

    start = lo - config.window_lo
    stop = hi - config.window_lo + 1
    colors = config.colors.copy()
    colors[start:stop] = np.sort(colors[start:stop])[::-1]

    return config.with_colors(colors)


def invert(config: ColorConfig) -> ColorConfig:
    """Invert a bijection-mode configuration.

    The bijection is the identity outside the window, so its inverse maps
    each window color back to the site holding it.

    >>> invert(ColorConfig(0, [2, 0, 1])).colors.tolist()
    [1, 2, 0]

    :param config: The configuration.
    :return: The inverse configuration.
    """
    offsets = config.colors - config.window_lo

    if not np.array_equal(np.sort(offsets), np.arange(len(config))):
        raise ValueError('colors are not a permutation of the window')

    inverse = np.empty(len(config), dtype=COLOR_DTYPE)
    inverse[offsets] = config.sites

    return config.with_colors(inverse)


def height_from_counts(config: ColorConfig, x: int) -> int:
    """Get ``h(x) = 2 N(x + 1) + x`` of a step-like configuration.

    :param config: The configuration.
    :param x: The site.
    :return: The height.
    """
    return 2 * count_particles(config, x + 1) + x


@dataclass(frozen=True, eq=False)
class HeightState:
    """The class for height profiles of the particle projection.

    The height changes by ``1 - 2 occupancy(z)`` from ``z - 1`` to ``z`` and
    its value at the anchor grows by two with every jump across the bond
    ``(anchor_site, anchor_site + 1)``.
    """

    window_lo: int
    """The leftmost site of the window."""
    occupancy: npt.NDArray[np.bool_]
    """The occupation variables of the window."""
    anchor_value: int
    """The height at the anchor when the jump counter was zero."""
    jump_counter: int = 0
    """The number of jumps across the anchor bond since then."""
    anchor_site: int = 0
    """The site of the anchor."""
    left_packed: bool = False
    """Whether sites left of the window are occupied."""
    right_empty: bool = False
    """Whether sites right of the window are empty."""

    def __post_init__(self) -> None:
        occupancy = np.array(self.occupancy, dtype=np.bool_)

        occupancy.setflags(write=False)
        object.__setattr__(self, 'occupancy', occupancy)

        if not (
                self.window_lo - 1
                <= self.anchor_site
                <= self.window_lo + occupancy.size - 1
        ):
            raise ValueError('anchor outside window')

    @classmethod
    def from_config(
            cls,
            config: ColorConfig,
            *,
            threshold: int = INF,
            anchor_value: int | None = None,
            anchor_site: int = 0,
    ) -> 'HeightState':
        """Create the height state of a configuration.

        Without an explicit anchor value, configurations with an empty right
        boundary use ``2 N(anchor + 1) + anchor`` and others use zero.

        :param config: The configuration.
        :param threshold: Colors below it are particles.
        :param anchor_value: The height at the anchor.
        :param anchor_site: The anchor.
        :return: The height state.
        """
        if anchor_value is None:
            if config.right_boundary is Boundary.EMPTY:
                anchor_value = 2 * count_particles(
                    config,
                    anchor_site + 1,
                    threshold,
                ) + anchor_site
            else:
                anchor_value = 0

        left = config.left_boundary

        return cls(
            config.window_lo,
            config.occupancy(threshold),
            anchor_value,
            0,
            anchor_site,
            isinstance(left, PackedColor) and left.color < threshold,
            config.right_boundary is Boundary.EMPTY,
        )

    def advance(
            self,
            occupancy: npt.NDArray[np.bool_],
            jumps: int,
    ) -> 'HeightState':
        """Get the state after further evolution.

        :param occupancy: The new occupation variables.
        :param jumps: The jumps across the anchor bond meanwhile.
        :return: The new height state.
        """
        if occupancy.shape != self.occupancy.shape:
            raise ValueError('occupancy shape changed')

        return replace(
            self,
            occupancy=occupancy,
            jump_counter=self.jump_counter + jumps,
        )

    @property
    def window_hi(self) -> int:
        return self.window_lo + int(self.occupancy.size) - 1

    def profile(self) -> npt.NDArray[np.int64]:
        """Get the heights of sites ``window_lo - 1`` through ``window_hi``.

        :return: The heights.
        """
        slopes = 1 - 2 * self.occupancy.astype(np.int64)
        partial = np.concatenate(([0], np.cumsum(slopes)))
        offset = (
            self.anchor_value
            + 2 * self.jump_counter
            - partial[self.anchor_site - self.window_lo + 1]
        )

        return partial + offset

    def heights(self, xs: npt.ArrayLike) -> npt.NDArray[np.int64]:
        """Get the heights of several sites.

        :param xs: The sites.
        :return: The heights.
        """
        sites = np.asarray(xs, dtype=np.int64)
        profile = self.profile()
        first = self.window_lo - 1
        clipped = np.clip(sites, first, self.window_hi)
        heights = profile[clipped - first]
        left = sites < first
        right = sites > self.window_hi

        if left.any() and not self.left_packed:
            raise ValueError('height left of window is undetermined')
        elif right.any() and not self.right_empty:
            raise ValueError('height right of window is undetermined')

        return heights + (clipped - sites) * left + (sites - clipped) * right

    def height(self, x: int) -> int:
        return int(self.heights([x])[0])
