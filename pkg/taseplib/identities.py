"""This module implements both sides of the exact shock identities.

The left-hand sides are read off direct simulations of the shock initial
conditions: the position of the second class particle and the colored
counting functions. The right-hand sides are functionals of the counting
function of a single step initial condition. Both sides are sampled with
independent replicas so that they can be compared as two samples. On small
windows with closed edges the identities hold exactly, and both sides are
computed there with :mod:`taseplib.oracle`.
"""

import csv
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import partial
from math import ceil
from pathlib import Path
from typing import Any, ClassVar, TypeVar
from warnings import warn

import numpy as np
import numpy.typing as npt

from taseplib.kinetics import (
    check_window,
    evolve,
    generate_field,
    margin_window,
    SPREAD_FACTOR,
)
from taseplib.lattice_core import (
    Boundary,
    ColorConfig,
    count_colored,
    ICKind,
    INF,
    make_initial,
    second_class_position,
)
from taseplib.oracle import exact_law
from taseplib.utilities import (
    binomial_sigma,
    EmpiricalDistribution,
    ks_band,
    ks_distance,
    ks_two_sample,
    total_variation,
    Verdict,
)

T = TypeVar('T')
Mapper = Callable[[Callable[[int], T], Iterable[int]], Iterable[T]]
IntArray = npt.NDArray[np.int64]

RHS_REPLICA_OFFSET = 1 << 31
"""The replica id offset separating right-hand from left-hand samples."""


def _grid_half_width(t: float) -> int:
    return ceil(6 * max(2 * t ** (1 / 3), 2))


def _validate_grid(x_grid: Sequence[int]) -> tuple[int, ...]:
    grid = tuple(map(int, x_grid))

    if not grid:
        raise ValueError('empty x_grid')
    elif any(first >= second for first, second in zip(grid, grid[1:])):
        raise ValueError('x_grid must be strictly increasing')

    return grid


def _holes(config: ColorConfig, lo: int, hi: int) -> int:
    start = max(lo - config.window_lo, 0)
    stop = max(hi - config.window_lo + 1, 0)

    return int((config.colors[start:stop] == INF).sum())


@dataclass(frozen=True)
class ShockSpec1:
    """The class for one-shock identity parameters.

    The packed block ``z < -m_minus`` is followed by a gap, the second class
    particle at the origin and a packed block of length ``m_plus``.
    """

    COLORS: ClassVar[tuple[int, ...]] = 1, 2
    """The colors of the colored initial condition."""
    m_plus: int
    """The length of the right block."""
    m_minus: int
    """The length of the gap left of the origin."""
    t: float
    """The time."""
    x_grid: tuple[int, ...]
    """The sites of the tail tables."""

    def __post_init__(self) -> None:
        if self.m_plus < 1 or self.m_minus < 1:
            raise ValueError('block lengths must be positive')
        elif self.t <= 0:
            raise ValueError('time must be positive')

        object.__setattr__(self, 'x_grid', _validate_grid(self.x_grid))

    @classmethod
    def with_default_grid(cls, m_plus: int, m_minus: int, t: float) -> (
            'ShockSpec1'
    ):
        """Create parameters with a grid around the hydrodynamic shock.

        :param m_plus: The length of the right block.
        :param m_minus: The length of the gap.
        :param t: The time.
        :return: The parameters.
        """
        total = m_plus + m_minus
        center = round((m_plus - m_minus) * (total - 2 * t) / (2 * total))
        half_width = _grid_half_width(t)

        return cls(
            m_plus,
            m_minus,
            t,
            tuple(range(center - half_width, center + half_width + 1)),
        )

    @property
    def block_span(self) -> tuple[int, int]:
        return -self.m_minus - 1, self.m_plus + 1

    @property
    def count_span(self) -> tuple[int, int]:
        """Get the sites where the step counting function is read.

        :return: The leftmost and rightmost sites.
        """
        return self.x_grid[0] - self.m_plus, self.x_grid[-1] + self.m_minus + 1

    def initial(self, kind: ICKind, window: tuple[int, int]) -> ColorConfig:
        return make_initial(
            kind,
            *window,
            m_plus=self.m_plus,
            m_minus=self.m_minus,
        )

    @property
    def second_class_kind(self) -> ICKind:
        return ICKind.ONE_SHOCK_SECOND_CLASS

    @property
    def colored_kind(self) -> ICKind:
        return ICKind.ONE_SHOCK_COLORED

    def rhs(
            self,
            counts: Callable[[IntArray], IntArray],
    ) -> tuple[npt.NDArray[np.bool_], IntArray]:
        """Evaluate the step functionals on the grid.

        :param counts: The step counting function.
        :return: The event per site and the joint vector per site.
        """
        xs = np.array(self.x_grid)
        far = counts(xs + self.m_minus + 1)
        difference = counts(xs - self.m_plus) - far
        events = difference >= self.m_plus + 1
        joint = np.stack(
            (far, np.minimum(difference, self.m_plus + 1)),
            axis=1,
        )

        return events, joint

    def closed_rhs(self, config: ColorConfig) -> (
            tuple[bool, tuple[int, int]]
    ):
        """Evaluate the step functionals of one site on a closed window.

        :param config: The evolved closed step whose particles started left
                       of the site.
        :return: The event and the joint vector at the site.
        """
        holes = _holes(config, -self.m_minus, self.m_plus)

        return holes > self.m_plus, (
            _holes(config, config.window_lo, -self.m_minus - 1),
            min(holes, self.m_plus + 1),
        )


@dataclass(frozen=True)
class ShockSpec2:
    """The class for two-shock identity parameters.

    Packed blocks occupy ``z < -m - n``, ``[-m, -1]`` and ``[m + 1, m + n]``
    with the second class particle at ``m``.
    """

    COLORS: ClassVar[tuple[int, ...]] = 1, 2, 3
    """The colors of the colored initial condition."""
    m: int
    """The length of the middle block."""
    n: int
    """The length of the right block and of the left gap."""
    t: float
    """The time."""
    x_grid: tuple[int, ...]
    """The sites of the tail tables."""

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError('block lengths must be positive')
        elif self.t <= 0:
            raise ValueError('time must be positive')

        object.__setattr__(self, 'x_grid', _validate_grid(self.x_grid))

    @classmethod
    def with_default_grid(cls, m: int, n: int, t: float) -> 'ShockSpec2':
        """Create parameters with a grid around the starting position.

        :param m: The length of the middle block.
        :param n: The length of the right block.
        :param t: The time.
        :return: The parameters.
        """
        half_width = _grid_half_width(t) + ceil(t / 2)

        return cls(m, n, t, tuple(range(m - half_width, m + half_width + 1)))

    @property
    def block_span(self) -> tuple[int, int]:
        return -self.m - self.n - 1, self.m + self.n + 1

    @property
    def count_span(self) -> tuple[int, int]:
        """Get the sites where the step counting function is read.

        :return: The leftmost and rightmost sites.
        """
        return (
            self.x_grid[0] - self.m - self.n,
            self.x_grid[-1] + self.m + self.n + 1,
        )

    def initial(self, kind: ICKind, window: tuple[int, int]) -> ColorConfig:
        return make_initial(kind, *window, m=self.m, n=self.n)

    @property
    def second_class_kind(self) -> ICKind:
        return ICKind.TWO_SHOCK_SECOND_CLASS

    @property
    def colored_kind(self) -> ICKind:
        return ICKind.TWO_SHOCK_COLORED

    def rhs(
            self,
            counts: Callable[[IntArray], IntArray],
    ) -> tuple[npt.NDArray[np.bool_], IntArray]:
        """Evaluate the step functionals on the grid.

        :param counts: The step counting function.
        :return: The event per site and the joint vector per site.
        """
        xs = np.array(self.x_grid)
        total = self.m + self.n
        near = counts(xs + 1)
        far = counts(xs + total + 1)
        value = (
            counts(xs - total)
            - near
            + np.maximum(0, near - far - self.m)
        )
        events = value >= self.n + 1
        joint = np.stack(
            (
                far,
                np.minimum(near - far, self.m),
                np.minimum(value, self.n + 1),
            ),
            axis=1,
        )

        return events, joint

    def closed_rhs(self, config: ColorConfig) -> (
            tuple[bool, tuple[int, int, int]]
    ):
        """Evaluate the step functionals of one site on a closed window.

        :param config: The evolved closed step whose particles started left
                       of the site.
        :return: The event and the joint vector at the site.
        """
        total = self.m + self.n
        gap = _holes(config, -total, -1)
        value = max(0, gap - self.m) + _holes(config, 0, total)

        return value > self.n, (
            _holes(config, config.window_lo, -total - 1),
            min(gap, self.m),
            min(value, self.n + 1),
        )


ShockSpec = ShockSpec1 | ShockSpec2


def observation_window(
        spec: ShockSpec,
        window_factor: float = SPREAD_FACTOR,
) -> tuple[int, int]:
    """Get the margin-rule window covering blocks and counts.

    :param spec: The identity parameters.
    :param window_factor: The speed bound of the margin rule.
    :return: The window.
    """
    block_lo, block_hi = spec.block_span
    count_lo, count_hi = spec.count_span

    return margin_window(
        spec.t,
        min(block_lo, count_lo),
        max(block_hi, count_hi),
        window_factor,
    )


def closed_step(window: tuple[int, int], x: int) -> ColorConfig:
    """Create the step on a closed window with its first hole at ``x``.

    >>> closed_step((-1, 1), 1).colors.tolist()[:2]
    [1, 1]

    :param window: The window.
    :param x: The first hole, from ``window_lo`` to ``window_hi + 1``.
    :return: The configuration.
    """
    lo, hi = window

    if not lo <= x <= hi + 1:
        raise ValueError('step site outside window')

    sites = np.arange(lo, hi + 1)

    return ColorConfig(lo, np.where(sites < x, 1, INF))


def closed_initial(
        spec: ShockSpec,
        kind: ICKind,
        window: tuple[int, int],
) -> ColorConfig:
    """Create a shock initial condition on a closed window.

    :param spec: The identity parameters.
    :param kind: The kind of shock initial condition.
    :param window: The window.
    :return: The configuration.
    """
    return ColorConfig(window[0], spec.initial(kind, window).colors)


def _run(
        spec: ShockSpec,
        kind: ICKind,
        seed: int,
        replica_id: int,
        window_factor: float,
        micro_window: tuple[int, int] | None,
) -> ColorConfig:
    if micro_window is not None:
        field_ = generate_field(seed, replica_id, micro_window, spec.t)
        config = closed_initial(spec, kind, micro_window)

        return evolve(config, field_, 0, spec.t, record=False)[0]

    window = observation_window(spec, window_factor)
    config = (
        make_initial(ICKind.STEP, *window)
        if kind is ICKind.STEP
        else spec.initial(kind, window)
    )
    field_ = generate_field(seed, replica_id, window, spec.t)
    config, log = evolve(config, field_, 0, spec.t, record=False)

    check_window(log)

    return config


def step_counts(config: ColorConfig, xs: npt.ArrayLike) -> IntArray:
    """Count the particles weakly right of several sites at once.

    :param config: A configuration with an empty right edge.
    :param xs: The sites, inside the window or right of it.
    :return: The counts, exits included.
    """
    if config.right_boundary is not Boundary.EMPTY:
        raise ValueError('counts need an empty right boundary')

    sites = np.asarray(xs, dtype=np.int64)

    if (sites < config.window_lo).any():
        raise ValueError('count site left of window')

    suffix = np.concatenate(
        (np.cumsum(config.occupancy()[::-1])[::-1], [0]),
    )
    indices = np.minimum(sites - config.window_lo, len(config))

    return suffix[indices] + sum(color < INF for color in config.exited)


def sample_second_class(
        spec: ShockSpec,
        seed: int,
        replica_id: int,
        window_factor: float = SPREAD_FACTOR,
        micro_window: tuple[int, int] | None = None,
) -> int:
    """Sample the position of the second class particle at time ``t``.

    :param spec: The identity parameters.
    :param seed: The seed.
    :param replica_id: The replica.
    :param window_factor: The speed bound of the margin rule.
    :param micro_window: A small closed window replacing the margin rule.
    :return: The position.
    """
    config = _run(
        spec,
        spec.second_class_kind,
        seed,
        replica_id,
        window_factor,
        micro_window,
    )

    return second_class_position(config)


def colored_counts(spec: ShockSpec, config: ColorConfig) -> IntArray:
    """Get the colored counting functions on the grid.

    On a closed right edge the counts stop at the window.

    :param spec: The identity parameters.
    :param config: A colored configuration.
    :return: The counts, one row per grid site and one column per color.
    """
    if config.right_boundary is Boundary.CLOSED:
        colors = np.array(spec.COLORS)
        starts = np.clip(
            np.array(spec.x_grid) - config.window_lo,
            0,
            len(config),
        )

        return np.array(
            [
                (config.colors[start:, None] == colors).sum(axis=0)
                for start in starts
            ],
            dtype=np.int64,
        )

    return np.array(
        [
            [count_colored(config, color, x) for color in spec.COLORS]
            for x in spec.x_grid
        ],
        dtype=np.int64,
    )


def sample_colored(
        spec: ShockSpec,
        seed: int,
        replica_id: int,
        window_factor: float = SPREAD_FACTOR,
        micro_window: tuple[int, int] | None = None,
) -> IntArray:
    """Sample the colored counting functions at time ``t``.

    :param spec: The identity parameters.
    :param seed: The seed.
    :param replica_id: The replica.
    :param window_factor: The speed bound of the margin rule.
    :param micro_window: A small closed window replacing the margin rule.
    :return: The counts, one row per grid site and one column per color.
    """
    config = _run(
        spec,
        spec.colored_kind,
        seed,
        replica_id,
        window_factor,
        micro_window,
    )

    return colored_counts(spec, config)


def sample_step(
        spec: ShockSpec,
        seed: int,
        replica_id: int,
        window_factor: float = SPREAD_FACTOR,
        micro_window: tuple[int, int] | None = None,
) -> tuple[npt.NDArray[np.bool_], IntArray]:
    """Sample the right-hand side functionals of one step evolution.

    On a micro window every grid site evolves its own closed step, all
    driven by the same clocks.

    :param spec: The identity parameters.
    :param seed: The seed.
    :param replica_id: The replica.
    :param window_factor: The speed bound of the margin rule.
    :param micro_window: A small closed window replacing the margin rule.
    :return: The event per grid site and the joint vector per grid site.
    """
    if micro_window is not None:
        field_ = generate_field(seed, replica_id, micro_window, spec.t)
        values = [
            spec.closed_rhs(
                evolve(
                    closed_step(micro_window, x),
                    field_,
                    0,
                    spec.t,
                    record=False,
                )[0],
            )
            for x in spec.x_grid
        ]

        return (
            np.array([event for event, _ in values]),
            np.array([joint for _, joint in values], dtype=np.int64),
        )

    config = _run(
        spec,
        ICKind.STEP,
        seed,
        replica_id,
        window_factor,
        micro_window,
    )

    return spec.rhs(partial(step_counts, config))


def _replicas(first: int, count: int) -> range:
    if count < 1:
        raise ValueError('replicas must be positive')

    return range(first, first + count)


def lhs_shock(
        spec: ShockSpec,
        replicas: int,
        seed: int,
        *,
        first_replica: int = 0,
        window_factor: float = SPREAD_FACTOR,
        micro_window: tuple[int, int] | None = None,
        mapper: Mapper[Any] = map,
) -> EmpiricalDistribution:
    """Sample the law of the second class particle position.

    :param spec: The identity parameters.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param first_replica: The first replica id.
    :param window_factor: The speed bound of the margin rule.
    :param micro_window: A small closed window replacing the margin rule.
    :param mapper: A ``map`` lookalike, possibly parallel.
    :return: The positions.
    """
    sampler = partial(
        sample_second_class,
        spec,
        seed,
        window_factor=window_factor,
        micro_window=micro_window,
    )

    return EmpiricalDistribution.from_values(
        mapper(sampler, _replicas(first_replica, replicas)),
    )


@dataclass(frozen=True, eq=False)
class RhsResult:
    """The class for right-hand side samples.

    The events form a family indexed by the grid; the pseudo-position of a
    replica is the largest grid site where its event holds, or the site left
    of the grid when none does.
    """

    x_grid: tuple[int, ...]
    """The grid."""
    events: npt.NDArray[np.bool_]
    """The events, one row per replica and one column per grid site."""
    joint: IntArray
    """The joint vectors, indexed by replica, grid site and component."""

    def __len__(self) -> int:
        return int(self.events.shape[0])

    @property
    def table(self) -> npt.NDArray[np.float64]:
        """Get the empirical probability of the event at each grid site.

        :return: The probabilities.
        """
        return np.asarray(self.events.mean(axis=0), dtype=np.float64)

    @property
    def pseudo_positions(self) -> EmpiricalDistribution:
        """Get the law of the pseudo-position.

        :return: The pseudo-positions.
        """
        grid = np.array(self.x_grid)
        reversed_events = self.events[:, ::-1]
        last = grid.size - 1 - np.argmax(reversed_events, axis=1)
        positions = np.where(
            reversed_events.any(axis=1),
            grid[last],
            grid[0] - 1,
        )

        return EmpiricalDistribution(positions)

    @property
    def violations(self) -> int:
        """Count the replicas whose event is not monotone in ``x``.

        :return: The number of replicas with a false event left of a true one.
        """
        increasing = np.diff(self.events.astype(np.int8), axis=1) > 0

        return int(increasing.any(axis=1).sum())


def rhs_shock(
        spec: ShockSpec,
        replicas: int,
        seed: int,
        *,
        first_replica: int = RHS_REPLICA_OFFSET,
        window_factor: float = SPREAD_FACTOR,
        micro_window: tuple[int, int] | None = None,
        mapper: Mapper[Any] = map,
) -> RhsResult:
    """Sample the step functionals of the right-hand side.

    :param spec: The identity parameters.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param first_replica: The first replica id.
    :param window_factor: The speed bound of the margin rule.
    :param micro_window: A small closed window replacing the margin rule.
    :param mapper: A ``map`` lookalike, possibly parallel.
    :return: The samples.
    """
    sampler = partial(
        sample_step,
        spec,
        seed,
        window_factor=window_factor,
        micro_window=micro_window,
    )
    samples = list(mapper(sampler, _replicas(first_replica, replicas)))
    result = RhsResult(
        spec.x_grid,
        np.array([events for events, _ in samples]),
        np.array([joint for _, joint in samples]),
    )

    if result.violations:
        warn(
            (
                f'{result.violations} of {replicas} replicas have an event'
                ' that is not monotone in x'
            ),
        )

    return result


@dataclass(frozen=True, eq=False)
class JointResult:
    """The class for paired colored counts and step functionals."""

    x_grid: tuple[int, ...]
    """The grid."""
    lhs: IntArray
    """The colored counts, indexed by replica, grid site and color."""
    rhs: IntArray
    """The step functionals, indexed by replica, grid site and component."""

    def verdicts(self, level: float = 0.01) -> list[Verdict]:
        """Compare the marginals and the sums at every grid site.

        The band is the asymptotic two-sample KS band at a level divided by
        the number of comparisons.

        :param level: The family-wise significance level.
        :return: The verdicts.
        """
        components = self.lhs.shape[2]
        comparisons = len(self.x_grid) * (components + 1)
        band = ks_band(
            self.lhs.shape[0],
            self.rhs.shape[0],
            level / comparisons,
        )
        verdicts = []

        for i, x in enumerate(self.x_grid):
            for k in range(components + 1):
                if k < components:
                    first = self.lhs[:, i, k]
                    second = self.rhs[:, i, k]
                    label = f'component_{k + 1}'
                else:
                    first = self.lhs[:, i].sum(axis=1)
                    second = self.rhs[:, i].sum(axis=1)
                    label = 'sum'

                distance = ks_distance(
                    EmpiricalDistribution(first),
                    EmpiricalDistribution(second),
                )

                verdicts.append(
                    Verdict(
                        f'joint_{label}_x{x}',
                        distance,
                        band,
                        distance <= band,
                    ),
                )

        return verdicts


def joint_shock(
        spec: ShockSpec,
        replicas: int,
        seed: int,
        *,
        first_replica: int = 0,
        window_factor: float = SPREAD_FACTOR,
        micro_window: tuple[int, int] | None = None,
        mapper: Mapper[Any] = map,
) -> JointResult:
    """Sample the colored counts and the joint step functionals.

    :param spec: The identity parameters.
    :param replicas: The number of replicas on each side.
    :param seed: The seed.
    :param first_replica: The first replica id of the colored side.
    :param window_factor: The speed bound of the margin rule.
    :param micro_window: A small closed window replacing the margin rule.
    :param mapper: A ``map`` lookalike, possibly parallel.
    :return: The paired samples.
    """
    colored = partial(
        sample_colored,
        spec,
        seed,
        window_factor=window_factor,
        micro_window=micro_window,
    )
    lhs = np.array(list(mapper(colored, _replicas(first_replica, replicas))))
    rhs = rhs_shock(
        spec,
        replicas,
        seed,
        first_replica=first_replica + RHS_REPLICA_OFFSET,
        window_factor=window_factor,
        micro_window=micro_window,
        mapper=mapper,
    )

    return JointResult(spec.x_grid, lhs, rhs.joint)


def _require(spec: ShockSpec, kind: type) -> None:
    if not isinstance(spec, kind):
        raise ValueError(f'expected {kind.__name__}')


def lhs_shock1(spec: ShockSpec1, replicas: int, seed: int, **kwargs: Any) -> (
        EmpiricalDistribution
):
    """Sample the one-shock second class particle.

    :param spec: The one-shock parameters.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param kwargs: The options of :func:`lhs_shock`.
    :return: The positions.
    """
    _require(spec, ShockSpec1)

    return lhs_shock(spec, replicas, seed, **kwargs)


def rhs_shock1(spec: ShockSpec1, replicas: int, seed: int, **kwargs: Any) -> (
        RhsResult
):
    """Sample the one-shock step functionals.

    :param spec: The one-shock parameters.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param kwargs: The options of :func:`rhs_shock`.
    :return: The samples.
    """
    _require(spec, ShockSpec1)

    return rhs_shock(spec, replicas, seed, **kwargs)


def joint_shock1(
        spec: ShockSpec1,
        replicas: int,
        seed: int,
        **kwargs: Any,
) -> JointResult:
    """Sample both sides of the one-shock joint identity.

    :param spec: The one-shock parameters.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param kwargs: The options of :func:`joint_shock`.
    :return: The paired samples.
    """
    _require(spec, ShockSpec1)

    return joint_shock(spec, replicas, seed, **kwargs)


def lhs_shock2(spec: ShockSpec2, replicas: int, seed: int, **kwargs: Any) -> (
        EmpiricalDistribution
):
    """Sample the two-shock second class particle.

    :param spec: The two-shock parameters.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param kwargs: The options of :func:`lhs_shock`.
    :return: The positions.
    """
    _require(spec, ShockSpec2)

    return lhs_shock(spec, replicas, seed, **kwargs)


def rhs_shock2(spec: ShockSpec2, replicas: int, seed: int, **kwargs: Any) -> (
        RhsResult
):
    """Sample the two-shock step functionals.

    :param spec: The two-shock parameters.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param kwargs: The options of :func:`rhs_shock`.
    :return: The samples.
    """
    _require(spec, ShockSpec2)

    return rhs_shock(spec, replicas, seed, **kwargs)


def joint_shock2(
        spec: ShockSpec2,
        replicas: int,
        seed: int,
        **kwargs: Any,
) -> JointResult:
    """Sample both sides of the two-shock joint identity.

    :param spec: The two-shock parameters.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param kwargs: The options of :func:`joint_shock`.
    :return: The paired samples.
    """
    _require(spec, ShockSpec2)

    return joint_shock(spec, replicas, seed, **kwargs)


@dataclass(frozen=True, eq=False)
class IdentityReport:
    """The class for the comparison of left and right tail tables."""

    CSV_HEADER: ClassVar[tuple[str, ...]] = (
        'x',
        'lhs_prob',
        'rhs_prob',
        'lhs_n',
        'rhs_n',
    )
    """The columns of :meth:`write_csv`."""
    x_grid: tuple[int, ...]
    """The grid."""
    lhs_prob: npt.NDArray[np.float64]
    """The left tail probabilities ``P(f >= x)``."""
    rhs_prob: npt.NDArray[np.float64]
    """The right event probabilities."""
    lhs_n: int
    """The left sample size."""
    rhs_n: int
    """The right sample size."""
    violations: int = 0
    """The replicas with an event not monotone in ``x``."""
    verdicts: list[Verdict] = field(default_factory=list)
    """The test outcomes."""

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)

    def rows(self) -> Iterator[tuple[int, float, float, int, int]]:
        for x, lhs, rhs in zip(self.x_grid, self.lhs_prob, self.rhs_prob):
            yield x, float(lhs), float(rhs), self.lhs_n, self.rhs_n

    def write_csv(self, path: str | Path) -> None:
        """Write the tail tables.

        :param path: The destination file.
        :return: ``None``.
        """
        with open(path, 'w', newline='') as file:
            writer = csv.writer(file)

            writer.writerow(self.CSV_HEADER)
            writer.writerows(self.rows())


def compare_tables(
        lhs: EmpiricalDistribution,
        rhs: RhsResult,
        level: float = 0.01,
        rng: np.random.Generator | None = None,
        resamples: int = 1000,
) -> IdentityReport:
    """Compare the left tail table with the right event table.

    Each grid site gets a binomial three sigma band. The largest difference
    is checked against the two-sample KS band and, given a generator, the
    pseudo-positions are checked against the clipped left samples with the
    permutation band.

    :param lhs: The second class particle positions.
    :param rhs: The right-hand side samples.
    :param level: The significance level of the KS bands.
    :param rng: The generator of the permutation test.
    :param resamples: The number of permutations.
    :return: The report.
    """
    grid = np.array(rhs.x_grid)
    lhs_prob = lhs.tail(grid)
    rhs_prob = rhs.table
    lhs_n = len(lhs)
    rhs_n = len(rhs)
    verdicts = []

    for x, first, second in zip(rhs.x_grid, lhs_prob, rhs_prob):
        pooled = (first * lhs_n + second * rhs_n) / (lhs_n + rhs_n)
        sigma = np.hypot(
            binomial_sigma(pooled, lhs_n),
            binomial_sigma(pooled, rhs_n),
        )
        difference = abs(float(first - second))

        verdicts.append(
            Verdict(
                f'tail_x{x}',
                difference,
                3 * float(sigma),
                difference <= 3 * sigma,
            ),
        )

    distance = float(np.abs(lhs_prob - rhs_prob).max())
    band = ks_band(lhs_n, rhs_n, level)

    verdicts.append(Verdict('tail_sup', distance, band, distance <= band))

    if rng is not None:
        clipped = lhs.map(
            lambda samples: np.clip(samples, grid[0] - 1, grid[-1]),
        )

        verdicts.append(
            ks_two_sample(
                clipped,
                rhs.pseudo_positions,
                rng,
                resamples,
                level,
                'pseudo_position',
            ),
        )

    return IdentityReport(
        rhs.x_grid,
        lhs_prob,
        rhs_prob,
        lhs_n,
        rhs_n,
        rhs.violations,
        verdicts,
    )


@dataclass(frozen=True, eq=False)
class ExactIdentity:
    """The class for exact laws of both sides on a micro window."""

    TOLERANCE: ClassVar[float] = 1e-3
    """The largest accepted discrepancy."""
    x_grid: tuple[int, ...]
    """The grid."""
    lhs_tail: npt.NDArray[np.float64]
    """The exact ``P(f >= x)``."""
    rhs_tail: npt.NDArray[np.float64]
    """The exact right event probabilities."""
    lhs_joint: list[dict[tuple[int, ...], float]]
    """The exact colored count laws per grid site."""
    rhs_joint: list[dict[tuple[int, ...], float]]
    """The exact step functional laws per grid site."""
    second_class_law: dict[int, float]
    """The exact law of the second class particle."""

    @property
    def tail_distance(self) -> float:
        return float(np.abs(self.lhs_tail - self.rhs_tail).max())

    @property
    def joint_distance(self) -> float:
        """Get the largest total variation of the joint laws over the grid.

        :return: The distance.
        """
        return max(
            total_variation(first, second)
            for first, second in zip(self.lhs_joint, self.rhs_joint)
        )

    @property
    def passed(self) -> bool:
        return max(self.tail_distance, self.joint_distance) < self.TOLERANCE


def _marginals(
        law: dict[Any, float],
        size: int,
) -> list[dict[tuple[int, ...], float]]:
    marginals: list[dict[tuple[int, ...], float]] = [{} for _ in range(size)]

    for value, mass in law.items():
        for i, entry in enumerate(value):
            marginals[i][entry] = marginals[i].get(entry, 0.0) + mass

    return marginals


def exact_shock(
        spec: ShockSpec,
        micro_window: tuple[int, int],
        tol: float = 1e-9,
) -> ExactIdentity:
    """Compute both sides exactly on a closed micro window.

    With both edges closed the identities hold exactly on the window. The
    left-hand sides evolve the closed shock initial conditions and the
    right-hand side at a grid site ``x`` evolves the closed step whose first
    hole is at ``x``.

    :param spec: The identity parameters.
    :param micro_window: The window.
    :param tol: The truncation error of the oracle.
    :return: The exact laws.
    """
    grid = np.array(spec.x_grid)
    second_class = exact_law(
        closed_initial(spec, spec.second_class_kind, micro_window),
        spec.t,
        second_class_position,
        tol=tol,
    )
    lhs_tail = np.array(
        [
            sum(
                mass
                for position, mass in second_class.items()
                if isinstance(position, int) and position >= x
            )
            for x in grid
        ],
    )

    def colored(config: ColorConfig) -> tuple[tuple[int, ...], ...]:
        return tuple(map(tuple, colored_counts(spec, config).tolist()))

    colored_law = exact_law(
        closed_initial(spec, spec.colored_kind, micro_window),
        spec.t,
        colored,
        tol=tol,
    )
    rhs_tail = np.zeros(grid.size)
    rhs_joint: list[dict[tuple[int, ...], float]] = []

    for i, x in enumerate(spec.x_grid):
        step_law = exact_law(
            closed_step(micro_window, x),
            spec.t,
            spec.closed_rhs,
            tol=tol,
        )
        marginal: dict[tuple[int, ...], float] = {}

        for (event, joint), mass in step_law.items():  # type: ignore[misc]
            rhs_tail[i] += event * mass
            marginal[joint] = marginal.get(joint, 0.0) + mass

        rhs_joint.append(marginal)

    return ExactIdentity(
        spec.x_grid,
        lhs_tail,
        rhs_tail,
        _marginals(colored_law, grid.size),
        rhs_joint,
        {
            int(position): mass  # type: ignore[call-overload]
            for position, mass in second_class.items()
        },
    )


def exact_shock1(
        spec: ShockSpec1,
        micro_window: tuple[int, int],
        **kwargs: Any,
) -> ExactIdentity:
    """Compute both one-shock sides exactly.

    :param spec: The one-shock parameters.
    :param micro_window: The window.
    :param kwargs: The options of :func:`exact_shock`.
    :return: The exact laws.
    """
    _require(spec, ShockSpec1)

    return exact_shock(spec, micro_window, **kwargs)


def exact_shock2(
        spec: ShockSpec2,
        micro_window: tuple[int, int],
        **kwargs: Any,
) -> ExactIdentity:
    """Compute both two-shock sides exactly.

    :param spec: The two-shock parameters.
    :param micro_window: The window.
    :param kwargs: The options of :func:`exact_shock`.
    :return: The exact laws.
    """
    _require(spec, ShockSpec2)

    return exact_shock(spec, micro_window, **kwargs)
