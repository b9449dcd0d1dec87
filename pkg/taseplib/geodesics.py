"""This module implements backwards paths of the TASEP height function.

Starting at ``(x, t)`` the path runs backwards in time and moves only at
non-growth events at its current site: one step right on a descending
stretch or a local maximum, one step left on an ascending one. Along the
path the height splits exactly into an intermediate height plus a step
increment.
"""

import csv
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from math import ceil, log
from pathlib import Path
from typing import Any, ClassVar, TypeVar

import numpy as np
import numpy.typing as npt
from numba import njit

from taseplib.kinetics import (
    auxiliary_generator,
    Checkpoint,
    check_window,
    EventClass,
    evolve,
    generate_field,
    margin_window,
    PoissonField,
    replay_step_from,
    SPREAD_FACTOR,
    TrajectoryLog,
)
from taseplib.lattice_core import (
    ColorConfig,
    HeightState,
    ICKind,
    make_initial,
)
from taseplib.utilities import linear_fit, LinearFit

T = TypeVar('T')
Mapper = Callable[[Callable[[int], T], Iterable[int]], Iterable[T]]

_LOCAL_MAX = int(EventClass.LOCAL_MAX)
_SUPPRESSED_ASC = int(EventClass.SUPPRESSED_ASC)
_SUPPRESSED_DESC = int(EventClass.SUPPRESSED_DESC)
BERNOULLI_PURPOSE = 1
"""The auxiliary stream tag of Bernoulli initial conditions."""


class QuietIntervalError(RuntimeError):
    """No event-free interval near time zero was found."""


class PathVariant(Enum):
    """The enum class for the designated backwards geodesics."""

    CANONICAL = 'canonical'
    """The path driven by the realized non-growth events."""
    ORIGIN = 'origin'
    """The canonical path redirected to the origin near time zero."""


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """The class for piecewise constant backwards paths.

    The jump at time ``jump_times[k]`` takes the path to ``jump_sites[k]``
    for the times just before it; at the jump time itself the path is still
    at its previous site.

    >>> path = GeodesicPath(0, 4.0, [2.0], [1])
    >>> path.position(3.0), path.position(2.0), path.position(1.0)
    (0, 0, 1)
    """

    end_site: int
    """The site at the end time."""
    end_time: float
    """The end time."""
    jump_times: npt.NDArray[np.float64] = field(
        default_factory=lambda: np.zeros(0),
    )
    """The jump times in decreasing order."""
    jump_sites: npt.NDArray[np.int64] = field(
        default_factory=lambda: np.zeros(0, np.int64),
    )
    """The site entered, backwards in time, at each jump."""

    def __post_init__(self) -> None:
        times = np.array(self.jump_times, dtype=np.float64)
        sites = np.array(self.jump_sites, dtype=np.int64)
        steps = np.diff(np.concatenate(([self.end_site], sites)))

        if times.shape != sites.shape or times.ndim != 1:
            raise ValueError('jump times and sites differ in shape')
        elif (np.diff(times) >= 0).any():
            raise ValueError('jump times must be strictly decreasing')
        elif times.size and not 0 <= times[-1] <= times[0] <= self.end_time:
            raise ValueError('jump times not within [0, end_time]')
        elif (np.abs(steps) != 1).any():
            raise ValueError('consecutive sites must differ by one')

        times.setflags(write=False)
        sites.setflags(write=False)
        object.__setattr__(self, 'jump_times', times)
        object.__setattr__(self, 'jump_sites', sites)

    def __len__(self) -> int:
        return int(self.jump_times.size)

    @property
    def jumps(self) -> list[tuple[float, int]]:
        return list(zip(self.jump_times.tolist(), self.jump_sites.tolist()))

    @property
    def origin_site(self) -> int:
        return int(self.jump_sites[-1]) if len(self) else self.end_site

    def positions(self, taus: npt.ArrayLike) -> npt.NDArray[np.int64]:
        """Evaluate the path at several times.

        :param taus: The times in ``[0, end_time]``.
        :return: The sites.
        """
        times = np.asarray(taus, dtype=np.float64)

        if ((times < 0) | (times > self.end_time)).any():
            raise ValueError('times not within [0, end_time]')

        ascending_times = self.jump_times[::-1]
        ascending_sites = np.append(self.jump_sites[::-1], self.end_site)
        indices = np.searchsorted(ascending_times, times, side='right')

        return ascending_sites[indices]

    def position(self, tau: float) -> int:
        return int(self.positions([tau])[0])

    def breakpoints(self) -> npt.NDArray[np.float64]:
        """Get zero, the jump times and the end time in increasing order.

        :return: The times delimiting the constant pieces.
        """
        return np.concatenate(([0.0], self.jump_times[::-1], [self.end_time]))

    def max_deviation(self, slope: float, offset: float = 0.0) -> float:
        """Get the largest distance to the line ``offset + slope * tau``.

        The path is constant between breakpoints, so the supremum is attained
        at the ends of its pieces.

        :param slope: The slope of the line.
        :param offset: The value of the line at time zero.
        :return: The supremum over ``[0, end_time]``.
        """
        breakpoints = self.breakpoints()
        sites = self.positions(breakpoints[:-1])
        starts = np.abs(sites - offset - slope * breakpoints[:-1])
        ends = np.abs(sites - offset - slope * breakpoints[1:])

        return float(max(starts.max(), ends.max()))


@njit(cache=True)  # type: ignore[misc]
def _scan(
        times: npt.NDArray[np.float64],
        sites: npt.NDArray[np.int32],
        classes: npt.NDArray[np.uint8],
        x_end: int,
        t: float,
        jump_times: npt.NDArray[np.float64],
        jump_sites: npt.NDArray[np.int64],
) -> int:
    position = x_end
    count = 0

    for k in range(times.size - 1, -1, -1):
        if times[k] > t or sites[k] != position:
            continue

        if classes[k] == _SUPPRESSED_DESC or classes[k] == _LOCAL_MAX:
            position += 1
        elif classes[k] == _SUPPRESSED_ASC:
            position -= 1
        else:
            continue

        jump_times[count] = times[k]
        jump_sites[count] = position
        count += 1

    return count


def backward_path(log: TrajectoryLog, x_end: int, t: float) -> GeodesicPath:
    """Trace the backwards path from ``(x_end, t)`` to time zero.

    :param log: A log covering ``[0, t]``.
    :param x_end: The end site.
    :param t: The end time.
    :return: The path.
    """
    if not log.covers(t):
        raise ValueError(f'log ({log.t_from}, {log.t_to}] does not cover t')

    events = log.events
    times = np.ascontiguousarray(events['time'])
    jump_times = np.empty(times.size)
    jump_sites = np.empty(times.size, np.int64)
    count = _scan(
        times,
        np.ascontiguousarray(events['site']),
        np.ascontiguousarray(events['event_class']),
        x_end,
        t,
        jump_times,
        jump_sites,
    )

    return GeodesicPath(x_end, t, jump_times[:count], jump_sites[:count])


def canonicalize_to_origin(
        path: GeodesicPath,
        log: TrajectoryLog,
) -> GeodesicPath:
    """Redirect a path of a step evolution to the origin near time zero.

    The path is replaced on a quiet interval ``[0, epsilon]``, free of
    logged events between its origin and site zero and of its own jumps, by
    a staircase from site zero to its origin.

    :param path: A path of a step initial condition from the origin.
    :param log: The log of the evolution.
    :return: The redirected path.
    """
    origin = path.origin_site

    if not origin:
        return path

    lo, hi = sorted((origin, 0))
    events = log.events
    sites = events['site']
    nearby = events['time'][(lo - 1 <= sites) & (sites <= hi)]
    limits = [path.end_time]

    if nearby.size:
        limits.append(float(nearby.min()))

    if len(path):
        limits.append(float(path.jump_times[-1]))

    epsilon = min(limits) / 2

    if not epsilon > 0:
        raise QuietIntervalError('no quiet interval near time zero')

    steps = abs(origin)
    sign = 1 if origin > 0 else -1
    stair_times = np.arange(steps, 0, -1) * (epsilon / steps)
    stair_sites = sign * np.arange(steps - 1, -1, -1)

    return GeodesicPath(
        path.end_site,
        path.end_time,
        np.concatenate((path.jump_times, stair_times)),
        np.concatenate((path.jump_sites, stair_sites)),
    )


def paths_intersect(first: GeodesicPath, second: GeodesicPath) -> bool:
    """Check whether two paths share a space-time point.

    Both paths are constant between the merged breakpoints, so comparing
    them at the middle of every merged piece suffices.

    :param first: The first path.
    :param second: The second path.
    :return: The intersection indicator.
    """
    end_time = min(first.end_time, second.end_time)
    breakpoints = np.union1d(first.breakpoints(), second.breakpoints())
    breakpoints = breakpoints[breakpoints <= end_time]

    if breakpoints.size < 2:
        breakpoints = np.array([0.0, end_time])

    middles = (breakpoints[:-1] + breakpoints[1:]) / 2
    middles = np.append(middles, end_time)

    return bool(
        (first.positions(middles) == second.positions(middles)).any(),
    )


def evolve_with_heights(
        config: ColorConfig,
        field_: PoissonField,
        t: float,
        taus: Sequence[float] = (),
) -> tuple[TrajectoryLog, dict[float, HeightState]]:
    """Evolve a configuration and keep its height at checkpoint times.

    :param config: The initial configuration.
    :param field_: The clocks.
    :param t: The end time.
    :param taus: The checkpoint times in (0, t].
    :return: The log and the heights keyed by time, with 0 and ``t``.
    """
    initial = HeightState.from_config(config)
    heights = {0.0: initial}

    def observe(
            time: float,
            _: ColorConfig,
            height: HeightState | None,
    ) -> None:
        assert height is not None

        heights[time] = height

    observers = [Checkpoint(tau, observe) for tau in taus if 0 < tau <= t]
    _, log = evolve(config, field_, 0, t, observers, height=initial)

    assert log.height is not None

    heights[t] = log.height

    return log, heights


@dataclass(frozen=True)
class ConcatenationRow:
    """The class for the split of the height at one intermediate time."""

    tau: float
    """The intermediate time."""
    y: int
    """The path position at ``tau``."""
    height: int
    """The height at the end point."""
    intermediate: int
    """The height at ``(y, tau)``."""
    increment: int
    """The step increment from ``(y, tau)`` to the end point."""

    @property
    def equal(self) -> bool:
        return self.height == self.intermediate + self.increment


@dataclass(frozen=True)
class ConcatenationReport:
    """The class for the outcome of a concatenation check."""

    variant: PathVariant
    """The path used."""
    rows: list[ConcatenationRow]
    """The splits along the path."""
    inequality_checks: int = 0
    """The number of other intermediate sites checked."""
    inequality_violations: int = 0
    """The checks where the height exceeded the split."""
    strict: int = 0
    """The checks where the height was strictly below the split."""

    @property
    def passed(self) -> bool:
        return (
            all(row.equal for row in self.rows)
            and not self.inequality_violations
        )


def check_concatenation(
        field_: PoissonField,
        config: ColorConfig,
        x_end: int,
        t: float,
        taus: Sequence[float],
        other_ys: Sequence[int] = (),
        variant: PathVariant = PathVariant.CANONICAL,
) -> ConcatenationReport:
    """Check the exact split of the height along the backwards path.

    :param field_: The clocks.
    :param config: The initial configuration.
    :param x_end: The end site.
    :param t: The end time.
    :param taus: The intermediate times in ``[0, t]``.
    :param other_ys: Further intermediate sites for the inequality.
    :param variant: The path used.
    :return: The report.
    """
    if any(not 0 <= tau <= t for tau in taus):
        raise ValueError('intermediate times not within [0, t]')

    log, heights = evolve_with_heights(config, field_, t, taus)
    path = backward_path(log, x_end, t)

    if variant is PathVariant.ORIGIN:
        path = canonicalize_to_origin(path, log)

    height = heights[t].height(x_end)
    rows = []
    checks = 0
    violations = 0
    strict = 0

    for tau in taus:
        y = path.position(tau)

        rows.append(
            ConcatenationRow(
                tau,
                y,
                height,
                heights[tau].height(y),
                replay_step_from(field_, y, tau, t).height(x_end),
            ),
        )

        for other in other_ys:
            split = (
                heights[tau].height(other)
                + replay_step_from(field_, other, tau, t).height(x_end)
            )
            checks += 1
            violations += height > split
            strict += height < split

    return ConcatenationReport(variant, rows, checks, violations, strict)


@dataclass(frozen=True)
class ComparisonReport:
    """The class for the outcome of a comparison check."""

    increment_first: int
    """The increment ``h_1(y, t) - h_1(x, t)``."""
    increment_second: int
    """The increment ``h_2(y, t) - h_2(x, t)``."""
    lower_intersection: bool
    """Whether the first path from ``x`` meets the second from ``y``."""
    upper_intersection: bool
    """Whether the first path from ``y`` meets the second from ``x``."""

    @property
    def violations(self) -> int:
        """Count the violated inequalities.

        :return: The number of intersection events whose inequality fails.
        """
        return (
            int(
                self.lower_intersection
                and self.increment_second < self.increment_first,
            )
            + int(
                self.upper_intersection
                and self.increment_second > self.increment_first,
            )
        )

    @property
    def passed(self) -> bool:
        return not self.violations


def check_comparison(
        field_: PoissonField,
        config1: ColorConfig,
        config2: ColorConfig,
        x: int,
        y: int,
        t: float,
) -> ComparisonReport:
    """Compare the increments of two coupled heights through their paths.

    :param field_: The clocks driving both configurations.
    :param config1: The first initial configuration.
    :param config2: The second initial configuration.
    :param x: The left end site.
    :param y: The right end site.
    :param t: The end time.
    :return: The report.
    """
    if x >= y:
        raise ValueError('x must be smaller than y')

    first_log, first_heights = evolve_with_heights(config1, field_, t)
    second_log, second_heights = evolve_with_heights(config2, field_, t)
    first = first_heights[t]
    second = second_heights[t]

    return ComparisonReport(
        first.height(y) - first.height(x),
        second.height(y) - second.height(x),
        paths_intersect(
            backward_path(first_log, x, t),
            backward_path(second_log, y, t),
        ),
        paths_intersect(
            backward_path(first_log, y, t),
            backward_path(second_log, x, t),
        ),
    )


@dataclass(frozen=True)
class TailRow:
    """The class for one row of an empirical tail table."""

    u: float
    """The threshold."""
    n: int
    """The number of replicas."""
    count: int
    """The number of exceedances."""

    @property
    def phat(self) -> float:
        return self.count / self.n

    @property
    def log_phat(self) -> float:
        return log(self.phat) if self.count else float('nan')


@dataclass(frozen=True)
class TailTable:
    """The class for empirical tails with a Gaussian-exponent fit."""

    CSV_HEADER: ClassVar[tuple[str, ...]] = (
        'u',
        'n',
        'count',
        'phat',
        'log_phat',
    )
    """The columns of :meth:`write_csv`."""
    rows: list[TailRow]
    """The rows in increasing threshold order."""
    variant: PathVariant = PathVariant.CANONICAL
    """The path used."""
    samples: npt.NDArray[np.float64] = field(
        default_factory=lambda: np.zeros(0),
    )
    """The per-replica statistics compared against the thresholds."""

    @classmethod
    def from_samples(
            cls,
            samples: npt.ArrayLike,
            u_grid: Sequence[float],
            variant: PathVariant = PathVariant.CANONICAL,
    ) -> 'TailTable':
        """Tabulate ``P(sample >= u)``.

        :param samples: The statistics.
        :param u_grid: The thresholds.
        :param variant: The path used.
        :return: The table.
        """
        values = np.asarray(samples, dtype=np.float64)

        if not values.size:
            raise ValueError('no samples')

        rows = [
            TailRow(float(u), int(values.size), int((values >= u).sum()))
            for u in sorted(u_grid)
        ]

        return cls(rows, variant, values)

    def monotone(self, sigmas: float = 0.0) -> bool:
        """Check that the tail does not increase in the threshold.

        :param sigmas: The binomial slack in standard errors.
        :return: The monotonicity indicator.
        """
        for first, second in zip(self.rows, self.rows[1:]):
            sigma = np.sqrt(
                max(first.phat * (1 - first.phat), 1 / first.n) / first.n,
            )

            if second.phat > first.phat + sigmas * sigma:
                return False

        return True

    def fit(self, power: float = 2.0) -> LinearFit:
        """Fit the log tail against a power of the threshold.

        Rows without exceedances and rows with a certain exceedance are left
        out.

        :param power: The exponent of the threshold.
        :return: The fit of ``log phat`` against ``u ** power``.
        """
        rows = [row for row in self.rows if 0 < row.count < row.n]

        return linear_fit(
            [row.u ** power for row in rows],
            [row.log_phat for row in rows],
        )

    def csv_rows(self) -> Iterator[tuple[float, int, int, float, float]]:
        for row in self.rows:
            yield row.u, row.n, row.count, row.phat, row.log_phat

    def write_csv(self, path: str | Path) -> None:
        """Write the table.

        :param path: The destination file.
        :return: ``None``.
        """
        with open(path, 'w', newline='') as file:
            writer = csv.writer(file)

            writer.writerow(self.CSV_HEADER)
            writer.writerows(self.csv_rows())


def _step_run(
        seed: int,
        replica_id: int,
        t: float,
        window: tuple[int, int],
        record: bool = True,
) -> tuple[PoissonField, TrajectoryLog]:
    field_ = generate_field(seed, replica_id, window, t)
    config = make_initial(ICKind.STEP, *window)
    _, log = evolve(config, field_, 0, t, record=record)

    check_window(log)

    return field_, log


def sample_slow_decorrelation(
        alpha: float,
        t: float,
        tau: float,
        seed: int,
        replica_id: int,
        window_factor: float = SPREAD_FACTOR,
) -> float:
    """Sample the deviation of the height from its late step increment.

    :param alpha: The direction.
    :param t: The time.
    :param tau: The restart time.
    :param seed: The seed.
    :param replica_id: The replica.
    :param window_factor: The speed bound of the margin rule.
    :return: ``h(x, t) - h_step(x, t; y, tau) - (1 + alpha^2) tau / 2``.
    """
    x = round(alpha * t)
    y = round(alpha * tau)
    window = margin_window(t, min(x, y), max(x, y), window_factor)
    field_, log = _step_run(seed, replica_id, t, window, record=False)

    assert log.height is not None

    increment = replay_step_from(field_, y, tau, t, window_factor)

    return float(
        log.height.height(x)
        - increment.height(x)
        - (1 + alpha ** 2) * tau / 2,
    )


@dataclass(frozen=True)
class DecorrelationRow:
    """The class for one time of a slow decorrelation table."""

    t: float
    """The time."""
    tau: float
    """The restart time."""
    n: int
    """The number of replicas."""
    count: int
    """The number of deviations of at least ``epsilon t^(1/3)``."""

    @property
    def phat(self) -> float:
        return self.count / self.n


@dataclass(frozen=True)
class DecorrelationTable:
    """The class for exceedance probabilities along a time ladder."""

    alpha: float
    """The direction."""
    epsilon: float
    """The threshold in units of ``t^(1/3)``."""
    rows: list[DecorrelationRow]
    """The rows in increasing time order."""

    def monotone(self, sigmas: float = 2.0) -> bool:
        """Check that the exceedance does not grow along the ladder.

        :param sigmas: The slack in standard errors of the difference.
        :return: The monotonicity indicator.
        """
        for first, second in zip(self.rows, self.rows[1:]):
            sigma = np.hypot(
                np.sqrt(first.phat * (1 - first.phat) / first.n),
                np.sqrt(second.phat * (1 - second.phat) / second.n),
            )

            if second.phat > first.phat + sigmas * sigma:
                return False

        return True


def default_tau_rule(t: float) -> float:
    return float(t ** 0.8)


def experiment_slow_decorrelation(
        alpha: float,
        t_list: Sequence[float],
        tau_rule: Callable[[float], float] = default_tau_rule,
        replicas: int = 1000,
        seed: int = 0,
        epsilon: float = 1.0,
        *,
        window_factor: float = SPREAD_FACTOR,
        mapper: Mapper[Any] = map,
) -> DecorrelationTable:
    """Estimate the exceedance probability of the late step increment.

    :param alpha: The direction in ``(-1, 1)``.
    :param t_list: The times.
    :param tau_rule: The restart time as a function of the time.
    :param replicas: The number of replicas per time.
    :param seed: The seed.
    :param epsilon: The threshold in units of ``t^(1/3)``.
    :param window_factor: The speed bound of the margin rule.
    :param mapper: A ``map`` lookalike, possibly parallel.
    :return: The table.
    """
    if not -1 < alpha < 1:
        raise ValueError('alpha not in (-1, 1)')

    rows = []

    for i, t in enumerate(sorted(t_list)):
        tau = tau_rule(t)

        if not 0 <= tau <= t:
            raise ValueError('restart time not within [0, t]')

        sampler = partial(
            _slow_decorrelation_replica,
            alpha,
            t,
            tau,
            seed,
            window_factor,
            i * replicas,
        )
        deviations = np.fromiter(mapper(sampler, range(replicas)), np.float64)
        count = int((np.abs(deviations) >= epsilon * t ** (1 / 3)).sum())

        rows.append(DecorrelationRow(t, tau, replicas, count))

    return DecorrelationTable(alpha, epsilon, rows)


def _slow_decorrelation_replica(
        alpha: float,
        t: float,
        tau: float,
        seed: int,
        window_factor: float,
        offset: int,
        replica_id: int,
) -> float:
    return sample_slow_decorrelation(
        alpha,
        t,
        tau,
        seed,
        offset + replica_id,
        window_factor,
    )


def sample_path(
        alpha: float,
        t: float,
        seed: int,
        replica_id: int,
        window_factor: float = SPREAD_FACTOR,
        variant: PathVariant = PathVariant.CANONICAL,
) -> GeodesicPath:
    """Sample the backwards path of a step evolution from ``(alpha t, t)``.

    :param alpha: The direction.
    :param t: The time.
    :param seed: The seed.
    :param replica_id: The replica.
    :param window_factor: The speed bound of the margin rule.
    :param variant: The path used.
    :return: The path.
    """
    x = round(alpha * t)
    window = margin_window(t, min(x, 0), max(x, 0), window_factor)
    _, log = _step_run(seed, replica_id, t, window)
    path = backward_path(log, x, t)

    if variant is PathVariant.ORIGIN:
        path = canonicalize_to_origin(path, log)

    return path


def _midtime_replica(
        alpha: float,
        t: float,
        seed: int,
        window_factor: float,
        variant: PathVariant,
        replica_id: int,
) -> float:
    path = sample_path(alpha, t, seed, replica_id, window_factor, variant)

    return abs(path.position(t / 2) - alpha * t / 2) / t ** (2 / 3)


def experiment_midtime_tail(
        alpha: float,
        t: float,
        u_grid: Sequence[float],
        replicas: int,
        seed: int = 0,
        *,
        window_factor: float = SPREAD_FACTOR,
        variant: PathVariant = PathVariant.CANONICAL,
        mapper: Mapper[Any] = map,
) -> TailTable:
    """Tabulate ``P(|x(t / 2) - alpha t / 2| >= u t^(2/3))``.

    :param alpha: The direction in ``(-1, 1)``.
    :param t: The time.
    :param u_grid: The thresholds.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param window_factor: The speed bound of the margin rule.
    :param variant: The path used.
    :param mapper: A ``map`` lookalike, possibly parallel.
    :return: The table.
    """
    if not -1 < alpha < 1:
        raise ValueError('alpha not in (-1, 1)')

    sampler = partial(
        _midtime_replica,
        alpha,
        t,
        seed,
        window_factor,
        variant,
    )

    return TailTable.from_samples(
        np.fromiter(mapper(sampler, range(replicas)), np.float64),
        u_grid,
        variant,
    )


def _tube_replica(
        alpha: float,
        t: float,
        seed: int,
        window_factor: float,
        variant: PathVariant,
        replica_id: int,
) -> float:
    path = sample_path(alpha, t, seed, replica_id, window_factor, variant)

    return path.max_deviation(alpha) / t ** (2 / 3)


def experiment_tube_localization(
        alpha: float,
        t: float,
        u_grid: Sequence[float],
        replicas: int,
        seed: int = 0,
        *,
        window_factor: float = SPREAD_FACTOR,
        variant: PathVariant = PathVariant.CANONICAL,
        mapper: Mapper[Any] = map,
) -> TailTable:
    """Tabulate the probability of leaving the tube of width ``u t^(2/3)``.

    A row counts the replicas whose path leaves the tube at some time; the
    probability of staying inside is one minus its ``phat``.

    :param alpha: The direction in ``(-1, 1)``.
    :param t: The time.
    :param u_grid: The tube widths.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param window_factor: The speed bound of the margin rule.
    :param variant: The path used.
    :param mapper: A ``map`` lookalike, possibly parallel.
    :return: The table.
    """
    if not -1 < alpha < 1:
        raise ValueError('alpha not in (-1, 1)')

    sampler = partial(_tube_replica, alpha, t, seed, window_factor, variant)
    deviations = np.fromiter(mapper(sampler, range(replicas)), np.float64)
    rows = [
        TailRow(float(u), replicas, int((deviations > u).sum()))
        for u in sorted(u_grid)
    ]

    return TailTable(rows, variant, deviations)


def sample_stationary_exit(
        rho: float,
        t: float,
        seed: int,
        replica_id: int,
        window_factor: float = SPREAD_FACTOR,
) -> int:
    """Sample the exit point of a stationary backwards path.

    The path starts at ``((1 - 2 rho) t, t)`` in a closed window carrying
    Bernoulli initial occupations.

    :param rho: The density.
    :param t: The time.
    :param seed: The seed.
    :param replica_id: The replica.
    :param window_factor: The speed bound of the margin rule.
    :return: The position at time zero.
    """
    x = round((1 - 2 * rho) * t)
    window = margin_window(t, min(x, 0), max(x, 0), window_factor)
    config = make_initial(
        ICKind.BERNOULLI,
        *window,
        density=rho,
        rng=auxiliary_generator(seed, replica_id, BERNOULLI_PURPOSE),
    )
    field_ = generate_field(seed, replica_id, window, t)
    # Closed edges block events; the margin keeps them off the path.
    _, log = evolve(config, field_, 0, t)

    return backward_path(log, x, t).origin_site


def _stationary_replica(
        rho: float,
        t: float,
        seed: int,
        window_factor: float,
        replica_id: int,
) -> float:
    origin = sample_stationary_exit(rho, t, seed, replica_id, window_factor)

    return abs(origin) / t ** (2 / 3)


def experiment_stationary_exit(
        rho: float,
        t: float,
        m_grid: Sequence[float],
        replicas: int,
        seed: int = 0,
        *,
        window_factor: float = SPREAD_FACTOR,
        mapper: Mapper[Any] = map,
) -> TailTable:
    """Tabulate ``P(|x(0)| >= M t^(2/3))`` under Bernoulli initial data.

    :param rho: The density in ``(0, 1)``.
    :param t: The time.
    :param m_grid: The thresholds.
    :param replicas: The number of replicas.
    :param seed: The seed.
    :param window_factor: The speed bound of the margin rule.
    :param mapper: A ``map`` lookalike, possibly parallel.
    :return: The table.
    """
    if not 0 < rho < 1:
        raise ValueError('rho not in (0, 1)')

    sampler = partial(_stationary_replica, rho, t, seed, window_factor)

    return TailTable.from_samples(
        np.fromiter(mapper(sampler, range(replicas)), np.float64),
        m_grid,
    )


def concatenation_ys(
        rng: np.random.Generator,
        x_end: int,
        t: float,
        count: int = 20,
) -> list[int]:
    """Draw intermediate sites for the concatenation inequality.

    :param rng: The generator.
    :param x_end: The end site.
    :param t: The end time.
    :param count: The number of sites.
    :return: The sites, uniform within ``ceil(t)`` of ``x_end``.
    """
    reach = ceil(t)

    sites = rng.integers(x_end - reach, x_end + reach, count, endpoint=True)

    return list(map(int, sites))
