"""This module implements the graphical construction of multicolor TASEP.

Every bond ``(z, z + 1)`` carries a rate-1 Poisson clock. The clocks are
generated from counter-based streams addressed by the seed, the replica, a
tile of sites and a block of time, so any site's events can be regenerated
without touching the others and a window can be enlarged without changing
the events of the sites it already covered.
"""

from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field, replace
from enum import IntEnum
from math import ceil
from pathlib import Path
from typing import ClassVar, Final

import numpy as np
import numpy.typing as npt
from numba import njit

from taseplib.lattice_core import (
    Boundary,
    ColorConfig,
    HeightState,
    ICKind,
    INF,
    make_initial,
    PackedColor,
)


class EventClass(IntEnum):
    """The enum class for the local shape of the height at an event."""

    LOCAL_MAX = 0
    """A local maximum; the height stays but backwards paths leave it."""
    GROWTH = 1
    """A local minimum; the height grows by two."""
    SUPPRESSED_ASC = 2
    """An ascending stretch, hole followed by hole."""
    SUPPRESSED_DESC = 3
    """A descending stretch, particle followed by particle."""


EVENT_DTYPE: Final = np.dtype(
    [
        ('time', '<f8'),
        ('site', '<i4'),
        ('event_class', 'u1'),
        ('reserved', 'u1', (3,)),
    ],
)
"""The 16-byte little-endian record of a logged event."""

_LOCAL_MAX: Final = int(EventClass.LOCAL_MAX)
_GROWTH: Final = int(EventClass.GROWTH)
_SUPPRESSED_ASC: Final = int(EventClass.SUPPRESSED_ASC)
_SUPPRESSED_DESC: Final = int(EventClass.SUPPRESSED_DESC)
_HOLE: Final = INF

SPREAD_FACTOR: Final = 1.5
"""The default speed bound of the margin rule."""
SPREAD_SLACK: Final = 50
"""The default slack of the margin rule."""


class BoundaryInfluenceError(RuntimeError):
    """The window edges took part in the dynamics."""


@dataclass(frozen=True)
class PoissonField:
    """The class for seed-addressable Poisson clocks on a window.

    The clock of bond ``(z, z + 1)`` is stored under site ``z``. A field on
    window ``[lo, hi]`` covers the sites ``lo - 1`` through ``hi``; site
    ``lo - 1`` drives the reservoir and site ``hi`` the right edge.
    """

    TILE_WIDTH: ClassVar[int] = 64
    """The number of sites sharing one stream."""
    BLOCK_DURATION: ClassVar[float] = 16.0
    """The length of the time block of one stream."""
    KEY_OFFSET: ClassVar[int] = 1 << 32
    """The shift making tile keys nonnegative."""
    MAX_HORIZON: ClassVar[float] = 1e6
    """The largest supported horizon."""
    seed: int
    """The seed."""
    replica_id: int
    """The replica."""
    window: tuple[int, int]
    """The leftmost and rightmost sites of the configurations it drives."""
    horizon: float
    """The last time covered."""

    def __post_init__(self) -> None:
        lo, hi = self.window

        if self.seed < 0 or self.replica_id < 0:
            raise ValueError('seed and replica must be nonnegative')
        elif lo > hi:
            raise ValueError('empty window')
        elif not 0 < self.horizon <= self.MAX_HORIZON:
            raise ValueError('horizon not in (0, 1e6]')
        elif not (-self.KEY_OFFSET < lo and hi < self.KEY_OFFSET):
            raise ValueError('window too far from the origin')

        object.__setattr__(self, 'window', (int(lo), int(hi)))

    @property
    def first_site(self) -> int:
        return self.window[0] - 1

    @property
    def last_site(self) -> int:
        return self.window[1]

    def _tile_block(
            self,
            tile: int,
            block: int,
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
        sequence = np.random.SeedSequence(
            self.seed,
            spawn_key=(self.replica_id, tile + self.KEY_OFFSET, block),
        )
        rng = np.random.Generator(np.random.Philox(sequence))
        counts = rng.poisson(self.BLOCK_DURATION, self.TILE_WIDTH)
        offsets = rng.random(int(counts.sum())) * self.BLOCK_DURATION
        times = block * self.BLOCK_DURATION + offsets
        sites = np.repeat(
            tile * self.TILE_WIDTH + np.arange(self.TILE_WIDTH),
            counts,
        )

        return times, sites

    def block_events(
            self,
            block: int,
            first_site: int | None = None,
            last_site: int | None = None,
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
        """Get the events of one time block ordered by time then site.

        :param block: The block index.
        :param first_site: The leftmost site, :attr:`first_site` if
                           ``None``.
        :param last_site: The rightmost site, :attr:`last_site` if ``None``.
        :return: The event times and sites.
        """
        first = self.first_site if first_site is None else first_site
        last = self.last_site if last_site is None else last_site
        parts = [
            self._tile_block(tile, block)
            for tile in range(
                first // self.TILE_WIDTH,
                last // self.TILE_WIDTH + 1,
            )
        ]
        times = np.concatenate([part[0] for part in parts])
        sites = np.concatenate([part[1] for part in parts])
        kept = (first <= sites) & (sites <= last) & (times <= self.horizon)
        times = times[kept]
        sites = sites[kept]
        order = np.lexsort((sites, times))

        return times[order], sites[order]

    def events(
            self,
            t_from: float,
            t_to: float,
    ) -> Iterator[tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]]:
        """Iterate over the events in ``(t_from, t_to]`` block by block.

        :param t_from: The exclusive start time.
        :param t_to: The inclusive end time.
        :return: The ordered event times and sites of each block.
        """
        if not 0 <= t_from <= t_to <= self.horizon:
            raise ValueError('times not within [0, horizon]')

        block = int(t_from // self.BLOCK_DURATION)

        while block * self.BLOCK_DURATION < t_to:
            times, sites = self.block_events(block)
            kept = (t_from < times) & (times <= t_to)

            yield times[kept], sites[kept]

            block += 1

    def site_events(self, site: int) -> npt.NDArray[np.float64]:
        """Get the ordered event times of one site.

        :param site: The site.
        :return: The event times in ``[0, horizon]``.
        """
        if not self.first_site <= site <= self.last_site:
            raise ValueError('site outside field')

        block_count = ceil(self.horizon / self.BLOCK_DURATION)
        times = [
            self.block_events(block, site, site)[0]
            for block in range(block_count)
        ]

        return np.concatenate(times)

    def extend(self, window: tuple[int, int]) -> 'PoissonField':
        """Get the same clocks on an enclosing window.

        :param window: The new window.
        :return: The extended field.
        """
        if window[0] > self.window[0] or window[1] < self.window[1]:
            raise ValueError('new window does not enclose the old one')

        return replace(self, window=window)


def generate_field(
        seed: int,
        replica_id: int,
        window: tuple[int, int],
        horizon: float,
) -> PoissonField:
    """Create the Poisson clocks of a replica.

    :param seed: The seed.
    :param replica_id: The replica.
    :param window: The window of the driven configurations.
    :param horizon: The last time covered.
    :return: The field.
    """
    return PoissonField(seed, replica_id, window, horizon)


def auxiliary_generator(seed: int, replica_id: int, purpose: int) -> (
        np.random.Generator
):
    """Get a generator for randomness outside the clocks.

    Its stream never coincides with a clock stream of the same replica.

    :param seed: The seed.
    :param replica_id: The replica.
    :param purpose: A nonnegative tag distinguishing uses.
    :return: The generator.
    """
    if purpose < 0:
        raise ValueError('purpose must be nonnegative')

    sequence = np.random.SeedSequence(
        seed,
        spawn_key=(replica_id, 0, purpose),
    )

    return np.random.Generator(np.random.Philox(sequence))


def margin_window(
        t: float,
        x_lo: int,
        x_hi: int,
        factor: float = SPREAD_FACTOR,
        slack: int = SPREAD_SLACK,
) -> tuple[int, int]:
    """Get the default window for observations on ``[x_lo, x_hi]``.

    >>> margin_window(4, -2, 3)
    (-58, 59)

    :param t: The horizon.
    :param x_lo: The leftmost observed site.
    :param x_hi: The rightmost observed site.
    :param factor: The speed bound.
    :param slack: The extra sites on each side.
    :return: The window.
    """
    if x_lo > x_hi:
        raise ValueError('empty observation range')

    margin = ceil(factor * t) + slack

    return x_lo - margin, x_hi + margin


@njit(cache=True)  # type: ignore[misc]
def _sweep(
        colors: npt.NDArray[np.int64],
        window_lo: int,
        times: npt.NDArray[np.float64],
        sites: npt.NDArray[np.int64],
        left_color: int,
        right_empty: bool,
        threshold: int,
        anchor_site: int,
        record: bool,
        log_times: npt.NDArray[np.float64],
        log_sites: npt.NDArray[np.int32],
        log_classes: npt.NDArray[np.uint8],
        exits: npt.NDArray[np.int64],
        absorbed: npt.NDArray[np.int64],
) -> tuple[int, int, int, int, int, int]:
    size = colors.size
    logged = 0
    exited = 0
    displaced = 0
    injected = 0
    crossings = 0
    blocked = 0

    for k in range(times.size):
        z = sites[k]
        i = z - window_lo

        if i < 0:
            if left_color < colors[0]:
                if colors[0] != _HOLE:
                    absorbed[displaced] = colors[0]
                    displaced += 1

                colors[0] = left_color
                injected += 1
            elif left_color == _HOLE and colors[0] >= threshold:
                blocked += 1

            continue

        first = colors[i]

        if i == size - 1:
            if not right_empty:
                if first < threshold:
                    blocked += 1

                continue

            second = _HOLE
        else:
            second = colors[i + 1]

        if first < threshold:
            if second >= threshold:
                event_class = _GROWTH
            else:
                event_class = _SUPPRESSED_DESC
        elif second >= threshold:
            event_class = _SUPPRESSED_ASC
        else:
            event_class = _LOCAL_MAX

        if first < second:
            if i == size - 1:
                exits[exited] = first
                exited += 1
                colors[i] = _HOLE
            else:
                colors[i] = second
                colors[i + 1] = first

        if event_class == _GROWTH and z == anchor_site:
            crossings += 1

        if record:
            log_times[logged] = times[k]
            log_sites[logged] = z
            log_classes[logged] = event_class
            logged += 1

    return logged, exited, displaced, injected, crossings, blocked


@dataclass(frozen=True)
class Checkpoint:
    """The class for observers invoked during an evolution."""

    time: float
    """The observation time."""
    callback: Callable[[float, ColorConfig, HeightState | None], None]
    """The observer, called with the time, configuration and heights."""


@dataclass(frozen=True, eq=False)
class TrajectoryLog:
    """The class for the record of an evolution.

    Every event inside the window is kept with the local shape of the
    height it met. Events on the bond left of the window and on a closed
    right edge are not logged.
    """

    t_from: float
    """The start time."""
    t_to: float
    """The end time."""
    events: npt.NDArray[np.void] = field(
        default_factory=lambda: np.zeros(0, EVENT_DTYPE),
    )
    """The events ordered by time, site and sequence."""
    snapshots: dict[float, ColorConfig] = field(default_factory=dict)
    """The configurations at the requested snapshot times."""
    height: HeightState | None = None
    """The height state at :attr:`t_to`, if heights were tracked."""
    injections: int = 0
    """The number of reservoir injections."""
    exits: int = 0
    """The number of exits through the right edge."""
    blocked: int = 0
    """The number of events a closed edge suppressed."""

    def __len__(self) -> int:
        return int(self.events.size)

    def covers(self, t: float) -> bool:
        return self.t_from == 0 and self.t_to >= t

    def dump(self, path: str | Path) -> None:
        """Write the events as packed little-endian records.

        :param path: The destination file.
        :return: ``None``.
        """
        np.ascontiguousarray(self.events, dtype=EVENT_DTYPE).tofile(path)

    @classmethod
    def load(cls, path: str | Path, t_from: float, t_to: float) -> (
            'TrajectoryLog'
    ):
        """Read events written by :meth:`dump`.

        :param path: The source file.
        :param t_from: The start time of the dumped evolution.
        :param t_to: The end time of the dumped evolution.
        :return: The log, without snapshots or heights.
        """
        return cls(t_from, t_to, np.fromfile(path, dtype=EVENT_DTYPE))


def evolve(
        config: ColorConfig,
        field_: PoissonField,
        t_from: float,
        t_to: float,
        observers: Sequence[Checkpoint] = (),
        *,
        height: HeightState | None = None,
        threshold: int = INF,
        record: bool = True,
        snapshot_times: Sequence[float] = (),
) -> tuple[ColorConfig, TrajectoryLog]:
    """Apply the swap operators at the clock events of ``(t_from, t_to]``.

    Heights are tracked when ``height`` is given or the configuration has an
    empty right edge and covers the origin.

    :param config: The configuration at ``t_from``.
    :param field_: The clocks.
    :param t_from: The start time.
    :param t_to: The end time.
    :param observers: The observers.
    :param height: The height state at ``t_from``.
    :param threshold: Colors below it are particles for heights and event
                      classes.
    :param record: Whether to log events.
    :param snapshot_times: The times of stored configurations.
    :return: The configuration at ``t_to`` and the log.
    """
    if not 0 <= t_from < t_to <= field_.horizon:
        raise ValueError('times not within [0, horizon]')
    elif config.window != field_.window:
        raise ValueError('configuration and field windows differ')

    if (
            height is None
            and config.right_boundary is Boundary.EMPTY
            and config.window_lo - 1 <= 0 <= config.window_hi
    ):
        height = HeightState.from_config(config, threshold=threshold)

    left = config.left_boundary
    left_color = left.color if isinstance(left, PackedColor) else INF
    right_empty = config.right_boundary is Boundary.EMPTY
    anchor_site = (
        config.window_lo - 2 if height is None else height.anchor_site
    )
    stops = sorted(
        {
            time
            for time in (
                *(observer.time for observer in observers),
                *snapshot_times,
            )
            if t_from < time < t_to
        } | {t_to},
    )
    colors = config.colors.copy()
    exited = list(config.exited)
    absorbed = list(config.absorbed)
    logs = []
    snapshots = {}
    injections = 0
    exit_count = 0
    blocked = 0
    start = t_from

    for stop in stops:
        crossings = 0

        for times, sites in field_.events(start, stop):
            log = np.zeros(times.size if record else 0, EVENT_DTYPE)
            log_times = np.empty(log.size, np.float64)
            log_sites = np.empty(log.size, np.int32)
            log_classes = np.empty(log.size, np.uint8)
            exits = np.empty(times.size if right_empty else 0, np.int64)
            displaced = np.empty(
                times.size if left_color < INF else 0,
                np.int64,
            )
            (
                logged,
                exited_now,
                displaced_now,
                injected,
                crossed,
                stuck,
            ) = _sweep(
                colors,
                config.window_lo,
                times,
                sites,
                left_color,
                right_empty,
                threshold,
                anchor_site,
                record,
                log_times,
                log_sites,
                log_classes,
                exits,
                displaced,
            )
            log = log[:logged]
            log['time'] = log_times[:logged]
            log['site'] = log_sites[:logged]
            log['event_class'] = log_classes[:logged]
            logs.append(log)
            exited.extend(exits[:exited_now].tolist())
            absorbed.extend(displaced[:displaced_now].tolist())
            injections += injected
            exit_count += exited_now
            crossings += crossed
            blocked += stuck

        current = ColorConfig(
            config.window_lo,
            colors,
            left,
            config.right_boundary,
            tuple(exited),
            tuple(absorbed),
        )

        if height is not None:
            height = height.advance(current.occupancy(threshold), crossings)

        if stop in snapshot_times:
            snapshots[stop] = current

        for observer in observers:
            if observer.time == stop:
                observer.callback(stop, current, height)

        start = stop

    events = np.concatenate(logs) if logs else np.zeros(0, EVENT_DTYPE)

    return current, TrajectoryLog(
        t_from,
        t_to,
        events,
        snapshots,
        height,
        injections,
        exit_count,
        blocked,
    )


def check_window(log: TrajectoryLog) -> None:
    """Raise if the window edges took part in an evolution.

    :param log: The log of the evolution.
    :return: ``None``.
    """
    if log.injections or log.exits or log.blocked:
        raise BoundaryInfluenceError(
            (
                f'{log.injections} injections, {log.exits} exits and'
                f' {log.blocked} blocked edge events in'
                f' ({log.t_from}, {log.t_to}]; enlarge the window'
            ),
        )


def heights_ordered(first: HeightState, second: HeightState) -> bool:
    """Check ``first >= second`` at every site of their common window.

    :param first: The presumably higher profile.
    :param second: The presumably lower profile.
    :return: The ordering.
    """
    if first.window_lo != second.window_lo:
        raise ValueError('height windows differ')

    return bool((first.profile() >= second.profile()).all())


def coupled_evolve(
        configs: Sequence[ColorConfig],
        field_: PoissonField,
        t_from: float,
        t_to: float,
        *,
        heights: Sequence[HeightState] | None = None,
) -> list[ColorConfig]:
    """Evolve several configurations with the same clocks.

    Pointwise ordered initial heights stay ordered; this is asserted when
    assertions are enabled.

    :param configs: The configurations.
    :param field_: The clocks.
    :param t_from: The start time.
    :param t_to: The end time.
    :param heights: The initial height states of the configurations.
    :return: The evolved configurations.
    """
    if len({config.window for config in configs}) > 1:
        raise ValueError('mismatched windows')
    elif heights is not None and len(heights) != len(configs):
        raise ValueError('one height state per configuration required')

    results = []
    final_heights = []

    for i, config in enumerate(configs):
        result, log = evolve(
            config,
            field_,
            t_from,
            t_to,
            height=None if heights is None else heights[i],
            record=False,
        )

        results.append(result)
        final_heights.append(log.height)

    if __debug__ and heights is not None:
        for i, j in np.ndindex(len(configs), len(configs)):
            before = heights_ordered(heights[i], heights[j])
            first, second = final_heights[i], final_heights[j]

            assert first is not None and second is not None
            assert not before or heights_ordered(first, second)

    return results


def replay_step_from(
        field_: PoissonField,
        y: int,
        tau: float,
        t: float,
        factor: float = SPREAD_FACTOR,
) -> HeightState:
    """Evolve the profile ``|x - y|`` from ``tau`` to ``t``.

    :param field_: The clocks.
    :param y: The tip of the step.
    :param tau: The start time.
    :param t: The end time.
    :param factor: The speed bound of the margin check.
    :return: The height state at ``t``.
    """
    lo, hi = field_.window
    margin = ceil(factor * (t - tau))

    if not 0 <= tau <= t <= field_.horizon:
        raise ValueError('times not within [0, horizon]')
    elif not lo + margin <= y < hi - margin:
        raise ValueError(f'step tip {y} violates the window margin {margin}')

    config = make_initial(ICKind.STEP, lo, hi, y=y)
    height = HeightState.from_config(config, anchor_value=abs(y))

    if tau == t:
        return height

    _, log = evolve(config, field_, tau, t, height=height, record=False)

    assert log.height is not None

    return log.height
