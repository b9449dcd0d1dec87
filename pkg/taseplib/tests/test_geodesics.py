from csv import reader
from math import isnan, log
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase, main

import numpy as np

from taseplib.geodesics import (
    backward_path,
    canonicalize_to_origin,
    check_comparison,
    check_concatenation,
    concatenation_ys,
    DecorrelationRow,
    DecorrelationTable,
    default_tau_rule,
    evolve_with_heights,
    experiment_midtime_tail,
    experiment_slow_decorrelation,
    experiment_stationary_exit,
    experiment_tube_localization,
    GeodesicPath,
    paths_intersect,
    PathVariant,
    QuietIntervalError,
    sample_path,
    sample_slow_decorrelation,
    TailRow,
    TailTable,
)
from taseplib.kinetics import (
    EVENT_DTYPE,
    EventClass,
    generate_field,
    margin_window,
    TrajectoryLog,
)
from taseplib.lattice_core import ICKind, make_initial


def _log(
        t: float,
        events: list[tuple[float, int, EventClass]],
) -> TrajectoryLog:
    records = np.zeros(len(events), EVENT_DTYPE)

    for i, (time, site, event_class) in enumerate(events):
        records['time'][i] = time
        records['site'][i] = site
        records['event_class'][i] = int(event_class)

    return TrajectoryLog(0, t, records)


class GeodesicPathTestCase(TestCase):
    def test_positions(self) -> None:
        path = GeodesicPath(0, 4, [3, 1], [1, 2])

        self.assertEqual(
            path.positions([4, 3, 2, 1, 0]).tolist(),
            [0, 0, 1, 1, 2],
        )
        self.assertEqual(path.origin_site, 2)
        self.assertEqual(path.jumps, [(3.0, 1), (1.0, 2)])
        self.assertEqual(path.breakpoints().tolist(), [0, 1, 3, 4])
        self.assertRaises(ValueError, path.position, 5)
        self.assertEqual(GeodesicPath(3, 1).origin_site, 3)

    def test_max_deviation(self) -> None:
        path = GeodesicPath(0, 4, [2], [1])

        self.assertEqual(path.max_deviation(0), 1)
        self.assertEqual(path.max_deviation(0, 0.5), 0.5)
        self.assertEqual(GeodesicPath(4, 4).max_deviation(1), 4)

    def test_validation(self) -> None:
        self.assertRaises(ValueError, GeodesicPath, 0, 4, [1, 2], [1, 2])
        self.assertRaises(ValueError, GeodesicPath, 0, 4, [2], [2])
        self.assertRaises(ValueError, GeodesicPath, 0, 4, [5], [1])
        self.assertRaises(ValueError, GeodesicPath, 0, 4, [2], [1, 0])


class BackwardPathTestCase(TestCase):
    def test_no_suppressed_events(self) -> None:
        path = backward_path(_log(4, [(1, 0, EventClass.GROWTH)]), 0, 4)

        self.assertEqual(len(path), 0)
        self.assertEqual(path.origin_site, 0)

    def test_single_descending_event(self) -> None:
        path = backward_path(
            _log(4, [(2, 0, EventClass.SUPPRESSED_DESC)]),
            0,
            4,
        )

        self.assertEqual(path.position(3), 0)
        self.assertEqual(path.position(1), 1)

    def test_local_maximum(self) -> None:
        path = backward_path(_log(4, [(2, 0, EventClass.LOCAL_MAX)]), 0, 4)

        self.assertEqual(path.position(3), 0)
        self.assertEqual(path.position(1), 1)
        self.assertEqual(
            backward_path(_log(4, [(2, 0, EventClass.GROWTH)]), 0, 4)
            .position(1),
            0,
        )

    def test_following_events(self) -> None:
        log_ = _log(
            6,
            [
                (0.5, 0, EventClass.SUPPRESSED_ASC),
                (1, 1, EventClass.SUPPRESSED_ASC),
                (2, 2, EventClass.SUPPRESSED_DESC),
                (3, 1, EventClass.SUPPRESSED_DESC),
                (4, 5, EventClass.SUPPRESSED_ASC),
                (5.5, 1, EventClass.SUPPRESSED_ASC),
            ],
        )
        path = backward_path(log_, 1, 5)

        self.assertEqual(path.jumps, [(3.0, 2), (2.0, 3)])
        self.assertRaises(ValueError, backward_path, log_, 1, 7)

    def test_canonicalize_to_origin(self) -> None:
        path = GeodesicPath(0, 4, [3, 2], [1, 2])
        still = GeodesicPath(0, 4)
        redirected = canonicalize_to_origin(path, _log(4, []))

        self.assertEqual(redirected.origin_site, 0)
        self.assertEqual(
            redirected.positions([4, 2.5, 1.5]).tolist(),
            [0, 1, 2],
        )
        self.assertEqual(redirected.jump_sites.tolist(), [1, 2, 1, 0])
        self.assertIs(canonicalize_to_origin(still, _log(4, [])), still)
        self.assertRaises(
            QuietIntervalError,
            canonicalize_to_origin,
            path,
            _log(4, [(0, 1, EventClass.GROWTH)]),
        )

    def test_paths_intersect(self) -> None:
        still = GeodesicPath(0, 4)
        beside = GeodesicPath(1, 4)
        crossing = GeodesicPath(0, 4, [2], [1])

        self.assertTrue(paths_intersect(still, GeodesicPath(0, 4)))
        self.assertFalse(paths_intersect(still, beside))
        self.assertTrue(paths_intersect(crossing, beside))
        self.assertTrue(paths_intersect(crossing, still))


class ConcatenationTestCase(TestCase):
    def test_step_concatenation(self) -> None:
        window = margin_window(6, -6, 6)
        field_ = generate_field(0, 0, window, 6)
        config = make_initial(ICKind.STEP, *window)

        for variant in PathVariant:
            report = check_concatenation(
                field_,
                config,
                1,
                6,
                [1, 2.5, 4, 6],
                range(-5, 6),
                variant,
            )

            self.assertTrue(report.passed)
            self.assertEqual(len(report.rows), 4)
            self.assertEqual(report.inequality_checks, 44)
            self.assertEqual(report.rows[-1].y, 1)

        self.assertRaises(
            ValueError,
            check_concatenation,
            field_,
            config,
            0,
            6,
            [7],
        )

    def test_many_fields(self) -> None:
        window = margin_window(6, -6, 6)
        config = make_initial(ICKind.STEP, *window)

        for seed in range(20):
            field_ = generate_field(seed, 0, window, 6)

            for variant in PathVariant:
                report = check_concatenation(
                    field_,
                    config,
                    1,
                    6,
                    [1, 2.5, 4, 6],
                    variant=variant,
                )

                self.assertTrue(report.passed, (seed, variant))

    def test_short_runs(self) -> None:
        window = margin_window(4, -2, 2)
        config = make_initial(ICKind.STEP, *window)

        for replica_id in range(100):
            report = check_concatenation(
                generate_field(11, replica_id, window, 4),
                config,
                replica_id % 5 - 2,
                4,
                [1, 2, 3],
                range(-3, 4),
            )

            self.assertTrue(report.passed, replica_id)
            self.assertEqual(report.inequality_checks, 21)

    def test_evolve_with_heights(self) -> None:
        window = margin_window(4, 0, 0)
        config = make_initial(ICKind.STEP, *window)
        log_, heights = evolve_with_heights(
            config,
            generate_field(1, 0, window, 4),
            4,
            [1, 2, 5],
        )

        self.assertEqual(sorted(heights), [0, 1, 2, 4])
        self.assertEqual(heights[0].height(3), 3)
        self.assertTrue(log_.covers(4))

    def test_comparison(self) -> None:
        window = margin_window(4, -3, 3)
        step = make_initial(ICKind.STEP, *window)
        shifted = make_initial(ICKind.STEP, *window, y=2)

        for seed in range(5):
            field_ = generate_field(seed, 0, window, 4)
            report = check_comparison(field_, step, shifted, -2, 2, 4)

            self.assertTrue(report.passed)

        self.assertRaises(
            ValueError,
            check_comparison,
            field_,
            step,
            shifted,
            2,
            2,
            4,
        )


class TailTableTestCase(TestCase):
    def test_rows(self) -> None:
        row = TailRow(1, 10, 0)

        self.assertEqual(row.phat, 0)
        self.assertTrue(isnan(row.log_phat))
        self.assertAlmostEqual(TailRow(1, 10, 5).log_phat, log(0.5))

    def test_from_samples(self) -> None:
        table = TailTable.from_samples([0, 1, 1, 2], [2, 0, 1])

        self.assertEqual([row.u for row in table.rows], [0, 1, 2])
        self.assertEqual([row.count for row in table.rows], [4, 3, 1])
        self.assertTrue(table.monotone())
        self.assertRaises(ValueError, TailTable.from_samples, [], [1])

    def test_fit_and_monotone(self) -> None:
        table = TailTable(
            [TailRow(1, 100, 50), TailRow(2, 100, 20), TailRow(3, 100, 0)],
        )
        fit = table.fit(1)

        self.assertAlmostEqual(fit.slope, log(0.2) - log(0.5))
        self.assertTrue(table.monotone())
        self.assertFalse(
            TailTable([TailRow(1, 100, 20), TailRow(2, 100, 50)]).monotone(2),
        )

    def test_write_csv(self) -> None:
        table = TailTable.from_samples([0.5, 1.5], [1])

        with TemporaryDirectory() as directory:
            path = Path(directory) / 'tail.csv'

            table.write_csv(path)

            with open(path, newline='') as file:
                rows = list(reader(file))

        self.assertEqual(tuple(rows[0]), TailTable.CSV_HEADER)
        self.assertEqual(rows[1][:3], ['1.0', '2', '1'])


class ExperimentTestCase(TestCase):
    def test_slow_decorrelation(self) -> None:
        self.assertEqual(sample_slow_decorrelation(0.2, 10, 0, 0, 0), 0)
        self.assertAlmostEqual(default_tau_rule(32), 16)

        table = experiment_slow_decorrelation(0, [27, 8], replicas=10)

        self.assertEqual([row.t for row in table.rows], [8, 27])
        self.assertEqual([row.n for row in table.rows], [10, 10])
        self.assertAlmostEqual(table.rows[0].tau, 8 ** 0.8)
        self.assertRaises(
            ValueError,
            experiment_slow_decorrelation,
            1,
            [8],
        )
        self.assertRaises(
            ValueError,
            experiment_slow_decorrelation,
            0,
            [8],
            lambda t: 2 * t,
        )

    def test_decorrelation_monotone(self) -> None:
        table = DecorrelationTable(
            0,
            1,
            [
                DecorrelationRow(8, 5, 100, 40),
                DecorrelationRow(27, 14, 100, 30),
            ],
        )

        self.assertTrue(table.monotone())
        self.assertFalse(
            DecorrelationTable(
                0,
                1,
                [
                    DecorrelationRow(8, 5, 1000, 100),
                    DecorrelationRow(27, 14, 1000, 300),
                ],
            ).monotone(),
        )

    def test_sample_path(self) -> None:
        path = sample_path(0.5, 16, 0, 0)

        self.assertEqual(path.end_site, 8)
        self.assertEqual(path.end_time, 16)
        self.assertEqual(
            sample_path(0.5, 16, 0, 0, variant=PathVariant.ORIGIN)
            .origin_site,
            0,
        )

    def test_midtime_and_tube(self) -> None:
        midtime = experiment_midtime_tail(0, 20, [0.5, 1], 10, 3)
        tube = experiment_tube_localization(0, 20, [0.5, 1], 10, 3)

        self.assertEqual(len(midtime.rows), 2)
        self.assertEqual(midtime.rows[0].n, 10)
        self.assertTrue(midtime.monotone())
        self.assertTrue((tube.samples >= midtime.samples).all())
        self.assertRaises(
            ValueError,
            experiment_midtime_tail,
            1,
            20,
            [1],
            10,
        )
        self.assertRaises(
            ValueError,
            experiment_tube_localization,
            -1,
            20,
            [1],
            10,
        )

    def test_stationary_exit(self) -> None:
        table = experiment_stationary_exit(0.5, 10, [0, 1], 10)

        self.assertEqual(table.rows[0].count, 10)
        self.assertTrue((table.samples >= 0).all())
        self.assertRaises(
            ValueError,
            experiment_stationary_exit,
            1,
            10,
            [1],
            10,
        )

    def test_concatenation_ys(self) -> None:
        ys = concatenation_ys(np.random.Generator(np.random.Philox(0)), 3, 4.5)

        self.assertEqual(len(ys), 20)
        self.assertTrue(all(-2 <= y <= 8 for y in ys))


if __name__ == '__main__':
    main()  # pragma: no cover
