from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase, main

from hypothesis import given, settings, strategies as st
import numpy as np

from taseplib.kinetics import (
    auxiliary_generator,
    BoundaryInfluenceError,
    check_window,
    Checkpoint,
    coupled_evolve,
    EVENT_DTYPE,
    EventClass,
    evolve,
    generate_field,
    heights_ordered,
    margin_window,
    PoissonField,
    replay_step_from,
    TrajectoryLog,
)
from taseplib.lattice_core import (
    ColorConfig,
    height_from_counts,
    HeightState,
    ICKind,
    make_initial,
    PackedColor,
    second_class_position,
)


class PoissonFieldTestCase(TestCase):
    def test_validation(self) -> None:
        self.assertRaises(ValueError, PoissonField, -1, 0, (0, 1), 1)
        self.assertRaises(ValueError, PoissonField, 0, -1, (0, 1), 1)
        self.assertRaises(ValueError, PoissonField, 0, 0, (1, 0), 1)
        self.assertRaises(ValueError, PoissonField, 0, 0, (0, 1), 0)
        self.assertRaises(ValueError, PoissonField, 0, 0, (0, 1), 2e6)

    def test_sites(self) -> None:
        field_ = generate_field(0, 0, (-3, 5), 10)

        self.assertEqual(field_.first_site, -4)
        self.assertEqual(field_.last_site, 5)
        self.assertRaises(ValueError, field_.site_events, 6)
        self.assertRaises(ValueError, field_.site_events, -5)

    def test_determinism(self) -> None:
        first = generate_field(7, 3, (-10, 10), 40)
        second = generate_field(7, 3, (-10, 10), 40)
        other = generate_field(7, 4, (-10, 10), 40)

        for block in range(3):
            first_times, first_sites = first.block_events(block)
            second_times, second_sites = second.block_events(block)

            np.testing.assert_array_equal(first_times, second_times)
            np.testing.assert_array_equal(first_sites, second_sites)

        self.assertFalse(
            np.array_equal(first.site_events(0), other.site_events(0)),
        )

    @settings(deadline=None, max_examples=20)
    @given(st.integers(-200, 200), st.integers(0, 100), st.integers(0, 3))
    def test_extension_keeps_events(
            self,
            site: int,
            extra: int,
            replica_id: int,
    ) -> None:
        field_ = generate_field(1, replica_id, (site, site + 1), 20)
        extended = field_.extend((site - extra, site + 1 + extra))

        np.testing.assert_array_equal(
            field_.site_events(site),
            extended.site_events(site),
        )
        self.assertRaises(ValueError, extended.extend, (site + 1, site + 1))

    def test_rate(self) -> None:
        field_ = generate_field(2, 0, (0, 0), 1000)
        times = field_.site_events(0)

        self.assertLess(abs(times.size - 1000), 150)
        self.assertTrue((np.diff(times) >= 0).all())
        self.assertTrue(((0 <= times) & (times <= 1000)).all())

    def test_events(self) -> None:
        field_ = generate_field(3, 0, (-5, 5), 40)
        batches = list(field_.events(10, 35))
        times = np.concatenate([batch[0] for batch in batches])
        sites = np.concatenate([batch[1] for batch in batches])

        self.assertEqual(len(batches), 3)
        self.assertTrue((np.diff(times) >= 0).all())
        self.assertTrue(((10 < times) & (times <= 35)).all())
        self.assertTrue(((-6 <= sites) & (sites <= 5)).all())
        self.assertRaises(ValueError, list, field_.events(0, 41))
        self.assertRaises(ValueError, list, field_.events(5, 4))

    def test_auxiliary_generator(self) -> None:
        first = auxiliary_generator(0, 1, 1).random(4)
        second = auxiliary_generator(0, 1, 1).random(4)
        other = auxiliary_generator(0, 1, 2).random(4)

        np.testing.assert_array_equal(first, second)
        self.assertFalse(np.array_equal(first, other))
        self.assertRaises(ValueError, auxiliary_generator, 0, 1, -1)

    def test_margin_window(self) -> None:
        self.assertEqual(margin_window(4, -2, 3), (-58, 59))
        self.assertEqual(margin_window(10, 0, 0, 2, 0), (-20, 20))
        self.assertRaises(ValueError, margin_window, 1, 1, 0)


class EvolveTestCase(TestCase):
    def test_validation(self) -> None:
        config = make_initial(ICKind.STEP, -5, 5)
        field_ = generate_field(0, 0, (-5, 5), 4)

        self.assertRaises(ValueError, evolve, config, field_, 2, 1)
        self.assertRaises(ValueError, evolve, config, field_, 0, 5)
        self.assertRaises(
            ValueError,
            evolve,
            config,
            generate_field(0, 0, (-5, 6), 4),
            0,
            1,
        )

    def test_closed_box_conserves_colors(self) -> None:
        config = make_initial(ICKind.IDENTITY, -6, 6)
        field_ = generate_field(4, 0, config.window, 10)
        result, log = evolve(config, field_, 0, 10)

        self.assertEqual(
            sorted(result.colors.tolist()),
            sorted(config.colors.tolist()),
        )
        self.assertEqual(log.injections, 0)
        self.assertEqual(log.exits, 0)
        self.assertIsNone(log.height)

    def test_step_heights_match_counts(self) -> None:
        window = margin_window(4, -5, 5)
        config = make_initial(ICKind.STEP, *window)
        field_ = generate_field(5, 0, window, 4)
        result, log = evolve(config, field_, 0, 4)

        check_window(log)

        assert log.height is not None

        for x in range(-10, 11):
            self.assertEqual(
                log.height.height(x),
                height_from_counts(result, x),
            )

        classes = log.events['event_class']
        growth = sum(
            height_from_counts(result, x) - abs(x) for x in range(-40, 41)
        )

        self.assertEqual(2 * int((classes == EventClass.GROWTH).sum()), growth)
        self.assertIn(int(EventClass.LOCAL_MAX), set(classes.tolist()))
        self.assertTrue((np.diff(log.events['time']) >= 0).all())

    def test_snapshots_and_observers(self) -> None:
        window = margin_window(4, -5, 5)
        config = make_initial(ICKind.STEP, *window)
        field_ = generate_field(6, 0, window, 4)
        seen: list[tuple[float, ColorConfig]] = []
        result, log = evolve(
            config,
            field_,
            0,
            4,
            [Checkpoint(2, lambda t, current, _: seen.append((t, current)))],
            snapshot_times=(1,),
        )
        middle, first_log = evolve(config, field_, 0, 2)
        end, second_log = evolve(middle, field_, 2, 4)

        self.assertEqual(seen, [(2, middle)])
        self.assertEqual(log.snapshots, {1: evolve(config, field_, 0, 1)[0]})
        self.assertEqual(result, end)
        self.assertEqual(len(log), len(first_log) + len(second_log))

    def test_reservoir_absorbs(self) -> None:
        config = ColorConfig(0, [2], PackedColor(1))
        result, log = evolve(config, generate_field(0, 0, (0, 0), 50), 0, 50)

        self.assertEqual(result.colors.tolist(), [1])
        self.assertEqual(result.absorbed, (2,))
        self.assertEqual(second_class_position(result), -1)
        self.assertEqual(log.injections, 1)

    def test_closed_edge_blocks(self) -> None:
        config = ColorConfig(0, [1, 1])
        field_ = generate_field(0, 0, (0, 1), 50)
        _, log = evolve(config, field_, 0, 50)

        self.assertGreater(log.blocked, 0)
        self.assertRaises(BoundaryInfluenceError, check_window, log)

    def test_trajectory_dump(self) -> None:
        window = margin_window(2, -3, 3)
        config = make_initial(ICKind.STEP, *window)
        _, log = evolve(config, generate_field(8, 0, window, 2), 0, 2)

        self.assertEqual(EVENT_DTYPE.itemsize, 16)
        self.assertGreater(len(log), 0)
        self.assertTrue(log.covers(2))
        self.assertFalse(log.covers(3))

        with TemporaryDirectory() as directory:
            path = Path(directory) / 'events.bin'

            log.dump(path)

            self.assertEqual(path.stat().st_size, 16 * len(log))

            loaded = TrajectoryLog.load(path, 0, 2)

        np.testing.assert_array_equal(loaded.events, log.events)

    def test_event_classes(self) -> None:
        config = ColorConfig(0, [1, 0])
        field_ = generate_field(9, 0, (0, 1), 5)
        _, log = evolve(config, field_, 0, 5)

        self.assertEqual(EventClass(1), EventClass.GROWTH)
        self.assertTrue(
            set(log.events['event_class'].tolist())
            <= {int(event_class) for event_class in EventClass},
        )


class CheckWindowTestCase(TestCase):
    def test_check_window(self) -> None:
        check_window(TrajectoryLog(0, 1))

        self.assertRaises(
            BoundaryInfluenceError,
            check_window,
            TrajectoryLog(0, 1, injections=1),
        )
        self.assertRaises(
            BoundaryInfluenceError,
            check_window,
            TrajectoryLog(0, 1, exits=2),
        )


class CouplingTestCase(TestCase):
    def test_heights_ordered(self) -> None:
        high = HeightState(0, np.array([True, False]), 2)
        low = HeightState(0, np.array([True, False]), 0)

        self.assertTrue(heights_ordered(high, low))
        self.assertFalse(heights_ordered(low, high))
        self.assertRaises(
            ValueError,
            heights_ordered,
            high,
            HeightState(1, np.array([True, False]), 0, anchor_site=1),
        )

    def test_coupled_evolve(self) -> None:
        window = margin_window(4, -5, 5)
        low = make_initial(ICKind.STEP, *window, y=-2)
        high = make_initial(ICKind.STEP, *window, y=2)
        field_ = generate_field(10, 0, window, 4)
        heights = [
            HeightState.from_config(low),
            HeightState.from_config(high),
        ]
        results = coupled_evolve([low, high], field_, 0, 4, heights=heights)

        self.assertEqual(results[0], evolve(low, field_, 0, 4)[0])
        self.assertTrue(
            heights_ordered(
                HeightState.from_config(results[1]),
                HeightState.from_config(results[0]),
            ),
        )
        self.assertRaises(
            ValueError,
            coupled_evolve,
            [low, make_initial(ICKind.STEP, -5, 5)],
            field_,
            0,
            4,
        )
        self.assertRaises(
            ValueError,
            coupled_evolve,
            [low, high],
            field_,
            0,
            4,
            heights=heights[:1],
        )

    def test_replay_step_from(self) -> None:
        window = margin_window(4, -5, 5)
        field_ = generate_field(11, 0, window, 4)
        start = replay_step_from(field_, 2, 3, 3)
        config = make_initial(ICKind.STEP, *window)
        _, log = evolve(config, field_, 0, 4)
        replayed = replay_step_from(field_, 0, 0, 4)

        assert log.height is not None

        for x in range(-5, 6):
            self.assertEqual(start.height(x), abs(x - 2))

        np.testing.assert_array_equal(
            replayed.profile(),
            log.height.profile(),
        )
        self.assertRaises(ValueError, replay_step_from, field_, 60, 0, 4)
        self.assertRaises(ValueError, replay_step_from, field_, 0, 3, 2)


if __name__ == '__main__':
    main()  # pragma: no cover
