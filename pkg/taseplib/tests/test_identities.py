from csv import reader
from functools import partial
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase, main

import numpy as np

from taseplib.identities import (
    compare_tables,
    closed_initial,
    closed_step,
    colored_counts,
    exact_shock1,
    exact_shock2,
    joint_shock1,
    lhs_shock,
    lhs_shock1,
    observation_window,
    rhs_shock1,
    RhsResult,
    ShockSpec1,
    ShockSpec2,
    step_counts,
)
from taseplib.lattice_core import (
    Boundary,
    ColorConfig,
    ICKind,
    INF,
    make_initial,
    PackedColor,
)
from taseplib.utilities import total_variation

MICRO_WINDOW = -3, 3
MICRO_SPEC = ShockSpec1(1, 1, 1.0, tuple(range(-2, 4)))


class ShockSpecTestCase(TestCase):
    def test_validation(self) -> None:
        self.assertRaises(ValueError, ShockSpec1, 0, 1, 1, (0,))
        self.assertRaises(ValueError, ShockSpec1, 1, 1, 0, (0,))
        self.assertRaises(ValueError, ShockSpec1, 1, 1, 1, ())
        self.assertRaises(ValueError, ShockSpec1, 1, 1, 1, (1, 0))
        self.assertRaises(ValueError, ShockSpec2, 1, 0, 1, (0,))

    def test_default_grid(self) -> None:
        spec = ShockSpec1.with_default_grid(2, 2, 4)

        self.assertEqual(spec.x_grid, tuple(range(-20, 21)))
        self.assertEqual(spec.block_span, (-3, 3))
        self.assertEqual(spec.count_span, (-22, 23))
        self.assertEqual(
            ShockSpec2.with_default_grid(2, 3, 4).x_grid[0],
            2 - 22,
        )

    def test_observation_window(self) -> None:
        spec = ShockSpec2(1, 2, 4, (0, 1))

        self.assertEqual(spec.block_span, (-4, 4))
        self.assertEqual(spec.count_span, (-3, 5))
        self.assertEqual(observation_window(spec), (-60, 61))

    def test_initial(self) -> None:
        colored = MICRO_SPEC.initial(MICRO_SPEC.colored_kind, MICRO_WINDOW)

        self.assertEqual(colored.colors.tolist(), [1, 1, INF, 2, 2, INF, INF])
        self.assertEqual(colored.left_boundary, PackedColor(1))

    def test_closed_rhs_at_time_zero(self) -> None:
        colored = closed_initial(
            MICRO_SPEC,
            MICRO_SPEC.colored_kind,
            MICRO_WINDOW,
        )
        values = [
            MICRO_SPEC.closed_rhs(closed_step(MICRO_WINDOW, x))
            for x in MICRO_SPEC.x_grid
        ]

        self.assertIs(colored.left_boundary, Boundary.CLOSED)
        self.assertIs(colored.right_boundary, Boundary.CLOSED)
        self.assertEqual(
            [event for event, _ in values],
            [True, True, True, False, False, False],
        )
        self.assertEqual(
            [list(joint) for _, joint in values],
            colored_counts(MICRO_SPEC, colored).tolist(),
        )
        self.assertRaises(ValueError, closed_step, MICRO_WINDOW, 5)

        spec = ShockSpec2(1, 1, 1, tuple(range(-2, 4)))
        colored = closed_initial(spec, spec.colored_kind, MICRO_WINDOW)

        self.assertEqual(
            [
                list(spec.closed_rhs(closed_step(MICRO_WINDOW, x))[1])
                for x in spec.x_grid
            ],
            colored_counts(spec, colored).tolist(),
        )


class StepCountsTestCase(TestCase):
    def test_step_counts(self) -> None:
        config = ColorConfig(
            -3,
            [1, 1, 1, 1, INF, INF, INF],
            PackedColor(1),
            Boundary.EMPTY,
            (1,),
        )

        self.assertEqual(
            step_counts(config, [-3, 0, 1, 10]).tolist(),
            [5, 2, 1, 1],
        )
        self.assertRaises(ValueError, step_counts, config, [-4])
        self.assertRaises(
            ValueError,
            step_counts,
            ColorConfig(0, [1]),
            [0],
        )

    def test_rhs_at_time_zero(self) -> None:
        step = make_initial(ICKind.STEP, *MICRO_WINDOW)
        events, joint = MICRO_SPEC.rhs(partial(step_counts, step))

        self.assertEqual(
            events.tolist(),
            [True, True, True, False, False, False],
        )
        self.assertEqual(
            joint.tolist(),
            [[1, 2], [0, 2], [0, 2], [0, 1], [0, 0], [0, 0]],
        )

        spec = ShockSpec2(1, 1, 1, tuple(range(-1, 4)))
        events, joint = spec.rhs(
            partial(step_counts, make_initial(ICKind.STEP, -4, 4)),
        )

        self.assertEqual(events.tolist(), [True, True, True, False, False])
        self.assertEqual(joint.shape, (5, 3))


class RhsResultTestCase(TestCase):
    def test_result(self) -> None:
        result = RhsResult(
            (0, 1, 2),
            np.array(
                [
                    [True, True, False],
                    [False, False, False],
                    [True, False, True],
                ],
            ),
            np.zeros((3, 3, 2), dtype=np.int64),
        )

        self.assertEqual(len(result), 3)
        np.testing.assert_allclose(result.table, [2 / 3, 1 / 3, 1 / 3])
        self.assertEqual(
            result.pseudo_positions.samples.tolist(),
            [1, -1, 2],
        )
        self.assertEqual(result.violations, 1)


class ShockSamplingTestCase(TestCase):
    def test_short_time(self) -> None:
        spec = ShockSpec1(1, 1, 0.01, tuple(range(-2, 4)))
        positions = lhs_shock(spec, 200, 0, micro_window=MICRO_WINDOW)

        self.assertEqual(len(positions), 200)
        self.assertGreater(positions.pmf().get(0.0, 0), 0.95)

    def test_simulation_matches_oracle(self) -> None:
        exact = exact_shock1(MICRO_SPEC, MICRO_WINDOW)
        positions = lhs_shock1(
            MICRO_SPEC,
            4000,
            1,
            micro_window=MICRO_WINDOW,
        )

        self.assertLess(
            total_variation(positions.pmf(), exact.second_class_law),
            0.05,
        )

    def test_tables_agree(self) -> None:
        lhs = lhs_shock(MICRO_SPEC, 2000, 2, micro_window=MICRO_WINDOW)
        rhs = rhs_shock1(MICRO_SPEC, 2000, 2, micro_window=MICRO_WINDOW)
        report = compare_tables(
            lhs,
            rhs,
            rng=np.random.Generator(np.random.Philox(0)),
            resamples=100,
        )

        self.assertEqual(len(report.verdicts), len(MICRO_SPEC.x_grid) + 2)
        self.assertEqual(report.verdicts[-1].name, 'pseudo_position')
        self.assertLess(np.abs(report.lhs_prob - report.rhs_prob).max(), 0.06)

        with TemporaryDirectory() as directory:
            path = Path(directory) / 'tails.csv'

            report.write_csv(path)

            with open(path, newline='') as file:
                rows = list(reader(file))

        self.assertEqual(tuple(rows[0]), report.CSV_HEADER)
        self.assertEqual(len(rows), len(MICRO_SPEC.x_grid) + 1)

    def test_joint(self) -> None:
        joint = joint_shock1(MICRO_SPEC, 300, 3, micro_window=MICRO_WINDOW)
        verdicts = joint.verdicts()

        self.assertEqual(joint.lhs.shape, (300, 6, 2))
        self.assertEqual(joint.rhs.shape, (300, 6, 2))
        self.assertEqual(len(verdicts), 18)
        self.assertEqual(verdicts[0].name, 'joint_component_1_x-2')
        self.assertEqual(verdicts[2].name, 'joint_sum_x-2')

    def test_type_checks(self) -> None:
        spec = ShockSpec2(1, 1, 1, (0,))

        self.assertRaises(ValueError, lhs_shock1, spec, 1, 0)
        self.assertRaises(ValueError, exact_shock2, MICRO_SPEC, MICRO_WINDOW)
        self.assertRaises(ValueError, lhs_shock, MICRO_SPEC, 0, 0)


class ExactIdentityTestCase(TestCase):
    def test_one_shock(self) -> None:
        exact = exact_shock1(MICRO_SPEC, MICRO_WINDOW)

        self.assertAlmostEqual(sum(exact.second_class_law.values()), 1, 6)
        self.assertTrue((np.diff(exact.lhs_tail) <= 1e-12).all())
        self.assertGreater(exact.lhs_tail[0] - exact.lhs_tail[-1], 0.5)
        self.assertLess(exact.tail_distance, 1e-6)
        self.assertLess(exact.joint_distance, 1e-6)
        self.assertTrue(exact.passed)

    def test_two_shock(self) -> None:
        exact = exact_shock2(
            ShockSpec2(1, 1, 1.0, tuple(range(-2, 4))),
            MICRO_WINDOW,
        )

        self.assertAlmostEqual(sum(exact.second_class_law.values()), 1, 6)
        self.assertLess(exact.tail_distance, 1e-6)
        self.assertLess(exact.joint_distance, 1e-6)
        self.assertTrue(exact.passed)

    def test_window_too_small(self) -> None:
        self.assertRaises(ValueError, exact_shock1, MICRO_SPEC, (-1, 3))


if __name__ == '__main__':
    main()  # pragma: no cover
