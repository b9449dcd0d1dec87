from unittest import TestCase, main

from hypothesis import given, strategies as st
import numpy as np

from taseplib.lattice_core import (
    apply_swap,
    Boundary,
    ColorConfig,
    count_colored,
    count_particles,
    height_from_counts,
    HeightState,
    ICKind,
    INF,
    invert,
    make_initial,
    PackedColor,
    project,
    second_class_position,
    sort_descending,
)


class ColorConfigTestCase(TestCase):
    def test_window(self) -> None:
        config = ColorConfig(-1, [3, INF, 1])

        self.assertEqual(config.window, (-1, 1))
        self.assertEqual(config.sites.tolist(), [-1, 0, 1])
        self.assertEqual(config.color_at(1), 1)
        self.assertEqual(config.index(0), 1)
        self.assertFalse(config.contains(2))
        self.assertRaises(ValueError, config.index, 2)
        self.assertEqual(config.occupancy().tolist(), [True, False, True])
        self.assertEqual(config.occupancy(2).tolist(), [False, False, True])

    def test_validation(self) -> None:
        self.assertRaises(ValueError, ColorConfig, 0, [])
        self.assertRaises(ValueError, ColorConfig, 0, [1], Boundary.EMPTY)
        self.assertRaises(ValueError, ColorConfig, 0, [1], exited=(1,))
        self.assertRaises(ValueError, PackedColor, INF)

    def test_equality(self) -> None:
        first = ColorConfig(0, [1, 2], right_boundary=Boundary.EMPTY)
        second = ColorConfig(0, [1, 2], right_boundary=Boundary.EMPTY)

        self.assertEqual(first, second)
        self.assertEqual(hash(first), hash(second))
        self.assertNotEqual(first, ColorConfig(1, [1, 2]))
        self.assertNotEqual(first, first.with_colors([2, 1]))
        self.assertEqual(len({first, second}), 1)

    def test_is_bijection(self) -> None:
        self.assertTrue(make_initial(ICKind.IDENTITY, -2, 2).is_bijection)
        self.assertFalse(ColorConfig(0, [1, 1]).is_bijection)
        self.assertFalse(ColorConfig(0, [1, INF]).is_bijection)

    def test_colors_are_read_only(self) -> None:
        config = ColorConfig(0, [1, 2])

        self.assertRaises(ValueError, config.colors.__setitem__, 0, 3)


class MakeInitialTestCase(TestCase):
    def test_step(self) -> None:
        config = make_initial(ICKind.STEP, -2, 3, y=1)

        self.assertEqual(config.colors.tolist(), [1, 1, 1, 1, INF, INF])
        self.assertEqual(config.left_boundary, PackedColor(1))
        self.assertIs(config.right_boundary, Boundary.EMPTY)
        self.assertRaises(ValueError, make_initial, ICKind.STEP, 0, 3, y=3)
        self.assertRaises(ValueError, make_initial, ICKind.STEP, 3, 0)

    def test_one_shock(self) -> None:
        second_class = make_initial(
            ICKind.ONE_SHOCK_SECOND_CLASS,
            -3,
            3,
            m_plus=2,
            m_minus=1,
        )
        colored = make_initial(
            ICKind.ONE_SHOCK_COLORED,
            -3,
            3,
            m_plus=2,
            m_minus=1,
        )

        self.assertEqual(
            second_class.colors.tolist(),
            [1, 1, INF, 2, 1, 1, INF],
        )
        self.assertEqual(colored.colors.tolist(), [1, 1, INF, 2, 2, 2, INF])
        self.assertEqual(second_class_position(second_class), 0)
        self.assertRaises(
            ValueError,
            make_initial,
            ICKind.ONE_SHOCK_COLORED,
            -2,
            3,
            m_plus=2,
            m_minus=2,
        )
        self.assertRaises(
            ValueError,
            make_initial,
            ICKind.ONE_SHOCK_COLORED,
            -3,
            3,
            m_plus=0,
            m_minus=1,
        )

    def test_two_shock(self) -> None:
        second_class = make_initial(
            ICKind.TWO_SHOCK_SECOND_CLASS,
            -4,
            4,
            m=1,
            n=2,
        )
        colored = make_initial(ICKind.TWO_SHOCK_COLORED, -4, 4, m=1, n=2)

        self.assertEqual(
            second_class.colors.tolist(),
            [1, INF, INF, 1, INF, 2, 1, 1, INF],
        )
        self.assertEqual(
            colored.colors.tolist(),
            [1, INF, INF, 2, INF, 3, 3, 3, INF],
        )
        self.assertEqual(second_class_position(second_class), 1)
        self.assertRaises(
            ValueError,
            make_initial,
            ICKind.TWO_SHOCK_COLORED,
            -4,
            4,
            m=1,
        )

    def test_bernoulli(self) -> None:
        rng = np.random.Generator(np.random.Philox(0))
        config = make_initial(
            ICKind.BERNOULLI,
            0,
            9999,
            density=0.3,
            rng=rng,
        )

        self.assertIs(config.left_boundary, Boundary.CLOSED)
        self.assertIs(config.right_boundary, Boundary.CLOSED)
        self.assertAlmostEqual(config.occupancy().mean(), 0.3, delta=0.02)
        self.assertRaises(
            ValueError,
            make_initial,
            ICKind.BERNOULLI,
            0,
            9,
            density=1,
            rng=rng,
        )
        self.assertRaises(
            ValueError,
            make_initial,
            ICKind.BERNOULLI,
            0,
            9,
            density=0.5,
        )

    def test_boundary_override(self) -> None:
        config = make_initial(
            ICKind.STEP,
            0,
            3,
            left_boundary=Boundary.CLOSED,
            right_boundary=Boundary.CLOSED,
        )

        self.assertIs(config.left_boundary, Boundary.CLOSED)
        self.assertIs(config.right_boundary, Boundary.CLOSED)


class CountTestCase(TestCase):
    def test_count_particles(self) -> None:
        config = ColorConfig(
            -1,
            [1, INF, 2, INF],
            PackedColor(1),
            Boundary.EMPTY,
            (3, 1),
        )

        self.assertEqual(count_particles(config, -1), 4)
        self.assertEqual(count_particles(config, 0), 3)
        self.assertEqual(count_particles(config, 5), 2)
        self.assertEqual(count_particles(config, 0, threshold=3), 2)
        self.assertRaises(ValueError, count_particles, config, -2)
        self.assertRaises(
            ValueError,
            count_particles,
            ColorConfig(0, [1]),
            0,
        )

    def test_count_colored(self) -> None:
        config = ColorConfig(
            -1,
            [1, 2, 2, INF],
            PackedColor(1),
            Boundary.EMPTY,
            (2,),
        )

        self.assertEqual(count_colored(config, 2, -1), 3)
        self.assertEqual(count_colored(config, 2, 1), 2)
        self.assertEqual(count_colored(config, 1, -1), 1)
        self.assertEqual(count_colored(config, 2, -5), 3)
        self.assertRaises(ValueError, count_colored, config, 1, -2)

    def test_second_class_position(self) -> None:
        absorbed = ColorConfig(-1, [1, 1], PackedColor(1), absorbed=(2,))
        exited = ColorConfig(
            -1,
            [1, INF],
            PackedColor(1),
            Boundary.EMPTY,
            (2,),
        )

        self.assertEqual(second_class_position(absorbed), -2)
        self.assertEqual(second_class_position(exited), 1)
        self.assertEqual(second_class_position(ColorConfig(0, [1, 2])), 1)
        self.assertRaises(
            ValueError,
            ColorConfig,
            0,
            [1],
            absorbed=(2,),
        )
        self.assertRaises(
            ValueError,
            second_class_position,
            ColorConfig(0, [2, 2]),
        )
        self.assertRaises(
            ValueError,
            second_class_position,
            ColorConfig(0, [1, 1]),
        )

    def test_project(self) -> None:
        config = ColorConfig(
            0,
            [1, 3, 2, INF],
            PackedColor(2),
            Boundary.EMPTY,
            (1, 3),
        )
        projected = project(config, 3)

        self.assertEqual(projected.colors.tolist(), [1, INF, 1, INF])
        self.assertEqual(projected.left_boundary, PackedColor(1))
        self.assertEqual(projected.exited, (1,))
        self.assertIs(project(config, 2).left_boundary, Boundary.CLOSED)
        self.assertEqual(
            project(ColorConfig(0, [2], PackedColor(2), absorbed=(3,))),
            ColorConfig(0, [1], PackedColor(1)),
        )


class SwapTestCase(TestCase):
    def test_apply_swap(self) -> None:
        config = ColorConfig(0, [1, INF, 3])

        self.assertEqual(apply_swap(config, 0).colors.tolist(), [INF, 1, 3])
        self.assertIs(apply_swap(config, 1), config)
        self.assertRaises(ValueError, apply_swap, config, 2)

    def test_sort_descending(self) -> None:
        config = ColorConfig(0, [1, 2, 3, 4])

        self.assertEqual(
            sort_descending(config, 1, 3).colors.tolist(),
            [1, 4, 3, 2],
        )
        self.assertRaises(ValueError, sort_descending, config, 2, 1)
        self.assertRaises(ValueError, sort_descending, config, 0, 4)

    @given(st.permutations(list(range(-3, 4))))
    def test_invert(self, colors: list[int]) -> None:
        config = ColorConfig(-3, colors)
        inverse = invert(config)

        self.assertEqual(invert(inverse), config)

        for z in config.sites:
            self.assertEqual(inverse.color_at(config.color_at(int(z))), z)

    def test_invert_non_bijection(self) -> None:
        self.assertRaises(ValueError, invert, ColorConfig(0, [0, 0]))
        self.assertRaises(ValueError, invert, ColorConfig(0, [1, 2]))


class HeightStateTestCase(TestCase):
    def test_step_profile(self) -> None:
        config = make_initial(ICKind.STEP, -2, 2)
        state = HeightState.from_config(config)

        self.assertEqual(state.anchor_value, 0)
        self.assertEqual(state.profile().tolist(), [3, 2, 1, 0, 1, 2])
        self.assertEqual(state.heights([-5, 4]).tolist(), [5, 4])
        self.assertEqual(state.height(0), height_from_counts(config, 0))

    def test_advance(self) -> None:
        config = make_initial(ICKind.STEP, -2, 2)
        state = HeightState.from_config(config)
        moved = state.advance(
            np.array([True, True, False, True, False]),
            1,
        )

        self.assertEqual(moved.jump_counter, 1)
        self.assertEqual(moved.profile().tolist(), [3, 2, 1, 2, 1, 2])
        self.assertRaises(ValueError, state.advance, np.array([True]), 0)

    def test_undetermined_heights(self) -> None:
        state = HeightState.from_config(ColorConfig(-2, [1, INF, 1, INF]))

        self.assertEqual(state.anchor_value, 0)
        self.assertRaises(ValueError, state.height, -4)
        self.assertRaises(ValueError, state.height, 3)

    def test_anchor_outside_window(self) -> None:
        self.assertRaises(
            ValueError,
            HeightState,
            0,
            np.array([True, False]),
            0,
            anchor_site=5,
        )

    @given(
        st.integers(-5, 0),
        st.lists(st.booleans(), min_size=6, max_size=20),
        st.integers(0, 3),
    )
    def test_heights_match_counts(
            self,
            window_lo: int,
            occupancy: list[bool],
            exits: int,
    ) -> None:
        colors = np.where(occupancy, 1, INF)
        config = ColorConfig(
            window_lo,
            colors,
            PackedColor(1),
            Boundary.EMPTY,
            (1,) * exits,
        )
        state = HeightState.from_config(config)

        for x in range(window_lo - 1, config.window_hi + 1):
            self.assertEqual(state.height(x), height_from_counts(config, x))


if __name__ == '__main__':
    main()  # pragma: no cover
