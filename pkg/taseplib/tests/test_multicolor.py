from unittest import TestCase, main

from hypothesis import given, strategies as st
import numpy as np

from taseplib.kinetics import generate_field
from taseplib.lattice_core import ColorConfig, ICKind, make_initial
from taseplib.multicolor import (
    apply_seq,
    check_symmetry_deterministic,
    check_symmetry_random,
    Order,
    sample_gen_pair,
    SymmetryReport,
    TranspositionSeq,
)
from taseplib.utilities import EmpiricalDistribution, total_variation


class TranspositionSeqTestCase(TestCase):
    def test_span(self) -> None:
        self.assertEqual(TranspositionSeq((3, -1, 2)).span, (-1, 4))
        self.assertEqual(TranspositionSeq(()).span, (0, 0))
        self.assertEqual(
            TranspositionSeq((3, -1, 2)).reversed(),
            TranspositionSeq((2, -1, 3)),
        )

    def test_sorter(self) -> None:
        seq = TranspositionSeq.sorter(-2, 2)
        identity = make_initial(ICKind.IDENTITY, -2, 2)

        self.assertEqual(len(seq), 10)
        self.assertEqual(
            apply_seq(identity, seq).colors.tolist(),
            [2, 1, 0, -1, -2],
        )
        self.assertEqual(TranspositionSeq.sorter(4, 4).bonds, ())
        self.assertRaises(ValueError, TranspositionSeq.sorter, 1, 0)

    def test_random(self) -> None:
        rng = np.random.Generator(np.random.Philox(0))

        for _ in range(100):
            seq = TranspositionSeq.random(rng, 5, -2, 3)

            self.assertTrue(1 <= len(seq) <= 5)
            self.assertTrue(all(-2 <= z <= 3 for z in seq.bonds))

        self.assertRaises(ValueError, TranspositionSeq.random, rng, 0, 0, 1)
        self.assertRaises(ValueError, TranspositionSeq.random, rng, 1, 1, 0)


class SymmetryTestCase(TestCase):
    def test_apply_seq(self) -> None:
        identity = make_initial(ICKind.IDENTITY, 0, 2)
        seq = TranspositionSeq((0, 1))

        self.assertEqual(apply_seq(identity, seq).colors.tolist(), [1, 2, 0])
        self.assertEqual(
            apply_seq(identity, seq, Order.REVERSED).colors.tolist(),
            [2, 0, 1],
        )
        self.assertRaises(ValueError, apply_seq, ColorConfig(0, [1, 1]), seq)

    @given(st.lists(st.integers(-6, 5), min_size=1, max_size=30))
    def test_deterministic(self, bonds: list[int]) -> None:
        self.assertTrue(check_symmetry_deterministic(TranspositionSeq(bonds)))

    def test_random_report(self) -> None:
        report = check_symmetry_random(0, 50, 20, (-5, 4))

        self.assertTrue(report.passed)
        self.assertEqual(report.count, 50)
        self.assertEqual(report.failures, 0)
        self.assertIsNone(report.first_failure)
        self.assertEqual(SymmetryReport.BOND_RANGE, (-20, 19))


class GenPairTestCase(TestCase):
    def test_zero_time(self) -> None:
        seq = TranspositionSeq((0, 1, -1, 0, 2))
        fields = (
            generate_field(0, 0, (-3, 3), 1),
            generate_field(0, 1, (-3, 3), 1),
        )
        first, second = sample_gen_pair(seq, 0, fields)

        self.assertEqual(first, second)
        self.assertRaises(ValueError, sample_gen_pair, seq, -1, fields)
        self.assertRaises(
            ValueError,
            sample_gen_pair,
            seq,
            1,
            (fields[0], generate_field(0, 1, (-3, 4), 1)),
        )

    def test_equal_laws(self) -> None:
        seq = TranspositionSeq((0, 1, -1, 0, 2, -2))
        window = -3, 3
        first_colors = []
        second_colors = []

        for replica_id in range(1000):
            first, second = sample_gen_pair(
                seq,
                1,
                (
                    generate_field(0, 2 * replica_id, window, 1),
                    generate_field(0, 2 * replica_id + 1, window, 1),
                ),
            )

            self.assertTrue(first.is_bijection)
            self.assertTrue(second.is_bijection)

            first_colors.append(first.color_at(0))
            second_colors.append(second.color_at(0))

        self.assertLess(
            total_variation(
                EmpiricalDistribution.from_values(first_colors).pmf(),
                EmpiricalDistribution.from_values(second_colors).pmf(),
            ),
            0.12,
        )


if __name__ == '__main__':
    main()  # pragma: no cover
