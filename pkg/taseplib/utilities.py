"""This module implements various statistical utilities."""

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from math import sqrt
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy import stats

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """The class for weighted collections of real-valued samples.

    >>> distribution = EmpiricalDistribution.from_values([0, 0, 1])
    >>> round(float(distribution.ecdf(0)), 6)
    0.666667
    >>> round(float(distribution.tail(1)), 6)
    0.333333
    """

    samples: FloatArray
    """The samples."""
    weights: FloatArray | None = None
    """The nonnegative weights, uniform if ``None``."""

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64).ravel()

        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

        if self.weights is not None:
            weights = np.array(self.weights, dtype=np.float64).ravel()

            if weights.shape != samples.shape:
                raise ValueError('weights and samples differ in shape')
            elif (weights < 0).any():
                raise ValueError('negative weights')
            elif samples.size and not weights.sum() > 0:
                raise ValueError('weights sum to zero')

            weights.setflags(write=False)
            object.__setattr__(self, 'weights', weights)

    @classmethod
    def from_values(
            cls,
            values: Iterable[float],
            weights: Iterable[float] | None = None,
    ) -> 'EmpiricalDistribution':
        """Create a distribution from an iterable of values.

        :param values: The sample values.
        :param weights: The optional weights.
        :return: The distribution.
        """
        return cls(
            np.fromiter(values, dtype=np.float64),
            None if weights is None else np.fromiter(weights, np.float64),
        )

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def probabilities(self) -> FloatArray:
        """Get the normalized weight of each sample.

        :return: The probabilities, summing to one.
        """
        if self.weights is None:
            return np.full(len(self), 1 / max(len(self), 1))

        return self.weights / self.weights.sum()

    def _sorted(self) -> tuple[FloatArray, FloatArray]:
        order = np.argsort(self.samples, kind='stable')

        return self.samples[order], np.cumsum(self.probabilities[order])

    def ecdf(self, x: npt.ArrayLike) -> FloatArray:
        """Evaluate ``P(X <= x)``.

        :param x: The evaluation points.
        :return: The empirical distribution function at ``x``.
        """
        values, cumulative = self._sorted()
        indices = np.searchsorted(values, x, side='right')

        return np.where(indices > 0, cumulative[indices - 1], 0.0)

    def tail(self, x: npt.ArrayLike) -> FloatArray:
        """Evaluate ``P(X >= x)``.

        :param x: The evaluation points.
        :return: The empirical tail probability at ``x``.
        """
        values, cumulative = self._sorted()
        indices = np.searchsorted(values, x, side='left')

        return 1 - np.where(indices > 0, cumulative[indices - 1], 0.0)

    def pmf(self) -> dict[float, float]:
        """Get the probability mass of each distinct value.

        :return: The masses keyed by value.
        """
        values, inverse = np.unique(self.samples, return_inverse=True)
        masses = np.bincount(inverse, weights=self.probabilities)

        return dict(zip(values.tolist(), masses.tolist()))

    def quantile(self, p: float) -> float:
        """Get the smallest sample value ``x`` with ``P(X <= x) >= p``.

        :param p: The probability level.
        :return: The quantile.
        """
        if not 0 <= p <= 1:
            raise ValueError('probability level not in [0, 1]')

        values, cumulative = self._sorted()
        index = min(int(np.searchsorted(cumulative, p)), values.size - 1)

        return float(values[index])

    def moments(self) -> 'Moments':
        """Get the first four standardized moments.

        :return: The moments.
        """
        return moments(self.samples, self.weights)

    def map(self, function: Callable[[FloatArray], FloatArray]) -> (
            'EmpiricalDistribution'
    ):
        """Apply a vectorized map to every sample, keeping weights.

        :param function: The map.
        :return: The pushed-forward distribution.
        """
        return EmpiricalDistribution(function(self.samples), self.weights)


def ecdf(samples: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Get the distinct values of ``samples`` with their ECDF values.

    >>> values, cumulative = ecdf([1, 0, 1])
    >>> values.tolist(), cumulative.tolist()
    ([0.0, 1.0], [0.3333333333333333, 1.0])

    :param samples: The samples.
    :return: The sorted distinct values and ``P(X <= value)``.
    """
    values, counts = np.unique(
        np.asarray(samples, dtype=np.float64),
        return_counts=True,
    )

    if not values.size:
        return values, values.copy()

    return values, np.cumsum(counts) / counts.sum()


def ks_distance(
        first: EmpiricalDistribution,
        second: EmpiricalDistribution,
) -> float:
    """Get the two-sample Kolmogorov-Smirnov distance.

    Ties are handled exactly by evaluating both ECDFs on the pooled support.

    >>> distance = ks_distance(
    ...     EmpiricalDistribution.from_values([0, 0, 1]),
    ...     EmpiricalDistribution.from_values([0, 1, 1]),
    ... )
    >>> round(distance, 6)
    0.333333

    :param first: The first distribution.
    :param second: The second distribution.
    :return: ``sup |F_1 - F_2|``.
    """
    if not len(first) or not len(second):
        raise ValueError('empty distribution')

    support = np.union1d(first.samples, second.samples)

    return float(np.abs(first.ecdf(support) - second.ecdf(support)).max())


@dataclass(frozen=True)
class Verdict:
    """The class for the outcome of a statistical test."""

    name: str
    """The test name."""
    statistic: float
    """The observed statistic."""
    band: float
    """The acceptance threshold of the statistic."""
    passed: bool
    """The verdict."""
    p_value: float | None = None
    """The p-value if the test provides one."""


def ks_band(first_count: int, second_count: int, level: float = 0.01) -> (
        float
):
    """Get the asymptotic two-sample KS critical distance.

    :param first_count: The first sample size.
    :param second_count: The second sample size.
    :param level: The significance level.
    :return: The critical distance.
    """
    if first_count <= 0 or second_count <= 0:
        raise ValueError('sample sizes must be positive')

    factor = sqrt((first_count + second_count) / (first_count * second_count))

    return float(stats.kstwobign.ppf(1 - level)) * factor


def ks_two_sample(
        first: EmpiricalDistribution,
        second: EmpiricalDistribution,
        rng: np.random.Generator,
        resamples: int = 1000,
        level: float = 0.01,
        name: str = 'ks_two_sample',
) -> Verdict:
    """Run the two-sample KS test with a permutation band.

    The band is the ``1 - level`` quantile of the KS distance over random
    relabelings of the pooled samples, which is exact for discrete data.

    :param first: The first distribution.
    :param second: The second distribution.
    :param rng: The generator driving the permutations.
    :param resamples: The number of permutations.
    :param level: The significance level.
    :param name: The reported test name.
    :return: The outcome.
    """
    if resamples < 1:
        raise ValueError('resamples must be positive')

    statistic = ks_distance(first, second)
    pooled = np.concatenate((first.samples, second.samples))
    pooled_weights = np.concatenate(
        (
            first.probabilities * len(first),
            second.probabilities * len(second),
        ),
    )
    _, inverse = np.unique(pooled, return_inverse=True)
    support_size = int(inverse.max()) + 1
    count = len(first)
    permuted_statistics = np.empty(resamples)

    for i in range(resamples):
        order = rng.permutation(pooled.size)
        head = order[:count]
        tail = order[count:]
        head_masses = np.bincount(
            inverse[head],
            weights=pooled_weights[head],
            minlength=support_size,
        )
        tail_masses = np.bincount(
            inverse[tail],
            weights=pooled_weights[tail],
            minlength=support_size,
        )
        difference = (
            np.cumsum(head_masses) / head_masses.sum()
            - np.cumsum(tail_masses) / tail_masses.sum()
        )
        permuted_statistics[i] = np.abs(difference).max()

    band = float(np.quantile(permuted_statistics, 1 - level))
    p_value = (1 + int((permuted_statistics >= statistic).sum())) / (
        resamples + 1
    )

    return Verdict(name, statistic, band, statistic <= band, p_value)


def bootstrap_band(
        samples: npt.ArrayLike,
        statistic: Callable[[FloatArray], float],
        rng: np.random.Generator,
        resamples: int = 1000,
        level: float = 0.05,
) -> tuple[float, float]:
    """Get a percentile bootstrap band of a statistic.

    :param samples: The samples.
    :param statistic: The statistic of a sample array.
    :param rng: The generator driving the resampling.
    :param resamples: The number of resamples.
    :param level: One minus the coverage of the band.
    :return: The lower and upper ends.
    """
    values = np.asarray(samples, dtype=np.float64)

    if not values.size:
        raise ValueError('no samples')

    replicates = np.array(
        [
            statistic(rng.choice(values, values.size, replace=True))
            for _ in range(resamples)
        ],
    )
    lower, upper = np.quantile(replicates, [level / 2, 1 - level / 2])

    return float(lower), float(upper)


@dataclass(frozen=True)
class Moments:
    """The class for the first four moments of a sample."""

    mean: float
    """The mean."""
    variance: float
    """The (unbiased) variance."""
    skewness: float
    """The skewness."""
    excess_kurtosis: float
    """The excess (Fisher) kurtosis."""


def moments(
        samples: npt.ArrayLike,
        weights: npt.ArrayLike | None = None,
) -> Moments:
    """Get the moments of a sample.

    :param samples: The samples.
    :param weights: The optional weights.
    :return: The moments.
    """
    values = np.asarray(samples, dtype=np.float64)

    if values.size < 2:
        raise ValueError('at least two samples required')

    if weights is None:
        description = stats.describe(values)

        return Moments(
            float(description.mean),
            float(description.variance),
            float(description.skewness),
            float(description.kurtosis),
        )

    probabilities = np.asarray(weights, dtype=np.float64)
    probabilities = probabilities / probabilities.sum()
    mean = float(probabilities @ values)
    centered = values - mean
    variance = float(probabilities @ centered ** 2)
    skewness = float(probabilities @ centered ** 3) / variance ** 1.5
    kurtosis = float(probabilities @ centered ** 4) / variance ** 2 - 3

    return Moments(mean, variance, skewness, kurtosis)


@dataclass(frozen=True)
class NormalityReport:
    """The class for normality diagnostics of a sample."""

    moments: Moments
    """The sample moments."""
    ks_statistic: float
    """The one-sample KS distance to the reference Gaussian."""
    p_value: float
    """The KS p-value."""


def normality(samples: npt.ArrayLike, variance: float | None = None) -> (
        NormalityReport
):
    """Compare a sample against a centered Gaussian.

    :param samples: The samples.
    :param variance: The reference variance, the sample variance if
                     ``None``.
    :return: The diagnostics.
    """
    values = np.asarray(samples, dtype=np.float64)
    sample_moments = moments(values)
    reference = sample_moments.variance if variance is None else variance

    if reference <= 0:
        raise ValueError('reference variance must be positive')

    result = stats.kstest(values, stats.norm(0, sqrt(reference)).cdf)

    return NormalityReport(
        sample_moments,
        float(result.statistic),
        float(result.pvalue),
    )


@dataclass(frozen=True)
class LinearFit:
    """The class for least-squares line fits."""

    slope: float
    """The slope."""
    intercept: float
    """The intercept."""
    r_squared: float
    """The coefficient of determination."""


def linear_fit(x: npt.ArrayLike, y: npt.ArrayLike) -> LinearFit:
    """Fit ``y = slope * x + intercept``.

    >>> fit = linear_fit([0, 1, 2], [1, 3, 5])
    >>> round(fit.slope, 6), round(fit.intercept, 6), round(fit.r_squared, 6)
    (2.0, 1.0, 1.0)

    :param x: The abscissae.
    :param y: The ordinates.
    :return: The fit.
    """
    abscissae = np.asarray(x, dtype=np.float64)
    ordinates = np.asarray(y, dtype=np.float64)

    if abscissae.size < 2 or abscissae.size != ordinates.size:
        raise ValueError('at least two paired points required')
    elif np.ptp(abscissae) == 0:
        raise ValueError('abscissae are all equal')

    result = stats.linregress(abscissae, ordinates)

    return LinearFit(
        float(result.slope),
        float(result.intercept),
        float(result.rvalue) ** 2,
    )


def total_variation(
        first: Mapping[Any, float],
        second: Mapping[Any, float],
) -> float:
    """Get the total variation distance of two probability mass functions.

    >>> total_variation({0: 0.5, 1: 0.5}, {0: 0.25, 2: 0.75})
    0.75

    :param first: The first masses.
    :param second: The second masses.
    :return: Half the l1 distance.
    """
    keys = set(first) | set(second)

    return sum(abs(first.get(key, 0) - second.get(key, 0)) for key in keys) / 2


def binomial_sigma(probability: float, count: int) -> float:
    """Get the standard error of an empirical frequency.

    :param probability: The success probability.
    :param count: The number of trials.
    :return: The standard error.
    """
    if count <= 0:
        raise ValueError('count must be positive')

    return sqrt(max(probability * (1 - probability), 0) / count)
