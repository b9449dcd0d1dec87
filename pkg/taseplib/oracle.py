"""This module implements exact transient laws of small TASEP windows.

The reachable configurations of a window are enumerated breadth first, the
rate matrix of the swap dynamics is assembled as a sparse matrix, and the law
at time ``t`` is obtained by uniformization.
"""

from collections import deque
from collections.abc import Callable, Hashable
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
import numpy.typing as npt
from scipy import sparse, stats

from taseplib.lattice_core import Boundary, ColorConfig, INF, PackedColor

State = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


class StateSpaceOverflowError(RuntimeError):
    """The reachable state space exceeds its guard."""


class ConvergenceError(RuntimeError):
    """The uniformization series needs too many terms."""


@dataclass(frozen=True, eq=False)
class StateSpace:
    """The class for enumerated configurations of a window.

    State ``0`` is the initial configuration.
    """

    MAX_STATES: ClassVar[int] = 200_000
    """The largest allowed number of states."""
    MAX_SITES: ClassVar[int] = 16
    """The largest allowed two-species window."""
    MAX_COLORED_SITES: ClassVar[int] = 8
    """The largest allowed window with more than two colors."""
    MAX_COLOR_CLASSES: ClassVar[int] = 4
    """The most distinct colors, holes included, of a colored window."""
    MAX_BIJECTION_SITES: ClassVar[int] = 8
    """The largest allowed window of a bijection."""
    template: ColorConfig
    """The initial configuration."""
    states: tuple[State, ...]
    """The colors, sorted exited and sorted absorbed colors of every state."""
    index: dict[State, int]
    """The inverse of :attr:`states`."""
    transitions: tuple[tuple[int, int], ...]
    """The source and target of every admissible swap."""
    bond_count: int
    """The number of active bonds, boundary bonds included."""

    def __len__(self) -> int:
        return len(self.states)

    def config(self, i: int) -> ColorConfig:
        """Get the configuration of a state.

        :param i: The state index.
        :return: The configuration.
        """
        colors, exited, absorbed = self.states[i]

        return ColorConfig(
            self.template.window_lo,
            np.array(colors, dtype=np.int64),
            self.template.left_boundary,
            self.template.right_boundary,
            exited,
            absorbed,
        )


def _successors(
        state: State,
        reservoir: int,
        right_empty: bool,
        max_exits: int,
) -> list[State]:
    colors, exited, absorbed = state
    successors = []

    if reservoir < colors[0]:
        pushed = (colors[0],) if colors[0] < INF else ()

        successors.append(
            (
                (reservoir, *colors[1:]),
                exited,
                tuple(sorted((*absorbed, *pushed))),
            ),
        )

    for k in range(len(colors) - 1):
        if colors[k] < colors[k + 1]:
            swapped = (
                *colors[:k],
                colors[k + 1],
                colors[k],
                *colors[k + 2:],
            )

            successors.append((swapped, exited, absorbed))

    if right_empty and colors[-1] < INF and len(exited) < max_exits:
        successors.append(
            (
                (*colors[:-1], INF),
                tuple(sorted((*exited, colors[-1]))),
                absorbed,
            ),
        )

    return successors


def build_state_space(
        config: ColorConfig,
        max_exits: int = 1,
        max_states: int = StateSpace.MAX_STATES,
) -> StateSpace:
    """Enumerate the configurations reachable from ``config``.

    Exits through an empty right edge are tracked up to ``max_exits``; further
    exits are blocked.

    :param config: The initial configuration.
    :param max_exits: The most exits tracked.
    :param max_states: The state guard.
    :return: The state space.
    """
    classes = len(set(config.colors.tolist()))

    if len(config) > StateSpace.MAX_SITES:
        raise ValueError('window too large for the oracle')
    elif config.is_bijection:
        if len(config) > StateSpace.MAX_BIJECTION_SITES:
            raise ValueError('bijection window too large for the oracle')
    elif classes > StateSpace.MAX_COLOR_CLASSES:
        raise ValueError('too many color classes for the oracle')
    elif classes > 2 and len(config) > StateSpace.MAX_COLORED_SITES:
        raise ValueError('colored window too large for the oracle')

    if max_exits < 0:
        raise ValueError('max_exits must be nonnegative')

    left = config.left_boundary
    reservoir = left.color if isinstance(left, PackedColor) else INF
    right_empty = config.right_boundary is Boundary.EMPTY
    initial = (
        tuple(config.colors.tolist()),
        tuple(sorted(config.exited)),
        tuple(sorted(config.absorbed)),
    )
    states = [initial]
    index = {initial: 0}
    transitions = []
    queue = deque([initial])

    while queue:
        state = queue.popleft()
        source = index[state]

        for successor in _successors(
                state,
                reservoir,
                right_empty,
                max_exits,
        ):
            if successor not in index:
                if len(states) >= max_states:
                    raise StateSpaceOverflowError(
                        f'more than {max_states} reachable states',
                    )

                index[successor] = len(states)
                states.append(successor)
                queue.append(successor)

            transitions.append((source, index[successor]))

    bond_count = (
        len(config) - 1
        + (reservoir < INF)
        + right_empty
    )

    return StateSpace(
        config,
        tuple(states),
        index,
        tuple(transitions),
        max(bond_count, 1),
    )


def build_generator(space: StateSpace) -> sparse.csr_matrix:
    """Assemble the rate matrix of a state space.

    :param space: The state space.
    :return: The generator, with unit off-diagonal rates and zero row sums.
    """
    size = len(space)

    if space.transitions:
        sources, targets = np.array(space.transitions).T
    else:
        sources = targets = np.zeros(0, dtype=np.int64)

    jumps = sparse.coo_matrix(
        (np.ones(sources.size), (sources, targets)),
        shape=(size, size),
    ).tocsr()
    exit_rates = np.asarray(jumps.sum(axis=1)).ravel()

    return (jumps - sparse.diags(exit_rates)).tocsr()


def transient_distribution(
        generator: sparse.csr_matrix,
        initial: int,
        t: float,
        tol: float = 1e-9,
        rate: float | None = None,
        max_terms: int = 100_000,
) -> npt.NDArray[np.float64]:
    """Get the law at time ``t`` by uniformization.

    The Poisson series is cut where the Poisson tail falls below ``tol``.

    :param generator: The rate matrix.
    :param initial: The initial state.
    :param t: The time.
    :param tol: The truncation error bound.
    :param rate: The uniformization rate, the largest exit rate if ``None``.
    :param max_terms: The iteration cap.
    :return: The probability vector.
    """
    size = generator.shape[0]
    exit_rates = -generator.diagonal()

    if t < 0:
        raise ValueError('negative time')
    elif tol <= 0:
        raise ValueError('tolerance must be positive')
    elif not 0 <= initial < size:
        raise ValueError('initial state out of range')

    if rate is None:
        rate = max(float(exit_rates.max(initial=0)), 1.0)
    elif rate < exit_rates.max(initial=0):
        raise ValueError('uniformization rate below an exit rate')

    distribution = np.zeros(size)
    distribution[initial] = 1

    if t == 0:
        return distribution

    mean = rate * t
    terms = int(stats.poisson.isf(tol / 2, mean)) + 1

    if terms > max_terms:
        raise ConvergenceError(f'{terms} terms needed, cap is {max_terms}')

    weights = stats.poisson.pmf(np.arange(terms + 1), mean)
    step = (sparse.identity(size, format='csr') + generator / rate).T.tocsr()
    result = weights[0] * distribution

    for weight in weights[1:]:
        distribution = step @ distribution
        result += weight * distribution

    if stats.poisson.sf(terms, mean) > tol:
        raise ConvergenceError('poisson tail above tolerance')

    return np.asarray(result, dtype=np.float64)


def observable_law(
        distribution: npt.NDArray[np.float64],
        space: StateSpace,
        observable: Callable[[ColorConfig], Hashable],
) -> dict[Hashable, float]:
    """Push a state law forward under an observable.

    :param distribution: The probability vector.
    :param space: The state space.
    :param observable: The observable of configurations.
    :return: The masses keyed by observed value.
    """
    if distribution.size != len(space):
        raise ValueError('distribution and state space differ in size')

    law: dict[Hashable, float] = {}

    for i in np.flatnonzero(distribution):
        value = observable(space.config(int(i)))
        law[value] = law.get(value, 0.0) + float(distribution[i])

    return law


def exact_law(
        config: ColorConfig,
        t: float,
        observable: Callable[[ColorConfig], Hashable],
        max_exits: int = 1,
        tol: float = 1e-9,
) -> dict[Hashable, float]:
    """Get the exact law of an observable at time ``t``.

    >>> from taseplib.lattice_core import ICKind, make_initial
    >>> config = make_initial(
    ...     ICKind.STEP, 0, 1, right_boundary=Boundary.CLOSED,
    ... )
    >>> law = exact_law(config, 1, lambda state: state.color_at(0))
    >>> round(law[1], 6)
    0.632121

    :param config: The initial configuration.
    :param t: The time.
    :param observable: The observable.
    :param max_exits: The most exits tracked.
    :param tol: The truncation error bound.
    :return: The masses keyed by observed value.
    """
    space = build_state_space(config, max_exits)
    generator = build_generator(space)
    distribution = transient_distribution(
        generator,
        0,
        t,
        tol,
        float(space.bond_count),
    )

    return observable_law(distribution, space, observable)
