"""This module implements the experiment harness and its command line.

An experiment is identified by an :class:`ExperimentConfig`. Its canonical
JSON document, minus the output directory and the worker count, hashes to
the directory the results are written to::

    out/<experiment>/<config hash>/samples.bin
    out/<experiment>/<config hash>/report.json
    out/<experiment>/<config hash>/runtime.json
    out/<experiment>/<config hash>/<table>.csv

Randomness is keyed by replica ids, never by workers, so the samples and
the report do not depend on the worker count. Timing goes to
``runtime.json`` only.
"""

import csv
import json
import logging
import sys
from argparse import ArgumentParser, Namespace
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from functools import partial
from hashlib import sha256
from math import ceil, floor, sqrt
from pathlib import Path
from time import perf_counter
from typing import Any, ClassVar

import numpy as np
import numpy.typing as npt
from scipy import stats

from taseplib.asymptotics import (
    decoupling_test,
    fit_verdict,
    hydro_one_shock,
    ks_ladder,
    limit_statistics_shock1,
    limit_statistics_shock2,
    LimitReport,
    local_gaussian,
    RescaleSpec,
    SampleSource,
    sample_step_counts,
    ShockCase,
    tail_checks,
    tw_onepoint,
    TwoShockCase,
    TWReference,
)
from taseplib.geodesics import (
    BERNOULLI_PURPOSE,
    check_comparison,
    check_concatenation,
    concatenation_ys,
    evolve_with_heights,
    experiment_midtime_tail,
    experiment_slow_decorrelation,
    experiment_stationary_exit,
    experiment_tube_localization,
    PathVariant,
    TailTable,
)
from taseplib.identities import (
    compare_tables,
    exact_shock,
    joint_shock,
    lhs_shock,
    Mapper,
    rhs_shock,
    ShockSpec,
    ShockSpec1,
    ShockSpec2,
    step_counts,
)
from taseplib.kinetics import (
    auxiliary_generator,
    BoundaryInfluenceError,
    check_window,
    evolve,
    generate_field,
    heights_ordered,
    margin_window,
    SPREAD_FACTOR,
)
from taseplib.lattice_core import Boundary, ICKind, INF, make_initial
from taseplib.multicolor import check_symmetry_random
from taseplib.oracle import exact_law
from taseplib.utilities import (
    ecdf,
    EmpiricalDistribution,
    ks_band,
    ks_distance,
    total_variation,
    Verdict,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
"""The version of the configuration document."""
SITES_PURPOSE = 2
"""The auxiliary stream tag of randomly drawn intermediate sites."""
COUPLING_PURPOSE = 3
"""The auxiliary stream tag of sandwiched Bernoulli occupations."""


class ConfigurationError(ValueError):
    """The error raised for malformed experiment configurations."""


@dataclass(frozen=True)
class CsvTable:
    """The class for plot data written as CSV."""

    header: tuple[str, ...]
    """The column names."""
    rows: list[tuple[Any, ...]] = field(default_factory=list)
    """The rows."""

    def write(self, path: str | Path) -> None:
        """Write the table.

        :param path: The destination file.
        :return: ``None``.
        """
        with open(path, 'w', newline='') as file:
            writer = csv.writer(file)

            writer.writerow(self.header)
            writer.writerows(self.rows)


def ecdf_table(samples: npt.ArrayLike) -> CsvTable:
    """Tabulate an empirical distribution function.

    >>> ecdf_table([0, 1]).rows
    [(0.0, 0.5), (1.0, 1.0)]
    >>> ecdf_table([]).rows
    []

    :param samples: The samples.
    :return: One ``(x, F)`` row per distinct value.
    """
    values, probabilities = ecdf(samples)

    return CsvTable(
        ('x', 'F'),
        list(zip(map(float, values), map(float, probabilities))),
    )


def tail_table(table: TailTable) -> CsvTable:
    return CsvTable(table.CSV_HEADER, list(table.csv_rows()))


@dataclass(frozen=True, eq=False)
class Outcome:
    """The class for the results of an experiment before persistence."""

    verdicts: list[Verdict]
    """The test outcomes."""
    samples: npt.NDArray[np.float64] = field(
        default_factory=lambda: np.zeros(0),
    )
    """The main per-replica statistic."""
    tables: dict[str, CsvTable] = field(default_factory=dict)
    """The plot data keyed by file stem."""
    replica_ranges: dict[str, tuple[int, int]] = field(default_factory=dict)
    """The first replica id and the replica count of each sample."""
    summary: dict[str, Any] = field(default_factory=dict)
    """Further reported numbers."""

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)


Runner = Callable[['ExperimentConfig', Mapper[Any]], Outcome]


@dataclass(frozen=True)
class Experiment:
    """The class for registered experiments."""

    name: str
    """The name used on the command line."""
    runner: Runner
    """The function producing the outcome."""
    t: float
    """The default time."""
    replicas: int
    """The default number of replicas."""
    defaults: Mapping[str, Any] = field(default_factory=dict)
    """The parameters and their defaults."""
    description: str = ''
    """The one-line help text."""


@dataclass(frozen=True)
class ExperimentConfig:
    """The class for experiment configurations.

    Missing parameters, times and replica counts are filled from the
    experiment defaults, so that equivalent configurations hash alike.
    """

    HASH_EXCLUDED: ClassVar[tuple[str, ...]] = 'out', 'workers'
    """The fields that do not affect results."""
    experiment: str
    """The registered experiment name."""
    parameters: Mapping[str, Any] = field(default_factory=dict)
    """The experiment parameters."""
    seed: int = 0
    """The seed."""
    replicas: int | None = None
    """The number of replicas."""
    t: float | None = None
    """The time."""
    window_factor: float = SPREAD_FACTOR
    """The speed bound of the margin rule."""
    window: tuple[int, int] | None = None
    """An explicit micro window for oracle comparisons."""
    tw_ref: str | None = None
    """The Tracy-Widom table, the bundled one if ``None``."""
    out: str = 'out'
    """The output root."""
    workers: int = 1
    """The number of worker processes."""
    schema: int = SCHEMA_VERSION
    """The document version."""

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f'unknown experiment {self.experiment}')

        experiment = EXPERIMENTS[self.experiment]
        unknown = set(self.parameters) - set(experiment.defaults)

        if unknown:
            raise ConfigurationError(
                f'unknown parameters {sorted(unknown)} of {self.experiment}',
            )
        elif self.schema != SCHEMA_VERSION:
            raise ConfigurationError(f'unsupported schema {self.schema}')
        elif self.seed < 0:
            raise ConfigurationError('seed must be nonnegative')
        elif self.replicas is not None and self.replicas < 1:
            raise ConfigurationError('replicas must be positive')
        elif self.t is not None and self.t <= 0:
            raise ConfigurationError('time must be positive')
        elif self.window_factor < 1:
            raise ConfigurationError('window factor below one')
        elif self.workers < 1:
            raise ConfigurationError('workers must be positive')
        elif self.window is not None and (
                len(self.window) != 2 or self.window[0] > self.window[1]
        ):
            raise ConfigurationError('window must be an increasing pair')

        object.__setattr__(
            self,
            'parameters',
            {**experiment.defaults, **self.parameters},
        )

        if self.replicas is None:
            object.__setattr__(self, 'replicas', experiment.replicas)

        if self.t is None:
            object.__setattr__(self, 't', float(experiment.t))

        if self.window is not None:
            object.__setattr__(self, 'window', tuple(map(int, self.window)))

    @property
    def replica_count(self) -> int:
        assert self.replicas is not None

        return self.replicas

    @property
    def time(self) -> float:
        assert self.t is not None

        return self.t

    def parameter(self, name: str) -> Any:
        return self.parameters[name]

    def to_dict(self) -> dict[str, Any]:
        document = {
            config_field.name: getattr(self, config_field.name)
            for config_field in fields(self)
        }
        document['parameters'] = dict(self.parameters)

        if self.window is not None:
            document['window'] = list(self.window)

        return document

    def to_json(self, exclude: Iterable[str] = ()) -> str:
        """Serialize canonically.

        :param exclude: The fields left out.
        :return: The JSON document with sorted keys and no whitespace.
        """
        document = self.to_dict()

        for name in exclude:
            document.pop(name, None)

        return json.dumps(
            document,
            sort_keys=True,
            separators=(',', ':'),
            default=_jsonable,
        )

    @property
    def digest(self) -> str:
        """Get the configuration hash.

        :return: The SHA-256 hex digest of the canonical document.
        """
        return sha256(
            self.to_json(self.HASH_EXCLUDED).encode('utf-8'),
        ).hexdigest()

    @property
    def directory(self) -> Path:
        return Path(self.out) / self.experiment / self.digest

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> 'ExperimentConfig':
        """Create a configuration from a decoded document.

        :param document: The document.
        :return: The configuration.
        """
        names = {config_field.name for config_field in fields(cls)}
        unknown = set(document) - names

        if unknown:
            raise ConfigurationError(f'unknown fields {sorted(unknown)}')
        elif 'experiment' not in document:
            raise ConfigurationError('missing experiment')

        values = dict(document)

        if values.get('window') is not None:
            values['window'] = tuple(values['window'])

        try:
            return cls(**values)
        except TypeError as error:
            raise ConfigurationError(str(error)) from error

    @classmethod
    def load(cls, path: str | Path) -> 'ExperimentConfig':
        """Read a JSON configuration file.

        :param path: The file.
        :return: The configuration.
        """
        try:
            with open(path) as file:
                document = json.load(file)
        except (OSError, json.JSONDecodeError) as error:
            raise ConfigurationError(f'cannot read {path}: {error}') from error

        if not isinstance(document, dict):
            raise ConfigurationError('configuration must be a JSON object')

        return cls.from_dict(document)


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    elif isinstance(value, np.ndarray):
        return value.tolist()
    elif isinstance(value, Path):
        return str(value)

    raise TypeError(f'{type(value).__name__} is not serializable')


@dataclass(frozen=True)
class RuntimeInfo:
    """The class for run metadata excluded from the report."""

    started: str
    """The ISO 8601 start time."""
    elapsed: float
    """The wall-clock duration in seconds."""
    workers: int
    """The number of worker processes."""
    python: str = sys.version.split()[0]
    """The interpreter version."""
    numpy: str = np.__version__
    """The numpy version."""


@dataclass(frozen=True)
class ResultRecord:
    """The class for the persisted summary of a run."""

    config_hash: str
    """The configuration hash."""
    experiment: str
    """The experiment name."""
    config: dict[str, Any]
    """The configuration document without output directory and workers."""
    verdicts: list[Verdict]
    """The test outcomes."""
    sample_file: str
    """The raw sample file name."""
    table_files: list[str]
    """The CSV file names."""
    replica_ranges: dict[str, tuple[int, int]]
    """The first replica id and the replica count of each sample."""
    summary: dict[str, Any]
    """Further reported numbers."""
    runtime: RuntimeInfo
    """The run metadata."""

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)

    def report(self) -> dict[str, Any]:
        """Get the deterministic part of the record.

        :return: The report document.
        """
        document = asdict(self)
        document.pop('runtime')
        document['passed'] = self.passed

        return document


def emit(outcome: Outcome, directory: str | Path) -> list[Path]:
    """Write the samples and the plot data of an outcome.

    The samples are little-endian doubles in replica order.

    :param outcome: The outcome.
    :param directory: The destination directory, created if missing.
    :return: The written files.
    """
    root = Path(directory)

    root.mkdir(parents=True, exist_ok=True)

    sample_path = root / 'samples.bin'
    np.asarray(outcome.samples, dtype='<f8').tofile(sample_path)
    paths = [sample_path]

    for stem, table in sorted(outcome.tables.items()):
        path = root / f'{stem}.csv'

        table.write(path)
        paths.append(path)

    return paths


def _write_json(path: Path, document: Mapping[str, Any]) -> None:
    with open(path, 'w') as file:
        json.dump(document, file, sort_keys=True, indent=2, default=_jsonable)
        file.write('\n')


@contextmanager
def worker_pool(workers: int) -> Iterator[Mapper[Any]]:
    """Provide an order-preserving ``map`` over worker processes.

    :param workers: The number of processes, the builtin ``map`` if one.
    :return: The mapper.
    """
    if workers == 1:
        yield map

        return

    with ProcessPoolExecutor(workers) as executor:
        def mapper(
                function: Callable[[int], Any],
                replicas: Iterable[int],
        ) -> Iterator[Any]:
            return executor.map(function, replicas, chunksize=16)

        yield mapper


def execute(config: ExperimentConfig, mapper: Mapper[Any] = map) -> Outcome:
    """Run an experiment without writing anything.

    :param config: The configuration.
    :param mapper: A ``map`` lookalike, possibly parallel.
    :return: The outcome.
    """
    return EXPERIMENTS[config.experiment].runner(config, mapper)


def run(config: ExperimentConfig) -> ResultRecord:
    """Run an experiment and persist its results.

    :param config: The configuration.
    :return: The record, also written to ``report.json``.
    """
    directory = config.directory
    started = datetime.now(timezone.utc).isoformat()
    begin = perf_counter()

    logger.info(
        'running %s with %d replicas at t=%g on %d workers',
        config.experiment,
        config.replica_count,
        config.time,
        config.workers,
    )

    with worker_pool(config.workers) as mapper:
        outcome = execute(config, mapper)

    paths = emit(outcome, directory)
    runtime = RuntimeInfo(started, perf_counter() - begin, config.workers)
    record = ResultRecord(
        config.digest,
        config.experiment,
        json.loads(config.to_json(ExperimentConfig.HASH_EXCLUDED)),
        outcome.verdicts,
        paths[0].name,
        [path.name for path in paths[1:]],
        outcome.replica_ranges,
        outcome.summary,
        runtime,
    )

    _write_json(directory / 'report.json', record.report())
    _write_json(directory / 'runtime.json', asdict(runtime))

    for verdict in outcome.verdicts:
        logger.debug(
            '%s: %s (statistic %g, band %g)',
            verdict.name,
            'pass' if verdict.passed else 'FAIL',
            verdict.statistic,
            verdict.band,
        )

    logger.info(
        '%s %s, results in %s',
        config.experiment,
        'passed' if record.passed else 'failed',
        directory,
    )

    return record


def _count_verdict(name: str, failures: int) -> Verdict:
    return Verdict(name, failures, 0, not failures)


def _run_symmetry(config: ExperimentConfig, _: Mapper[Any]) -> Outcome:
    report = check_symmetry_random(
        config.seed,
        config.replica_count,
        config.parameter('k_max'),
        (config.parameter('bond_lo'), config.parameter('bond_hi')),
    )
    summary = {'count': report.count, 'failures': report.failures}

    if report.first_failure is not None:
        summary['first_failure'] = list(report.first_failure.bonds)

    return Outcome(
        [_count_verdict('symmetry', report.failures)],
        replica_ranges={'sequences': (0, report.count)},
        summary=summary,
    )


def _oracle_count(
        window: tuple[int, int],
        t: float,
        x: int,
        seed: int,
        replica_id: int,
) -> int:
    config = make_initial(ICKind.STEP, *window, left_boundary=Boundary.CLOSED)
    field_ = generate_field(seed, replica_id, window, t)
    config, _ = evolve(config, field_, 0, t, record=False)

    return int(step_counts(config, [x])[0])


def _run_oracle_validate(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    window = config.window or (-4, 4)
    x = config.parameter('x')
    t = config.time
    initial = make_initial(
        ICKind.STEP,
        *window,
        left_boundary=Boundary.CLOSED,
    )
    law = exact_law(
        initial,
        t,
        lambda state: int(step_counts(state, [x])[0]),
        config.parameter('max_exits'),
    )
    sampler = partial(_oracle_count, window, t, x, config.seed)
    samples = np.fromiter(
        mapper(sampler, range(config.replica_count)),
        np.float64,
    )
    simulated = EmpiricalDistribution(samples)
    exact = EmpiricalDistribution.from_values(
        map(float, law),
        law.values(),
    )
    distance = ks_distance(simulated, exact)
    band = float(stats.kstwobign.ppf(1 - config.parameter('level'))) / sqrt(
        samples.size,
    )
    masses = {float(value): mass for value, mass in law.items()}

    return Outcome(
        [Verdict('oracle_ks', distance, band, distance <= band)],
        samples,
        {
            'exact': CsvTable(('x', 'p'), sorted(masses.items())),
            'ecdf': ecdf_table(samples),
        },
        {'simulation': (0, config.replica_count)},
        {
            'total_variation': total_variation(simulated.pmf(), masses),
            'oracle_mass': sum(masses.values()),
        },
    )


def _shock_spec(config: ExperimentConfig, two: bool) -> ShockSpec:
    try:
        return _build_shock_spec(config, two)
    except ValueError as error:
        raise ConfigurationError(str(error)) from error


def _build_shock_spec(config: ExperimentConfig, two: bool) -> ShockSpec:
    t = config.time
    oracle = config.parameter('oracle')

    if two:
        m, n = config.parameter('m'), config.parameter('n')

        if not oracle:
            return ShockSpec2.with_default_grid(m, n, t)

        lo, hi = config.window or (-m - n - 1, m + n + 1)

        return ShockSpec2(m, n, t, tuple(range(lo + 1, hi + 1)))

    m_plus, m_minus = config.parameter('m_plus'), config.parameter('m_minus')

    if not oracle:
        return ShockSpec1.with_default_grid(m_plus, m_minus, t)

    lo, hi = config.window or (-m_minus - 1, m_plus + 1)

    return ShockSpec1(m_plus, m_minus, t, tuple(range(lo + 1, hi + 1)))


def _micro_window(spec: ShockSpec, config: ExperimentConfig) -> (
        tuple[int, int]
):
    block_lo, block_hi = spec.block_span
    lo, hi = config.window or spec.block_span

    if lo > block_lo or hi < block_hi:
        raise ConfigurationError('window too small for declared blocks')

    return lo, hi


def _run_identity(
        config: ExperimentConfig,
        mapper: Mapper[Any],
        two: bool = False,
) -> Outcome:
    spec = _shock_spec(config, two)

    if config.parameter('oracle'):
        exact = exact_shock(spec, _micro_window(spec, config))
        rows = [
            (x, float(first), float(second), 0, 0)
            for x, first, second in zip(
                exact.x_grid,
                exact.lhs_tail,
                exact.rhs_tail,
            )
        ]

        return Outcome(
            [
                Verdict(
                    'exact_tail',
                    exact.tail_distance,
                    exact.TOLERANCE,
                    exact.tail_distance < exact.TOLERANCE,
                ),
                Verdict(
                    'exact_joint',
                    exact.joint_distance,
                    exact.TOLERANCE,
                    exact.joint_distance < exact.TOLERANCE,
                ),
            ],
            tables={
                'tails': CsvTable(
                    ('x', 'lhs_prob', 'rhs_prob', 'lhs_n', 'rhs_n'),
                    rows,
                ),
            },
        )

    replicas = config.replica_count
    lhs = lhs_shock(
        spec,
        replicas,
        config.seed,
        window_factor=config.window_factor,
        mapper=mapper,
    )
    rhs = rhs_shock(
        spec,
        replicas,
        config.seed,
        window_factor=config.window_factor,
        mapper=mapper,
    )
    report = compare_tables(
        lhs,
        rhs,
        config.parameter('level'),
        auxiliary_generator(config.seed, 0, SITES_PURPOSE),
        config.parameter('resamples'),
    )
    verdicts = list(report.verdicts)
    ranges = {'lhs': (0, replicas), 'rhs': (1 << 31, replicas)}

    if config.parameter('joint'):
        joint = joint_shock(
            spec,
            replicas,
            config.seed,
            first_replica=1 << 32,
            window_factor=config.window_factor,
            mapper=mapper,
        )
        verdicts.extend(joint.verdicts(config.parameter('level')))
        ranges['joint'] = (1 << 32, replicas)

    return Outcome(
        verdicts,
        np.asarray(lhs.samples),
        {
            'tails': CsvTable(report.CSV_HEADER, list(report.rows())),
            'ecdf_lhs': ecdf_table(lhs.samples),
            'ecdf_rhs': ecdf_table(rhs.pseudo_positions.samples),
        },
        ranges,
        {'violations': report.violations},
    )


def _concatenation_replica(
        t: float,
        x_end: int,
        taus: tuple[float, ...],
        count: int,
        variant: PathVariant,
        seed: int,
        window_factor: float,
        replica_id: int,
) -> tuple[int, int, int, int]:
    reach = ceil(t)
    window = margin_window(t, x_end - reach, x_end + reach, window_factor)
    field_ = generate_field(seed, replica_id, window, t)
    ys = concatenation_ys(
        auxiliary_generator(seed, replica_id, SITES_PURPOSE),
        x_end,
        t,
        count,
    )
    report = check_concatenation(
        field_,
        make_initial(ICKind.STEP, *window),
        x_end,
        t,
        taus,
        ys,
        variant,
    )
    unequal = sum(not row.equal for row in report.rows)

    return (
        unequal,
        len(report.rows),
        report.inequality_violations,
        report.inequality_checks,
    )


def _run_concatenation(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    sampler = partial(
        _concatenation_replica,
        config.time,
        config.parameter('x_end'),
        tuple(map(float, config.parameter('taus'))),
        config.parameter('ys'),
        PathVariant(config.parameter('variant')),
        config.seed,
        config.window_factor,
    )
    results = np.array(
        list(mapper(sampler, range(config.replica_count))),
        dtype=np.int64,
    ).reshape(-1, 4)
    unequal, rows, violations, checks = results.sum(axis=0).tolist()

    return Outcome(
        [
            _count_verdict('concatenation_equality', unequal),
            _count_verdict('concatenation_inequality', violations),
        ],
        results[:, 0].astype(np.float64),
        replica_ranges={'fields': (0, config.replica_count)},
        summary={'equalities': rows, 'inequalities': checks},
    )


def _comparison_replica(
        t: float,
        rho: float,
        x: int,
        y: int,
        seed: int,
        window_factor: float,
        replica_id: int,
) -> tuple[int, int, int]:
    window = margin_window(t, x, y, window_factor)
    field_ = generate_field(seed, replica_id, window, t)
    bernoulli = make_initial(
        ICKind.BERNOULLI,
        *window,
        density=rho,
        rng=auxiliary_generator(seed, replica_id, BERNOULLI_PURPOSE),
    )
    report = check_comparison(
        field_,
        make_initial(ICKind.STEP, *window),
        bernoulli,
        x,
        y,
        t,
    )

    return (
        report.violations,
        int(report.lower_intersection),
        int(report.upper_intersection),
    )


def _run_comparison(config: ExperimentConfig, mapper: Mapper[Any]) -> (
        Outcome
):
    x, y = config.parameter('x'), config.parameter('y')

    if x >= y:
        raise ConfigurationError('x must be smaller than y')

    sampler = partial(
        _comparison_replica,
        config.time,
        config.parameter('rho'),
        x,
        y,
        config.seed,
        config.window_factor,
    )
    results = np.array(
        list(mapper(sampler, range(config.replica_count))),
        dtype=np.int64,
    ).reshape(-1, 3)
    violations, lower, upper = results.sum(axis=0).tolist()

    return Outcome(
        [_count_verdict('comparison', violations)],
        results[:, 0].astype(np.float64),
        replica_ranges={'fields': (0, config.replica_count)},
        summary={'lower_intersections': lower, 'upper_intersections': upper},
    )


def _coupling_replica(
        t: float,
        taus: tuple[float, ...],
        k: int,
        rho: float,
        seed: int,
        window_factor: float,
        replica_id: int,
) -> int:
    window = margin_window(t, -k, k, window_factor)
    field_ = generate_field(seed, replica_id, window, t)
    lower = make_initial(ICKind.STEP, *window, y=-k)
    upper = make_initial(ICKind.STEP, *window, y=k)
    rng = auxiliary_generator(seed, replica_id, COUPLING_PURPOSE)
    colors = lower.colors.copy()
    inside = (-k < lower.sites) & (lower.sites <= k)
    colors[inside] = np.where(rng.random(inside.sum()) < rho, 1, INF)
    middle = lower.with_colors(colors)
    trajectories = []

    for config in (upper, middle, lower):
        log, heights = evolve_with_heights(config, field_, t, taus)

        check_window(log)
        trajectories.append(heights)

    violations = 0

    for time in trajectories[0]:
        for first, second in zip(trajectories, trajectories[1:]):
            violations += not heights_ordered(first[time], second[time])

    return violations


def _run_coupling(config: ExperimentConfig, mapper: Mapper[Any]) -> Outcome:
    sampler = partial(
        _coupling_replica,
        config.time,
        tuple(map(float, config.parameter('taus'))),
        config.parameter('k'),
        config.parameter('rho'),
        config.seed,
        config.window_factor,
    )
    violations = np.fromiter(
        mapper(sampler, range(config.replica_count)),
        np.float64,
    )

    return Outcome(
        [_count_verdict('coupling', int(violations.sum()))],
        violations,
        replica_ranges={'fields': (0, config.replica_count)},
    )


def _power_rule(exponent: float, t: float) -> float:
    return float(t ** exponent)


def _tail_verdicts(
        name: str,
        table: TailTable,
        power: float,
        r_squared: float,
) -> list[Verdict]:
    return [
        Verdict(f'{name}_monotone', 0, 0, table.monotone()),
        fit_verdict(f'{name}_fit', table, power, r_squared),
    ]


def _run_slowdec(config: ExperimentConfig, mapper: Mapper[Any]) -> Outcome:
    t = config.time
    times = config.parameter('times') or (t / 4, t / 2, t)
    table = experiment_slow_decorrelation(
        config.parameter('alpha'),
        times,
        partial(_power_rule, config.parameter('exponent')),
        config.replica_count,
        config.seed,
        config.parameter('epsilon'),
        window_factor=config.window_factor,
        mapper=mapper,
    )
    rows = [
        (row.t, row.tau, row.n, row.count, row.phat) for row in table.rows
    ]

    return Outcome(
        [Verdict('slowdec_monotone', 0, 0, table.monotone())],
        np.array([row.phat for row in table.rows]),
        {'slowdec': CsvTable(('t', 'tau', 'n', 'count', 'phat'), rows)},
        {
            f't{i}': (i * config.replica_count, config.replica_count)
            for i in range(len(rows))
        },
    )


def _run_path_tail(
        config: ExperimentConfig,
        mapper: Mapper[Any],
        experiment: Callable[..., TailTable],
        name: str,
) -> Outcome:
    table = experiment(
        config.parameter('alpha'),
        config.time,
        config.parameter('u_grid'),
        config.replica_count,
        config.seed,
        window_factor=config.window_factor,
        variant=PathVariant(config.parameter('variant')),
        mapper=mapper,
    )

    return Outcome(
        _tail_verdicts(name, table, 2, config.parameter('r_squared')),
        table.samples,
        {name: tail_table(table)},
        {'paths': (0, config.replica_count)},
    )


def _run_midtime(config: ExperimentConfig, mapper: Mapper[Any]) -> Outcome:
    return _run_path_tail(config, mapper, experiment_midtime_tail, 'midtime')


def _run_tube(config: ExperimentConfig, mapper: Mapper[Any]) -> Outcome:
    return _run_path_tail(
        config,
        mapper,
        experiment_tube_localization,
        'tube',
    )


def _run_stationary_exit(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    table = experiment_stationary_exit(
        config.parameter('rho'),
        config.time,
        config.parameter('m_grid'),
        config.replica_count,
        config.seed,
        window_factor=config.window_factor,
        mapper=mapper,
    )

    return Outcome(
        _tail_verdicts('exit', table, 2, config.parameter('r_squared')),
        table.samples,
        {'stationary_exit': tail_table(table)},
        {'paths': (0, config.replica_count)},
    )


def _limit_outcome(
        reports: Sequence[LimitReport],
        times: Sequence[float],
        replicas: int,
) -> Outcome:
    report = reports[-1]
    verdicts = list(report.verdicts) if report.asserted else []
    tables = {'ecdf_statistic': ecdf_table(report.statistic)}

    if report.reference is not None:
        tables['ecdf_reference'] = ecdf_table(report.reference)

    if len(reports) > 1:
        verdicts.append(Verdict('ks_ladder', 0, 0, ks_ladder(reports)))

    return Outcome(
        verdicts,
        report.statistic,
        tables,
        {'shock': (0, replicas)},
        {
            'asserted': report.asserted,
            'reported': [asdict(verdict) for verdict in report.verdicts],
            'times': list(times),
        },
    )


def _run_shock1_limit(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    times = config.parameter('ladder') or [config.time]
    reports = [
        limit_statistics_shock1(
            ShockCase(config.parameter('case')),
            config.parameter('a'),
            config.parameter('b'),
            t,
            config.replica_count,
            config.seed,
            delta=config.parameter('delta'),
            source=SampleSource(config.parameter('source')),
            tolerance=config.parameter('tolerance'),
            window_factor=config.window_factor,
            mapper=mapper,
        )
        for t in sorted(times)
    ]

    return _limit_outcome(reports, sorted(times), config.replica_count)


def _run_shock2_limit(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    s_grid = config.parameter('s_grid')
    options: dict[str, Any] = {} if s_grid is None else {'s_grid': s_grid}
    report = limit_statistics_shock2(
        TwoShockCase(config.parameter('case')),
        config.parameter('m'),
        config.parameter('n'),
        config.time,
        config.replica_count,
        config.seed,
        source=SampleSource(config.parameter('source')),
        tolerance=config.parameter('tolerance'),
        window_factor=config.window_factor,
        mapper=mapper,
        **options,
    )

    return _limit_outcome([report], [config.time], config.replica_count)


def _run_decoupling(config: ExperimentConfig, mapper: Mapper[Any]) -> Outcome:
    report = decoupling_test(
        config.parameter('alphas'),
        config.time,
        config.replica_count,
        config.seed,
        bound=config.parameter('bound'),
        window_factor=config.window_factor,
        mapper=mapper,
    )
    rows = [
        (alpha, *map(float, correlations))
        for alpha, correlations in zip(report.alphas, report.correlations)
    ]

    return Outcome(
        report.verdicts,
        np.asarray(report.correlations).ravel(),
        {
            'correlations': CsvTable(
                ('alpha', *(f'{alpha:g}' for alpha in report.alphas)),
                rows,
            ),
        },
        {'runs': (0, config.replica_count)},
        {'by_separation': report.by_separation()},
    )


def _run_local_gaussian(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    observable = config.parameter('observable')

    if observable not in ('N', 'h'):
        raise ConfigurationError('observable must be N or h')

    spec = RescaleSpec(
        config.parameter('alpha'),
        config.time,
        beta=config.parameter('beta'),
        gamma1=config.parameter('gamma1'),
        gamma2=config.parameter('gamma2'),
        delta=config.parameter('delta'),
    )
    report = local_gaussian(
        spec,
        config.replica_count,
        config.seed,
        heights=observable == 'h',
        window_factor=config.window_factor,
        mapper=mapper,
    )

    return Outcome(
        report.verdicts,
        report.statistic,
        {'ecdf_increment': ecdf_table(report.statistic)},
        {'runs': (0, config.replica_count)},
    )


def _tw_reference(config: ExperimentConfig) -> TWReference:
    try:
        return TWReference.load(config.tw_ref)
    except (OSError, ValueError) as error:
        raise ConfigurationError(f'bad Tracy-Widom table: {error}') from error


def _run_tw_onepoint(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    reference = _tw_reference(config)
    report = tw_onepoint(
        config.parameter('alpha'),
        config.time,
        config.replica_count,
        config.seed,
        reference=reference,
        mean_tolerance=config.parameter('mean_tolerance'),
        variance_tolerance=config.parameter('variance_tolerance'),
        window_factor=config.window_factor,
        mapper=mapper,
    )
    overlay = CsvTable(
        ('s', 'F_empirical', 'F_reference'),
        [
            (float(s), float(empirical), float(expected))
            for s, empirical, expected in zip(
                reference.s,
                EmpiricalDistribution(report.statistic).ecdf(reference.s),
                reference.cdf,
            )
        ],
    )

    return Outcome(
        report.verdicts,
        report.statistic,
        {'tw_overlay': overlay},
        {'runs': (0, config.replica_count)},
    )


def _run_tails(config: ExperimentConfig, mapper: Mapper[Any]) -> Outcome:
    report = tail_checks(
        config.parameter('alpha'),
        config.time,
        config.parameter('s_grid'),
        config.replica_count,
        config.seed,
        u=config.parameter('u'),
        r_squared=config.parameter('r_squared'),
        reference=_tw_reference(config),
        window_factor=config.window_factor,
        mapper=mapper,
    )

    return Outcome(
        report.verdicts,
        report.upper.samples,
        {
            'upper_tail': tail_table(report.upper),
            'lower_tail': tail_table(report.lower),
        },
        {'runs': (0, config.replica_count)},
        {'center': report.center},
    )


def _run_window_doubling(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    xs = tuple(config.parameter('xs'))
    t = config.time
    samples = []

    for factor in (config.window_factor, 2 * config.window_factor):
        sampler = partial(
            _window_counts,
            t,
            xs,
            config.seed,
            factor,
        )
        samples.append(
            np.array(
                list(mapper(sampler, range(config.replica_count))),
                dtype=np.int64,
            ),
        )

    narrow, wide = samples
    band = ks_band(
        config.replica_count,
        config.replica_count,
        config.parameter('level') / len(xs),
    )
    verdicts = []

    for k, x in enumerate(xs):
        distance = ks_distance(
            EmpiricalDistribution(narrow[:, k]),
            EmpiricalDistribution(wide[:, k]),
        )

        verdicts.append(
            Verdict(f'window_x{x}', distance, band, distance <= band),
        )

    return Outcome(
        verdicts,
        narrow[:, 0].astype(np.float64),
        replica_ranges={'runs': (0, config.replica_count)},
        summary={'identical': float((narrow == wide).all(axis=1).mean())},
    )


def _window_counts(
        t: float,
        xs: tuple[int, ...],
        seed: int,
        window_factor: float,
        replica_id: int,
) -> npt.NDArray[np.int64]:
    return sample_step_counts(t, xs, seed, replica_id, window_factor)


def _profile_replica(
        m_plus: int,
        m_minus: int,
        t: float,
        observed: tuple[int, int],
        seed: int,
        window_factor: float,
        replica_id: int,
) -> npt.NDArray[np.bool_]:
    window = margin_window(t, *observed, window_factor)
    field_ = generate_field(seed, replica_id, window, t)
    config = make_initial(
        ICKind.ONE_SHOCK_SECOND_CLASS,
        *window,
        m_plus=m_plus,
        m_minus=m_minus,
    )
    config, log = evolve(config, field_, 0, t, record=False)

    check_window(log)

    lo, hi = observed
    occupancy: npt.NDArray[np.bool_] = config.occupancy()

    return occupancy[lo - config.window_lo:hi - config.window_lo + 1]


def _run_hydro_profile(
        config: ExperimentConfig,
        mapper: Mapper[Any],
) -> Outcome:
    t = config.time
    a, b = config.parameter('a'), config.parameter('b')
    m_plus, m_minus = floor(a * t), floor(b * t)

    if min(m_plus, m_minus) < 1:
        raise ConfigurationError('blocks are empty at this time')

    width = config.parameter('bin')
    lo = -m_minus - ceil(t) - width
    hi = m_plus + ceil(t) + width
    sampler = partial(
        _profile_replica,
        m_plus,
        m_minus,
        t,
        (lo, hi),
        config.seed,
        config.window_factor,
    )
    density = np.mean(
        list(mapper(sampler, range(config.replica_count))),
        axis=0,
    )
    bins = (hi - lo + 1) // width
    binned = density[:bins * width].reshape(bins, width).mean(axis=1)
    centers = lo + width * np.arange(bins) + (width - 1) / 2
    hydro = hydro_one_shock(m_plus / t, m_minus / t, 1.0, centers / t)
    error = float(np.abs(binned - hydro.density).mean())
    tolerance = config.parameter('tolerance')
    rows = [
        (float(x), float(x / t), float(empirical), float(expected))
        for x, empirical, expected in zip(centers, binned, hydro.density)
    ]

    return Outcome(
        [Verdict('hydro_profile', error, tolerance, error <= tolerance)],
        np.asarray(density, dtype=np.float64),
        {'profile': CsvTable(('x', 'xi', 'density', 'hydro'), rows)},
        {'runs': (0, config.replica_count)},
        {
            'shock_position': hydro.shock_position * t,
            'birth_time': hydro.birth_time * t,
        },
    )


_IDENTITY_DEFAULTS = {
    'oracle': False,
    'joint': False,
    'level': 0.01,
    'resamples': 1000,
}
_LADDER = (0.5, 1.0, 1.5, 2.0)
EXPERIMENTS: dict[str, Experiment] = {
    experiment.name: experiment
    for experiment in (
        Experiment(
            'symmetry',
            _run_symmetry,
            1.0,
            1000,
            {'k_max': 50, 'bond_lo': -20, 'bond_hi': 19},
            'color-position symmetry on random transposition sequences',
        ),
        Experiment(
            'oracle_validate',
            _run_oracle_validate,
            1.0,
            100_000,
            {'x': 1, 'max_exits': 2, 'level': 0.01},
            'simulated step counts against the exact law on a micro window',
        ),
        Experiment(
            'identity1',
            _run_identity,
            4.0,
            100_000,
            {'m_plus': 2, 'm_minus': 2, **_IDENTITY_DEFAULTS},
            'both sides of the one-shock identity',
        ),
        Experiment(
            'identity2',
            partial(_run_identity, two=True),
            4.0,
            100_000,
            {'m': 2, 'n': 2, **_IDENTITY_DEFAULTS},
            'both sides of the two-shock identity',
        ),
        Experiment(
            'concatenation',
            _run_concatenation,
            4.0,
            100,
            {'x_end': 0, 'taus': [1, 2, 3], 'ys': 20, 'variant': 'canonical'},
            'exact height split along backwards paths',
        ),
        Experiment(
            'comparison',
            _run_comparison,
            4.0,
            1000,
            {'rho': 0.5, 'x': -2, 'y': 2},
            'increment comparison of step and Bernoulli heights',
        ),
        Experiment(
            'coupling',
            _run_coupling,
            4.0,
            100,
            {'taus': [1, 2, 3], 'k': 4, 'rho': 0.5},
            'ordered heights stay ordered under the basic coupling',
        ),
        Experiment(
            'slowdec',
            _run_slowdec,
            1000.0,
            1000,
            {'alpha': 0.0, 'times': None, 'exponent': 0.8, 'epsilon': 1.0},
            'slow decorrelation along a characteristic',
        ),
        Experiment(
            'midtime',
            _run_midtime,
            1000.0,
            10_000,
            {
                'alpha': 0.0,
                'u_grid': list(_LADDER),
                'variant': 'canonical',
                'r_squared': 0.9,
            },
            'mid-time deviation tail of backwards paths',
        ),
        Experiment(
            'tube',
            _run_tube,
            1000.0,
            10_000,
            {
                'alpha': 0.0,
                'u_grid': list(_LADDER),
                'variant': 'canonical',
                'r_squared': 0.85,
            },
            'tube localization of backwards paths',
        ),
        Experiment(
            'stationary_exit',
            _run_stationary_exit,
            1000.0,
            10_000,
            {'rho': 0.5, 'm_grid': list(_LADDER), 'r_squared': 0.85},
            'exit point tail under Bernoulli initial data',
        ),
        Experiment(
            'shock1_limit',
            _run_shock1_limit,
            2000.0,
            2000,
            {
                'case': 'linear',
                'a': 0.5,
                'b': 0.5,
                'delta': None,
                'source': 'simulation',
                'tolerance': 0.05,
                'ladder': None,
            },
            'one-shock limit law at a finite time',
        ),
        Experiment(
            'shock2_limit',
            _run_shock2_limit,
            2000.0,
            2000,
            {
                'case': 'a',
                'm': 0.2,
                'n': 0.3,
                's_grid': None,
                'source': 'simulation',
                'tolerance': 0.05,
            },
            'two-shock limit law at a finite time',
        ),
        Experiment(
            'decoupling',
            _run_decoupling,
            2000.0,
            2000,
            {'alphas': [-0.4, 0.0, 0.4], 'bound': 0.1},
            'correlations of rescaled heights in distinct directions',
        ),
        Experiment(
            'local_gaussian',
            _run_local_gaussian,
            4000.0,
            2000,
            {
                'alpha': 0.0,
                'delta': 0.4,
                'beta': 0.0,
                'gamma1': 0.0,
                'gamma2': 1.0,
                'observable': 'N',
            },
            'Gaussian increments on mesoscopic scales',
        ),
        Experiment(
            'tw_onepoint',
            _run_tw_onepoint,
            4000.0,
            2000,
            {'alpha': 0.0, 'mean_tolerance': 0.1, 'variance_tolerance': 0.15},
            'one-point Tracy-Widom moments',
        ),
        Experiment(
            'tails',
            _run_tails,
            1000.0,
            10_000,
            {
                'alpha': 0.0,
                'u': 0.0,
                's_grid': [-4, -3, -2, -1, 0.5, 1, 1.5, 2, 2.5],
                'r_squared': 0.85,
            },
            'upper and lower tails of the rescaled height',
        ),
        Experiment(
            'window_doubling',
            _run_window_doubling,
            100.0,
            1000,
            {'xs': [-10, 0, 10], 'level': 0.01},
            'step counts do not change when the margin doubles',
        ),
        Experiment(
            'hydro_profile',
            _run_hydro_profile,
            200.0,
            200,
            {'a': 0.5, 'b': 0.5, 'bin': 10, 'tolerance': 0.05},
            'one-shock density profile against the Burgers solution',
        ),
    )
}
"""The registered experiments keyed by name."""


def _parameter(text: str) -> tuple[str, Any]:
    name, separator, value = text.partition('=')

    if not separator:
        raise ConfigurationError(f'expected name=value, got {text}')

    try:
        return name, json.loads(value)
    except json.JSONDecodeError:
        return name, value


def build_parser() -> ArgumentParser:
    """Create the command-line parser.

    :return: The parser.
    """
    parser = ArgumentParser(
        prog='taseplib',
        description='Run multicolor TASEP experiments.',
    )
    common = ArgumentParser(add_help=False)

    common.add_argument('--seed', type=int, default=0)
    common.add_argument('--replicas', type=int)
    common.add_argument('--t', type=float)
    common.add_argument('--out', default='out')
    common.add_argument('--window-factor', type=float, default=SPREAD_FACTOR)
    common.add_argument('--window', type=int, nargs=2, metavar=('LO', 'HI'))
    common.add_argument('--tw-ref')
    common.add_argument('--workers', type=int, default=1)
    common.add_argument(
        '--param',
        action='append',
        default=[],
        metavar='NAME=VALUE',
        help='an experiment parameter, the value parsed as JSON if possible',
    )
    parser.add_argument('-v', '--verbose', action='count', default=0)

    subparsers = parser.add_subparsers(dest='experiment', required=True)
    config = subparsers.add_parser(
        'config',
        help='run the experiment described by a JSON file',
    )

    config.add_argument('path')
    config.add_argument('--out')
    config.add_argument('--workers', type=int)

    for name, experiment in EXPERIMENTS.items():
        subparsers.add_parser(
            name,
            parents=[common],
            help=experiment.description,
        )

    return parser


def config_from_args(args: Namespace) -> ExperimentConfig:
    """Create a configuration from parsed arguments.

    :param args: The arguments.
    :return: The configuration.
    """
    if args.experiment == 'config':
        config = ExperimentConfig.load(args.path)
        overrides = {
            name: getattr(args, name)
            for name in ('out', 'workers')
            if getattr(args, name) is not None
        }

        return ExperimentConfig.from_dict({**config.to_dict(), **overrides})

    return ExperimentConfig(
        args.experiment,
        dict(map(_parameter, args.param)),
        args.seed,
        args.replicas,
        args.t,
        args.window_factor,
        None if args.window is None else tuple(args.window),
        args.tw_ref,
        args.out,
        args.workers,
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line.

    :param argv: The arguments, ``sys.argv[1:]`` if ``None``.
    :return: 0 if every verdict passed, 1 if one failed, 2 for bad input
             and 3 for boundary influence.
    """
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else (
            logging.INFO if args.verbose else logging.WARNING
        ),
        format='%(asctime)s %(name)s %(levelname)s %(message)s',
    )

    try:
        record = run(config_from_args(args))
    except BoundaryInfluenceError as error:
        logger.error('boundary influence: %s', error)

        return 3
    except ConfigurationError as error:
        logger.error('invalid configuration: %s', error)

        return 2

    for verdict in record.verdicts:
        if not verdict.passed:
            logger.warning('%s failed', verdict.name)

    return 0 if record.passed else 1
