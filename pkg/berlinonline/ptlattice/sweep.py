"""
`ptlattice.sweep` evaluates the spectrum and the domain verdict on a regular grid of
parameter points.

## Configuration

A sweep is configured using a YAML file like this:

```python
runner = SweepRunner('/path/to/sweep.yml')
rows = runner.run()
runner.write(rows)
```

The YAML file looks like this:

```yaml
coordinates: products # 'products' for (A, B, C) or 'cartesian' for (x, y, z)
ranges: # start, stop and step per coordinate, both ends included
  A: [0.05, 1.0, 0.05]
  B: [-0.1, 0.5, 0.05]
  C: [-1.0, 2.0, 0.1]
tol: 1.0e-10 # degeneracy tolerance
format: csv # csv or json
output_path: sweep.csv # where the results are written
jobs: 1 # number of worker processes
```

Only `ranges` is required. With `coordinates: cartesian` the ranges are keyed `x`, `y`, `z`
and every grid point is converted with `to_products()`.

Instead of a file, the same settings can be passed as a dictionary:

```python
runner = SweepRunner(config={'ranges': {'A': [1, 1, 1], 'B': [1, 1, 1], 'C': [0, 2, 0.5]}})
```

## Output

One row per grid point, the first coordinate varying slowest:
`A,B,C,n_real,classification,verdict`.
"""
import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Tuple

import progressbar
import yaml

from berlinonline.ptlattice.domain import membership
from berlinonline.ptlattice.export import rows_to_csv, to_json, write_output
from berlinonline.ptlattice.helper import GridRange, evaluate_cells
from berlinonline.ptlattice.lattice import CartesianCouplings, ProductCouplings, to_products
from berlinonline.ptlattice.secular import DEFAULT_TOL, spectrum

progressbar.streams.wrap_stderr()
LOG = logging.getLogger(__name__)

DEFAULT_COORDINATES = 'products'
"""
The default coordinate system of the `ranges`, if `coordinates` is not defined in the
YAML config.
"""

COORDINATE_NAMES = {
    'products': ('A', 'B', 'C'),
    'cartesian': ('x', 'y', 'z'),
}
"""The keys expected under `ranges` for each coordinate system."""

DEFAULT_FORMAT = 'csv'
"""
The default output format. Can be `csv` or `json`.
"""

DEFAULT_OUTPUT_PATH = 'sweep.csv'
"""
The default path of the output file. An empty path writes to stdout.
"""

DEFAULT_JOBS = 1
"""
The default number of worker processes.
"""

COLUMNS = ('A', 'B', 'C', 'n_real', 'classification', 'verdict')
"""The columns of a sweep result."""


@dataclass(frozen=True)
class SweepConfig:
    coordinates: str
    ranges: Tuple[GridRange, GridRange, GridRange]
    tol: float = DEFAULT_TOL
    format: str = DEFAULT_FORMAT
    output_path: str = DEFAULT_OUTPUT_PATH
    jobs: int = DEFAULT_JOBS

    def __post_init__(self):
        if self.coordinates not in COORDINATE_NAMES:
            raise ConfigException(f"coordinates must be one of {sorted(COORDINATE_NAMES)}, got '{self.coordinates}'")
        if self.format not in ('csv', 'json'):
            raise ConfigException(f"format must be 'csv' or 'json', got '{self.format}'")
        if not self.tol > 0:
            raise ConfigException(f"tol must be positive, got {self.tol}")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigException(f"jobs must be a positive integer, got {self.jobs}")

    def points(self) -> List[ProductCouplings]:
        """Return the grid points in row order, converted to product couplings."""
        first, second, third = (grid.values() for grid in self.ranges)
        points = []
        for u in first:
            for v in second:
                for w in third:
                    if self.coordinates == 'cartesian':
                        points.append(to_products(CartesianCouplings(float(u), float(v), float(w))))
                    else:
                        points.append(ProductCouplings(float(u), float(v), float(w)))
        return points


@dataclass(frozen=True)
class SweepRow:
    A: float
    B: float
    C: float
    n_real: int
    classification: str
    verdict: str

    def as_tuple(self) -> tuple:
        return (self.A, self.B, self.C, self.n_real, self.classification, self.verdict)


def _sweep_cell(cell: Tuple[ProductCouplings, float]) -> SweepRow:
    p, tol = cell
    result = spectrum(p, tol)
    verdict = membership(p, tol)
    return SweepRow(p.A, p.B, p.C, result.n_real, result.classification.value, verdict.verdict.value)


def _grid_range(key: str, value) -> GridRange:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigException(f"range '{key}' must be a list [start, stop, step], got {value}")
    try:
        start, stop, step = (float(part) for part in value)
    except (TypeError, ValueError):
        raise ConfigException(f"range '{key}' contains a value that is not a number: {value}")
    if step <= 0:
        raise ConfigException(f"step of range '{key}' must be positive, got {step}")
    if stop < start:
        raise ConfigException(f"range '{key}' is empty: {value}")
    return GridRange(start, stop, step)


class SweepRunner(object):
    config: dict
    sweep_config: SweepConfig

    def __init__(self, config_path: str = None, config: dict = None):

        if config is None:
            if not config_path or not os.path.isfile(config_path):
                raise ConfigException(f" no file found at {config_path}")

            with open(config_path) as config_file:
                LOG.info(f" loading configuration from {config_path} ...")
                config = yaml.safe_load(config_file)

        if not config:
            raise ConfigException(f" config at {config_path} is empty")
        self.config = config

        if 'ranges' not in self.config:
            raise ConfigException(f"No 'ranges' field found in {config_path or 'the config'}.")

        coordinates = self.read_config('coordinates', DEFAULT_COORDINATES)
        if coordinates not in COORDINATE_NAMES:
            raise ConfigException(f"coordinates must be one of {sorted(COORDINATE_NAMES)}, got '{coordinates}'")
        ranges = self.read_ranges(self.config['ranges'], COORDINATE_NAMES[coordinates])

        self.sweep_config = SweepConfig(
            coordinates=coordinates,
            ranges=ranges,
            tol=float(self.read_config('tol', DEFAULT_TOL)),
            format=self.read_config('format', DEFAULT_FORMAT),
            output_path=self.read_config('output_path', DEFAULT_OUTPUT_PATH),
            jobs=self.read_config('jobs', DEFAULT_JOBS),
        )

    def read_config(self, config_key: str, default):
        """Look up a sweep setting, falling back to `default` when the YAML leaves it out.

        Both outcomes are logged, so `-v` shows the effective sweep settings.
        """
        if config_key in self.config:
            value = self.config[config_key]
            LOG.info(f" sweep setting {config_key} = {value!r}")
            return value
        LOG.info(f" sweep setting {config_key} not given, defaulting to {default!r}")
        return default

    def read_ranges(self, ranges: Dict[str, list], names: Tuple[str, ...]) -> Tuple[GridRange, ...]:
        if not isinstance(ranges, dict):
            raise ConfigException(f"'ranges' must map {list(names)} to [start, stop, step], got {ranges}")
        missing = [name for name in names if name not in ranges]
        if missing:
            raise ConfigException(f"'ranges' lacks the coordinates {missing}")
        LOG.info(f" reading ranges: {ranges} ...")
        return tuple(_grid_range(name, ranges[name]) for name in names)

    def run(self, progress: bool = False) -> List[SweepRow]:
        points = self.sweep_config.points()
        LOG.info(f" sweeping {len(points)} points with {self.sweep_config.jobs} job(s) ...")
        cells = [(p, self.sweep_config.tol) for p in points]
        rows = evaluate_cells(_sweep_cell, cells, jobs=self.sweep_config.jobs, progress=progress)
        LOG.info(" sweep finished")
        return rows

    def render(self, rows: List[SweepRow]) -> str:
        if self.sweep_config.format == 'json':
            return to_json({
                "tol": self.sweep_config.tol,
                "rows": [dict(zip(COLUMNS, row.as_tuple())) for row in rows],
            })
        return rows_to_csv(COLUMNS, (row.as_tuple() for row in rows))

    def write(self, rows: List[SweepRow]):
        write_output(self.render(rows), self.sweep_config.output_path)


class ConfigException(Exception):
    pass
