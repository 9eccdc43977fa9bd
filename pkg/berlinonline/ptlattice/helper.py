import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence

import numpy as np
import progressbar
from scipy.optimize import linear_sum_assignment

LOG = logging.getLogger(__name__)

GRID_SLACK = 1e-9
"""Fraction of a step by which a range may fall short of `stop` and still reach it."""


@dataclass(frozen=True)
class GridRange:
    """An inclusive, evenly spaced range of values, written as `start:stop:step`."""
    start: float
    stop: float
    step: float

    def values(self) -> np.ndarray:
        """Return `start + k * step` for every `k` with the value not beyond `stop`.

        The step is never changed: `0:1:0.3` yields `0, 0.3, 0.6, 0.9`. A last value
        within `GRID_SLACK` steps of `stop` is snapped onto `stop`, so `0:1:0.1` ends
        exactly at 1.
        """
        if self.start == self.stop:
            return np.array([self.start])
        count = int(np.floor((self.stop - self.start) / self.step + GRID_SLACK)) + 1
        values = self.start + self.step * np.arange(count)
        if abs(values[-1] - self.stop) <= GRID_SLACK * self.step:
            values[-1] = self.stop
        return values


def parse_range(text: str) -> GridRange:
    """Parse a range like `-1:3:0.01` into a `GridRange`.

    Args:
        text (str): `start:stop:step`, with `step > 0` and `stop >= start`

    Returns:
        GridRange: the parsed range
    """
    parts = text.strip().split(':')
    if len(parts) != 3:
        raise BadRangeException(f"'{text}' does not look like a range 'start:stop:step'.")
    try:
        start, stop, step = (float(part) for part in parts)
    except ValueError:
        raise BadRangeException(f"'{text}' contains a value that is not a number.")
    if not all(np.isfinite([start, stop, step])):
        raise BadRangeException(f"'{text}' contains a non-finite value.")
    if step <= 0:
        raise BadRangeException(f"step in '{text}' must be positive.")
    if stop < start:
        raise BadRangeException(f"range '{text}' is empty.")
    return GridRange(start, stop, step)


def parse_grid(text: str, dimensions: int) -> List[GridRange]:
    """Parse a comma-separated list of ranges, e.g. `0.01:3:0.01,-1:3:0.01`."""
    parts = [part for part in text.split(',') if part.strip()]
    if len(parts) != dimensions:
        raise BadRangeException(f"'{text}' must contain {dimensions} ranges, found {len(parts)}.")
    return [parse_range(part) for part in parts]


def parse_vector(text: str) -> np.ndarray:
    """Parse `1,0,0` into a float vector."""
    try:
        return np.array([float(part) for part in text.split(',')])
    except ValueError:
        raise BadRangeException(f"'{text}' is not a comma-separated list of numbers.")


def sort_energies(values: Iterable[complex]) -> List[complex]:
    """Order energies by descending real part, then descending imaginary part."""
    return sorted((complex(value) for value in values), key=lambda e: (-e.real, -e.imag))


def match_multisets(first: Sequence[complex], second: Sequence[complex]) -> float:
    """Pair the elements of two equally long multisets so that the total distance is
    minimal and return the largest distance of a matched pair.

    Sorting alone is not enough to compare spectra from different solvers: a conjugate
    pair whose real parts agree only to rounding may come out in either order.
    """
    first = np.asarray(first, dtype=complex)
    second = np.asarray(second, dtype=complex)
    if first.shape != second.shape:
        raise ValueError(f"cannot match multisets of sizes {first.size} and {second.size}")
    if first.size == 0:
        return 0.0
    cost = np.abs(first[:, None] - second[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def relative_error(value: float, reference: float) -> float:
    """Return |value - reference| / max(1, |reference|)."""
    return abs(value - reference) / max(1.0, abs(reference))


def evaluate_cells(func: Callable, cells: Sequence, jobs: int = 1, progress: bool = False) -> list:
    """Apply `func` to every cell and return the results in cell order.

    With `jobs > 1` the cells are spread over a process pool. `func` must then be a
    module-level function. Either way the results come back index-ordered, so serial and
    parallel runs are interchangeable.

    Args:
        func (Callable): a picklable function of one cell
        cells (Sequence): the independent work items
        jobs (int, optional): number of worker processes. Defaults to 1.
        progress (bool, optional): show a progress bar. Defaults to False.

    Returns:
        list: `[func(cell) for cell in cells]`
    """
    LOG.debug(f" evaluating {len(cells)} cells with {jobs} job(s)")
    results = []
    bar = progressbar.ProgressBar(max_value=len(cells)) if progress else progressbar.NullBar(max_value=len(cells))
    with bar:
        if jobs <= 1:
            for counter, cell in enumerate(cells):
                results.append(func(cell))
                bar.update(counter + 1)
        else:
            chunksize = max(1, len(cells) // (8 * jobs))
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                for counter, result in enumerate(executor.map(func, cells, chunksize=chunksize)):
                    results.append(result)
                    bar.update(counter + 1)
    return results


class BadRangeException(Exception):
    pass
