"""
`ptlattice.domain` decides where in `(A, B, C)` the spectrum is real and simple, and what
happens when that region is left.

- `membership()` classifies a single point as `Physical`, `Unphysical` or `Boundary`. The
  coordinate planes `A=0`, `B=0` and `C=0` are boundary by construction.
- `c_slice()` and `detect_gap()` give the physical set of `C` for fixed `(A, B)` from the
  branch profile of C(E).
- `classify_transition()` tells a first-kind crossing (energies complexify on one side) from a
  second-kind crossing (two real levels cross).
- `trace_boundary()` collects the boundary sheets over an `(A, B)` grid.
- `scan_line()` follows a straight line through parameter space and refines every change of
  verdict.

All operations accept `dim=4` for the four-site chain, whose points are carried as
`ProductCouplings(A=a, B=<unused>, C=λ)`.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect, linear_sum_assignment, minimize_scalar

from berlinonline.ptlattice.helper import GridRange, evaluate_cells
from berlinonline.ptlattice.implicit_boundary import c_branch_profile
from berlinonline.ptlattice.lattice import ProductCouplings
from berlinonline.ptlattice.secular import (DEFAULT_TOL, Classification, SpectrumResult,
                                            spectrum_of)

LOG = logging.getLogger(__name__)

DEFAULT_EPS = 1e-4
"""Default perturbation size for `classify_transition()`."""

REFINE_XTOL = 1e-13
"""Absolute tolerance for refining verdict changes along a line."""

PUNCTURE_WIDTH = 1e-6
"""Two physical runs separated by at most this much boundary are joined at a puncture."""

SPACING_DIP = 0.9
"""A grid minimum of the level spacing is refined only below this fraction of its larger neighbour."""

PLANES = {6: ('A', 'B', 'C'), 4: ('A', 'C')}
"""The coordinate planes that belong to the boundary, per dimension."""


class Verdict(Enum):
    PHYSICAL = 'Physical'
    UNPHYSICAL = 'Unphysical'
    BOUNDARY = 'Boundary'


class TransitionKind(Enum):
    FIRST_KIND = 'FirstKind'
    SECOND_KIND = 'SecondKind'


@dataclass(frozen=True)
class DomainVerdict:
    verdict: Verdict
    n_real: int
    min_separation: float
    tol: float
    classification: Classification
    plane: Optional[str] = None
    dim: int = 6


@dataclass(frozen=True)
class BoundarySlice:
    """The physical set of `C` at fixed `(a, b)`: open intervals minus the punctures."""
    a: float
    b: float
    intervals: Tuple[Tuple[float, float], ...]
    gap: Optional[Tuple[float, float]] = None
    punctures: Tuple[float, ...] = ()
    note: str = ''
    dim: int = 6

    def contains(self, c: float) -> bool:
        if any(c == puncture for puncture in self.punctures):
            return False
        return any(lo < c < hi for lo, hi in self.intervals)

    def endpoints(self) -> List[float]:
        return [value for interval in self.intervals for value in interval if math.isfinite(value)]


@dataclass(frozen=True)
class TransitionReport:
    point: ProductCouplings
    direction: Tuple[float, float, float]
    kind: TransitionKind
    eps: float
    tol: float
    minus: SpectrumResult
    at: SpectrumResult
    plus: SpectrumResult
    assignment: Tuple[int, ...] = ()
    dim: int = 6


@dataclass(frozen=True)
class BoundaryMesh:
    """Tagged boundary points `(A, B, C, tag)` in grid order, plus the analytic planes."""
    points: Tuple[Tuple[float, float, float, str], ...]
    planes: Tuple[str, ...] = PLANES[6]

    @property
    def sheet_counts(self) -> Dict[str, int]:
        counts = {}
        for point in self.points:
            counts[point[3]] = counts.get(point[3], 0) + 1
        return counts

    @property
    def sheets(self) -> Tuple[str, ...]:
        return tuple(sorted(self.sheet_counts))

    def plane_records(self) -> Tuple[Tuple[Optional[float], Optional[float], Optional[float], str], ...]:
        """Return one `(A, B, C, "plane_<name>")` record per analytic plane.

        The plane coordinate is 0, the free coordinates are `None`.
        """
        records = []
        for name in self.planes:
            values = [0.0 if coordinate == name else None for coordinate in ('A', 'B', 'C')]
            records.append((*values, f"plane_{name}"))
        return tuple(records)


@dataclass(frozen=True)
class LineScan:
    """Verdicts along `origin + t·direction`.

    `runs` are the refined physical stretches, with `punctures` already joined inside them.
    `transitions` are the refined parameters `t` where the line enters or leaves the
    physical region. Runs touching the ends of the scan end at the scan limits.
    """
    origin: ProductCouplings
    direction: Tuple[float, float, float]
    samples: Tuple[float, ...]
    verdicts: Tuple[Verdict, ...]
    runs: Tuple[Tuple[float, float], ...]
    punctures: Tuple[float, ...] = ()
    transitions: Tuple[float, ...] = ()
    tol: float = DEFAULT_TOL
    dim: int = 6

    def point(self, t: float) -> ProductCouplings:
        return self.origin.shifted(np.array(self.direction), t)

    def physical_set(self) -> List[Tuple[float, float]]:
        """Return the runs split at their punctures."""
        pieces = []
        for lo, hi in self.runs:
            cuts = sorted(puncture for puncture in self.punctures if lo < puncture < hi)
            edges = [lo] + cuts + [hi]
            pieces.extend(zip(edges[:-1], edges[1:]))
        return pieces


def _plane(p: ProductCouplings, tol: float, dim: int) -> Optional[str]:
    for name in PLANES[dim]:
        if abs(getattr(p, name)) <= tol:
            return name
    return None


def _judge(p: ProductCouplings, tol: float, dim: int) -> Tuple[DomainVerdict, SpectrumResult]:
    if dim not in PLANES:
        raise ValueError(f"no lattice model for dimension {dim}")
    result = spectrum_of(p, dim, tol)
    plane = _plane(p, tol, dim)
    if plane is not None or result.classification is Classification.DEGENERATE:
        verdict = Verdict.BOUNDARY
    elif result.classification is Classification.ALL_REAL:
        verdict = Verdict.PHYSICAL
    else:
        verdict = Verdict.UNPHYSICAL
    return DomainVerdict(verdict, result.n_real, result.min_separation(), tol,
                         result.classification, plane, dim), result


def membership(p: ProductCouplings, tol: float = DEFAULT_TOL, dim: int = 6) -> DomainVerdict:
    """Classify `p` as Physical, Unphysical or Boundary.

    Args:
        p (ProductCouplings): the point
        tol (float, optional): degeneracy and plane tolerance. Defaults to DEFAULT_TOL.
        dim (int, optional): 6 or 4. Defaults to 6.

    Returns:
        DomainVerdict: the verdict with its evidence
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return _judge(p, tol, dim)[0]


def c_slice(a: float, b: float, tol: float = DEFAULT_TOL, dim: int = 6) -> BoundarySlice:
    """Return the physical set of `C` for fixed `(a, b)`.

    For `dim=4` the set of `λ` is `(-a/4, ∞)` punctured at 0 and `b` is ignored.
    """
    if a <= tol:
        note = "A=0 is a boundary plane" if abs(a) <= tol else "A < 0 has no real energies"
        return BoundarySlice(a, b, (), None, (), note, dim)

    if dim == 4:
        return BoundarySlice(a, b, ((-a / 4, math.inf),), None, (0.0,), "lambda in (-a/4, inf) minus 0", dim)

    if abs(b) <= tol:
        return BoundarySlice(a, b, (), None, (), "B=0 is a boundary plane", dim)

    profile = c_branch_profile(math.sqrt(a), b)
    if profile.has_gap:
        intervals = ((profile.c_min, profile.c_max), (profile.c_ep, math.inf))
        gap = (profile.c_max, profile.c_ep)
        note = "b_ep < B < 0: anomalous interval and gap"
    else:
        intervals = ((profile.c_ep, math.inf),)
        gap = None
        note = "B > 0" if b > 0 else "B < b_ep"
    punctures = (0.0,) if any(lo < 0 < hi for lo, hi in intervals) else ()
    return BoundarySlice(a, b, intervals, gap, punctures, note, dim)


def detect_gap(a: float, b: float, tol: float = DEFAULT_TOL) -> Optional[Tuple[float, float]]:
    """Return the unphysical gap `(c_max, c_ep)` at `(a, b)`, if there is one."""
    if a <= tol or abs(b) <= tol:
        return None
    return c_slice(a, b, tol).gap


def classify_transition(p: ProductCouplings, direction: Sequence[float], eps: float = DEFAULT_EPS,
                        tol: float = DEFAULT_TOL, dim: int = 6) -> TransitionReport:
    """Classify the boundary crossing at `p` along `direction`.

    The spectra at `p - eps·d`, `p` and `p + eps·d` (`d` normalized) decide:

    - FirstKind: one side is Complexified, the other AllReal.
    - SecondKind: both sides are AllReal and two levels exchange their order. The energies
      at `p + eps·d` are matched to the linear continuation `2E(p) - E(p - eps·d)`, and a
      non-identity matching is the exchange.

    Args:
        p (ProductCouplings): a Boundary point
        direction (Sequence[float]): the crossing direction in (A, B, C)
        eps (float, optional): the perturbation. Defaults to DEFAULT_EPS.
        tol (float, optional): degeneracy tolerance. Defaults to DEFAULT_TOL.
        dim (int, optional): 6 or 4. Defaults to 6.

    Returns:
        TransitionReport: the kind with the three spectra as evidence
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    d = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(d))
    if d.shape != (3,) or norm == 0:
        raise ValueError(f"direction must be a nonzero 3-vector, got {direction}")
    d = d / norm

    verdict, at = _judge(p, tol, dim)
    if verdict.verdict is not Verdict.BOUNDARY:
        raise NotOnBoundaryException(f"{p} is {verdict.verdict.value}, not on the boundary")

    minus = spectrum_of(p.shifted(d, -eps), dim, tol)
    plus = spectrum_of(p.shifted(d, eps), dim, tol)
    sides = {minus.classification, plus.classification}
    LOG.debug(f" crossing at {p}: {minus.classification.value} / {plus.classification.value}")

    def report(kind: TransitionKind, assignment=()) -> TransitionReport:
        return TransitionReport(p, tuple(float(x) for x in d), kind, eps, tol, minus, at, plus,
                                tuple(int(i) for i in assignment), dim)

    if sides == {Classification.COMPLEXIFIED, Classification.ALL_REAL}:
        return report(TransitionKind.FIRST_KIND)

    if sides == {Classification.ALL_REAL}:
        predicted = 2 * np.array(at.energies) - np.array(minus.energies)
        cost = np.abs(predicted[:, None] - np.array(plus.energies)[None, :])
        _, assignment = linear_sum_assignment(cost)
        if np.any(assignment != np.arange(assignment.size)):
            return report(TransitionKind.SECOND_KIND, assignment)
        raise InconclusiveCrossingException(
            f"both sides of {p} are AllReal but no levels cross; try an eps smaller than {eps}")

    raise InconclusiveCrossingException(
        f"sides of {p} are {minus.classification.value} and {plus.classification.value}; "
        f"try an eps smaller than {eps}")


def _trace_cell(cell: Tuple[float, float, float]) -> List[Tuple[float, float, float, str]]:
    a, b, tol = cell
    if a <= tol or abs(b) <= tol:
        return []
    profile = c_branch_profile(math.sqrt(a), b)
    points = []
    if profile.has_gap:
        points.append((a, b, profile.c_min, 'c_min'))
        points.append((a, b, profile.c_max, 'c_max'))
    points.append((a, b, profile.c_ep, 'c_ep'))
    return points


def trace_boundary(a_range: GridRange, b_range: GridRange, tol: float = DEFAULT_TOL,
                   jobs: int = 1, progress: bool = False) -> BoundaryMesh:
    """Collect the numeric boundary sheets `c_ep`, `c_min`, `c_max` over an `(A, B)` grid.

    Cells are independent and may be spread over `jobs` processes. The points come back in
    grid order (A outer, B inner) either way. The planes `A=0`, `B=0` and `C=0` are part of
    the result as analytic sheets, cells on them emit no points.
    """
    cells = [(float(a), float(b), tol) for a in a_range.values() for b in b_range.values()]
    LOG.info(f" tracing the boundary over {len(cells)} cells")
    results = evaluate_cells(_trace_cell, cells, jobs=jobs, progress=progress)
    mesh = BoundaryMesh(tuple(point for points in results for point in points))
    LOG.info(f" emitted {len(mesh.points)} boundary points on sheets {mesh.sheet_counts}")
    return mesh


def _level_spacing(result: SpectrumResult) -> float:
    energies = np.array(result.energies)
    differences = np.abs(energies[:, None] - energies[None, :])
    return float(differences[np.triu_indices(energies.size, 1)].min())


def scan_line(origin: ProductCouplings, direction: Sequence[float], t_range: GridRange,
              tol: float = DEFAULT_TOL, dim: int = 6) -> LineScan:
    """Scan membership along `origin + t·direction` and refine what the grid finds.

    Every change between physical and non-physical grid points is refined by bisection.
    Punctures are found two ways. Physical runs separated by boundary samples only, over at
    most one grid step, are joined at the minimum of the level spacing between them. Local
    minima of the level spacing inside a run are refined and kept if they turn out to be
    Boundary. Wider boundary stretches are left as gaps between runs.

    Args:
        origin (ProductCouplings): the point at `t = 0`
        direction (Sequence[float]): the (unnormalized) direction in (A, B, C)
        t_range (GridRange): the scanned values of `t`
        tol (float, optional): degeneracy tolerance. Defaults to DEFAULT_TOL.
        dim (int, optional): 6 or 4. Defaults to 6.

    Returns:
        LineScan: the verdicts, physical runs, punctures and transitions
    """
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,) or not np.any(d):
        raise ValueError(f"direction must be a nonzero 3-vector, got {direction}")
    ts = t_range.values()
    judged = [_judge(origin.shifted(d, t), tol, dim) for t in ts]
    verdicts = [verdict.verdict for verdict, _ in judged]
    physical = [verdict is Verdict.PHYSICAL for verdict in verdicts]

    def verdict_at(t: float) -> Verdict:
        return _judge(origin.shifted(d, t), tol, dim)[0].verdict

    def indicator(t: float) -> float:
        return 1.0 if verdict_at(t) is Verdict.PHYSICAL else -1.0

    index_runs = []
    start = None
    for i, flag in enumerate(physical):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            index_runs.append((start, i - 1))
            start = None
    if start is not None:
        index_runs.append((start, len(ts) - 1))

    def spacing_at(t: float) -> float:
        return _level_spacing(spectrum_of(origin.shifted(d, t), dim, tol))

    def crossing_between(lo: float, hi: float) -> Optional[float]:
        found = minimize_scalar(spacing_at, bounds=(lo, hi), method='bounded', options={'xatol': REFINE_XTOL})
        return float(found.x) if verdict_at(found.x) is Verdict.BOUNDARY else None

    last = len(ts) - 1
    runs = []
    punctures = []
    previous_end = None
    for i, j in index_runs:
        lo = ts[i] if i == 0 else bisect(indicator, ts[i - 1], ts[i], xtol=REFINE_XTOL)
        hi = ts[j] if j == last else bisect(indicator, ts[j], ts[j + 1], xtol=REFINE_XTOL)

        spacing = [_level_spacing(judged[k][1]) for k in range(i, j + 1)]
        for k in range(1, len(spacing) - 1):
            larger = max(spacing[k - 1], spacing[k + 1])
            if spacing[k] < spacing[k - 1] and spacing[k] <= spacing[k + 1] and spacing[k] <= SPACING_DIP * larger:
                crossing = crossing_between(ts[i + k - 1], ts[i + k + 1])
                if crossing is not None:
                    LOG.debug(f" level crossing inside a physical run at t={crossing}")
                    punctures.append(crossing)

        # a boundary stretch narrower than the grid is the tolerance halo of a single crossing
        joined = False
        if runs:
            gap = lo - runs[-1][1]
            halo = all(verdicts[k] is Verdict.BOUNDARY for k in range(previous_end + 1, i))
            if gap <= max(PUNCTURE_WIDTH, t_range.step) and halo:
                crossing = crossing_between(runs[-1][1], lo)
                if crossing is not None:
                    punctures.append(crossing)
                    runs[-1] = (runs[-1][0], hi)
                    joined = True
        if not joined:
            runs.append((lo, hi))
        previous_end = j

    transitions = [edge for lo, hi in runs for edge in (lo, hi) if edge not in (ts[0], ts[-1])]
    LOG.debug(f" line scan: runs {runs}, punctures {punctures}")
    return LineScan(
        origin=origin,
        direction=tuple(float(x) for x in d),
        samples=tuple(float(t) for t in ts),
        verdicts=tuple(verdicts),
        runs=tuple((float(lo), float(hi)) for lo, hi in runs),
        punctures=tuple(sorted(punctures)),
        transitions=tuple(float(t) for t in transitions),
        tol=tol,
        dim=dim,
    )


def slice_scan(a: float, b: float, c_range: GridRange, tol: float = DEFAULT_TOL,
               dim: int = 6) -> List[Tuple[float, Verdict]]:
    """Return `(C, verdict)` for every grid value of `C` at fixed `(a, b)`."""
    return [(float(c), membership(ProductCouplings(a, b, float(c)), tol, dim).verdict)
            for c in c_range.values()]


class NotOnBoundaryException(Exception):
    pass


class InconclusiveCrossingException(Exception):
    pass
