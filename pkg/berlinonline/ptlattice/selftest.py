"""
`ptlattice.selftest` is the invariant battery behind `pt-lattice selftest`. Every check
compares two independent routes to the same quantity and reports the largest deviation:

1. `coefficient_identity`: secular coefficients against the Faddeev–LeVerrier oracle
2. `spectrum_vs_oracle`: Cardano/Viète spectra against Aberth–Ehrlich eigenvalues
3. `reference_intersections`: the six energies at (0.09, 0.1, 1) from the curve α(E)
4. `n4_ground_truth`: the punctured physical set of the four-site chain and its transitions
5. `gap_phenomenon`: two physical intervals and a gap in `C` for small negative `B`
6. `round_trips`: the implicit curves invert each other and give roots of the secular polynomial
7. `critical_points`: critical energies and the scaling of `b_ep`
8. `symmetry_battery`: negation, conjugation, PT symmetry and the ±α mirror

All randomized checks draw from `numpy.random.default_rng(seed)`, so a run is reproducible.
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from berlinonline.ptlattice import secular
from berlinonline.ptlattice.domain import (TransitionKind, Verdict, c_slice, classify_transition,
                                           membership, scan_line)
from berlinonline.ptlattice.helper import GridRange, match_multisets, relative_error
from berlinonline.ptlattice.implicit_boundary import (alpha_intersections, alpha_roots,
                                                      b_ep_of_c_branch, c_branch_profile,
                                                      critical_energies)
from berlinonline.ptlattice.lattice import (CartesianCouplings, ProductCouplings,
                                            build_hamiltonian6, build_product_representative,
                                            check_pt_symmetry)
from berlinonline.ptlattice.oracle import charpoly, eig_dense
from berlinonline.ptlattice.report import render

LOG = logging.getLogger(__name__)

DEFAULT_SEED = 1234
"""The default seed of the random draws."""

DEFAULT_SAMPLES = 1000
"""The default number of random points per randomized check."""

SAMPLE_BOX = (-2.0, 3.0)
"""Random product couplings are drawn uniformly from this interval in each coordinate."""

REFERENCE_POINT = ProductCouplings(0.09, 0.1, 1.0)
"""The parameter point of the intersection construction."""

N4_COUPLINGS = (0.5, 1.0, 2.0)
"""The inner couplings `a` of the four-site ground truth."""

GAP_POINTS = ((0.09, -0.01), (0.25, -0.01), (1.0, -0.1), (1.0, -0.2))
"""Fixed `(a, b)` points with `b_ep(√a) < b < 0`."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_error: float
    seconds: float
    detail: str = ''


def _random_points(rng: np.random.Generator, count: int) -> List[ProductCouplings]:
    lo, hi = SAMPLE_BOX
    return [ProductCouplings(*map(float, row)) for row in rng.uniform(lo, hi, size=(count, 3))]


def check_coefficient_identity(rng: np.random.Generator, samples: int) -> CheckResult:
    max_error = 0.0
    max_odd = 0.0
    for p in _random_points(rng, samples):
        expected = secular.coefficients(p).sextic()
        computed = charpoly(build_product_representative(p, 6))
        scale = max(1.0, float(np.max(np.abs(expected))))
        max_error = max(max_error, float(np.max(np.abs(computed - expected))) / scale)
        max_odd = max(max_odd, float(np.max(np.abs(computed[1::2]))))
    passed = max_error <= 1e-12 and max_odd <= 1e-13
    return CheckResult('coefficient_identity', passed, max_error, 0.0, f"odd coefficients up to {max_odd:.2e}")


def check_spectrum_vs_oracle(rng: np.random.Generator, samples: int) -> CheckResult:
    max_error = 0.0
    complexified = 0
    for p in _random_points(rng, samples):
        result = secular.spectrum(p)
        oracle = eig_dense(build_product_representative(p, 6))
        max_error = max(max_error, match_multisets(result.energies, oracle.eigenvalues))
        complexified += result.classification is secular.Classification.COMPLEXIFIED
    return CheckResult('spectrum_vs_oracle', max_error <= 1e-8, max_error, 0.0,
                       f"{complexified} of {samples} points complexified")


def check_reference_intersections(rng: np.random.Generator, samples: int) -> CheckResult:
    result = secular.spectrum(REFERENCE_POINT)
    energies = []
    for root in alpha_roots(REFERENCE_POINT.A):
        energies.extend(alpha_intersections(root.value, REFERENCE_POINT.B, REFERENCE_POINT.C))
    if len(energies) != 6:
        return CheckResult('reference_intersections', False, math.inf, 0.0, f"found {len(energies)} intersections")
    max_error = match_multisets(result.energies, energies)
    passed = result.classification is secular.Classification.ALL_REAL and max_error <= 1e-9
    return CheckResult('reference_intersections', passed, max_error, 0.0, result.classification.value)


def check_n4_ground_truth(rng: np.random.Generator, samples: int) -> CheckResult:
    max_error = 0.0
    problems = []
    scan_range = GridRange(-1.0, 1.0, 1e-4)
    for a in N4_COUPLINGS:
        scan = scan_line(ProductCouplings(a, 0.0, 0.0), (0.0, 0.0, 1.0), scan_range, dim=4)
        pieces = scan.physical_set()
        if len(pieces) != 2 or pieces[1][1] != scan_range.stop:
            problems.append(f"a={a}: physical set {pieces}")
            max_error = math.inf
            continue
        (lo, mid_left), (mid_right, _) = pieces
        max_error = max(max_error, abs(lo + a / 4), abs(mid_left), abs(mid_right))

        second = classify_transition(ProductCouplings(a, 0.0, 0.0), (0, 0, 1), dim=4)
        first = classify_transition(ProductCouplings(a, 0.0, -a / 4), (0, 0, 1), dim=4)
        if second.kind is not TransitionKind.SECOND_KIND or first.kind is not TransitionKind.FIRST_KIND:
            problems.append(f"a={a}: transitions {second.kind.value} at 0, {first.kind.value} at -a/4")
    passed = not problems and max_error <= 1e-6
    return CheckResult('n4_ground_truth', passed, max_error, 0.0, '; '.join(problems))


def _gap_points(rng: np.random.Generator) -> List[tuple]:
    points = list(GAP_POINTS)
    for alpha in rng.uniform(0.3, 2.0, size=3):
        b_ep = b_ep_of_c_branch(float(alpha))
        points.append((float(alpha) ** 2, float(rng.uniform(0.2, 0.8) * b_ep)))
    return points


def check_gap_phenomenon(rng: np.random.Generator, samples: int) -> CheckResult:
    problems = []
    narrowest = math.inf
    for a, b in _gap_points(rng):
        boundary_slice = c_slice(a, b)
        if len(boundary_slice.intervals) != 2 or boundary_slice.gap is None:
            problems.append(f"({a}, {b}): {len(boundary_slice.intervals)} interval(s)")
            continue
        (c_min, c_max), (c_ep, _) = boundary_slice.intervals
        narrowest = min(narrowest, c_ep - c_max)
        expected = [((c_min + c_max) / 2, Verdict.PHYSICAL),
                    ((c_max + c_ep) / 2, Verdict.UNPHYSICAL),
                    (c_ep + 1.0, Verdict.PHYSICAL)]
        for c, verdict in expected:
            found = membership(ProductCouplings(a, b, c)).verdict
            if found is not verdict:
                problems.append(f"({a}, {b}, {c}): {found.value} instead of {verdict.value}")
    passed = not problems and narrowest > 0
    return CheckResult('gap_phenomenon', passed, 0.0 if passed else math.inf, 0.0,
                       '; '.join(problems) or f"narrowest gap {narrowest:.3e}")


ROUND_TRIP_BOX = {'e': (-4.0, 4.0), 'alpha': (0.05, 3.0), 'b': (-3.0, 3.0)}
"""Sampling box of the implicit-curve round trips. `alpha` is drawn with a random sign."""

ROUND_TRIP_MARGIN = 0.05
"""Draws with `|E|`, `|E - α|` or `|B|` below this are rejected and redrawn."""


def _round_trip_draws(rng: np.random.Generator, count: int) -> tuple:
    """Draw `(E, α, B)` until `count` of them clear `ROUND_TRIP_MARGIN`."""
    accepted = [np.empty(0)] * 3
    attempts = 0
    while accepted[0].size < count:
        batch = count - accepted[0].size
        attempts += batch
        e = rng.uniform(*ROUND_TRIP_BOX['e'], size=batch)
        alpha = rng.uniform(*ROUND_TRIP_BOX['alpha'], size=batch) * rng.choice((-1.0, 1.0), size=batch)
        b = rng.uniform(*ROUND_TRIP_BOX['b'], size=batch)
        keep = np.minimum.reduce([np.abs(e), np.abs(e - alpha), np.abs(b)]) >= ROUND_TRIP_MARGIN
        accepted = [np.concatenate((old, new[keep])) for old, new in zip(accepted, (e, alpha, b))]
    return (*accepted, attempts)


def check_round_trips(rng: np.random.Generator, samples: int) -> CheckResult:
    e, alpha, b, attempts = _round_trip_draws(rng, 100 * samples)

    c = e * e - b * e / (e - alpha)
    alpha_back = (1 - b / (e * e - c)) * e
    b_back = (e - alpha) * (e * e - c) / e
    alpha_error = float(np.max(np.abs(alpha_back - alpha) / np.maximum(1.0, np.abs(alpha))))
    b_error = float(np.max(np.abs(b_back - b) / np.maximum(1.0, np.abs(b))))

    residual = 0.0
    for e_i, alpha_i, b_i, c_i in zip(e, alpha, b, c):
        k = secular.coefficients(ProductCouplings(float(alpha_i * alpha_i), float(b_i), float(c_i)))
        s = float(e_i * e_i)
        scale = ((s + abs(k.c4)) * s + abs(k.c2)) * s + abs(k.c0)
        residual = max(residual, abs(secular.eval_secular(float(e_i), k)) / scale)

    max_error = max(alpha_error, b_error)
    passed = max_error <= 1e-10 and residual <= 1e-11
    return CheckResult('round_trips', passed, max_error, 0.0,
                       f"{e.size} accepted draws of {attempts}, relative secular residual up to {residual:.2e}")


def check_critical_points(rng: np.random.Generator, samples: int) -> CheckResult:
    b_ep_one = b_ep_of_c_branch(1.0)
    scaling_error = 0.0
    implicit_error = 0.0
    for alpha in (0.3, 0.5, 1.0, 2.0):
        expected = alpha * alpha * b_ep_one
        scaling_error = max(scaling_error, relative_error(b_ep_of_c_branch(alpha), expected))
        for b in (0.5 * expected, 1.5 * expected, 0.1, 2.0):
            for energy in critical_energies(alpha, b):
                implicit = -2 * energy * (energy - alpha) ** 2
                implicit_error = max(implicit_error, relative_error(implicit, alpha * b))
    max_error = max(scaling_error, implicit_error)
    return CheckResult('critical_points', max_error <= 1e-10, max_error, 0.0,
                       f"b_ep(1) = {b_ep_one:.12f}")


def check_symmetry_battery(rng: np.random.Generator, samples: int) -> CheckResult:
    max_error = 0.0
    for p in _random_points(rng, samples):
        energies = np.array(secular.spectrum(p).energies)
        max_error = max(max_error, match_multisets(energies, -energies),
                        match_multisets(energies, energies.conjugate()))

    broken = 0
    for x, y, z in rng.uniform(-2.0, 2.0, size=(100, 3)):
        broken += not check_pt_symmetry(build_hamiltonian6(CartesianCouplings(float(x), float(y), float(z))))

    for alpha in rng.uniform(0.3, 2.0, size=5):
        alpha = float(alpha)
        for b in (1.0, 0.5 * b_ep_of_c_branch(alpha)):
            plus = c_branch_profile(alpha, b)
            minus = c_branch_profile(-alpha, b)
            max_error = max(
                max_error,
                match_multisets(plus.zeros, [-zero for zero in minus.zeros]),
                match_multisets(plus.critical_energies, [-energy for energy in minus.critical_energies]),
                abs(plus.c_ep - minus.c_ep),
            )
    passed = broken == 0 and max_error <= 1e-10
    return CheckResult('symmetry_battery', passed, max_error, 0.0, f"{broken} PT-symmetry failures")


CHECKS: List[Callable[[np.random.Generator, int], CheckResult]] = [
    check_coefficient_identity,
    check_spectrum_vs_oracle,
    check_reference_intersections,
    check_n4_ground_truth,
    check_gap_phenomenon,
    check_round_trips,
    check_critical_points,
    check_symmetry_battery,
]
"""The checks run by `run_selftest()`, in order."""


def run_selftest(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> List[CheckResult]:
    """Run every check with its own generator derived from `seed`.

    A check that raises counts as failed, with the exception as its detail.
    """
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    results = []
    for index, check in enumerate(CHECKS):
        rng = np.random.default_rng([seed, index])
        name = check.__name__[len('check_'):]
        LOG.info(f" running {name} ...")
        start = time.perf_counter()
        try:
            result = check(rng, samples)
        except Exception as exc:
            LOG.warning(f" {name} raised {exc!r}")
            result = CheckResult(name, False, math.inf, 0.0, f"{type(exc).__name__}: {exc}")
        seconds = time.perf_counter() - start
        results.append(CheckResult(result.name, result.passed, result.max_error, seconds, result.detail))
    return results


def render_report(results: List[CheckResult], samples: int, seed: int) -> str:
    return render('selftest.txt.jinja', checks=results, samples=samples, seed=seed)
