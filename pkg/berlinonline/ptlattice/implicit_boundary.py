"""
`ptlattice.implicit_boundary` describes the boundary of the physical domain through the
implicit curves of the factor `Q₊(E) = (E - α)(E² - C) - B·E` of the secular polynomial
(`α = √A`). Solving `Q₊(E) = 0` for one coupling at a time gives three explicit curves:

```
C(E) = E² - B·E / (E - α)          pole at E = α
α(E) = (1 - B / (E² - C))·E        poles at E² = C
B(E) = (E - α)(E² - C) / E         pole at E = 0
```

A horizontal line at the value of the coupling cuts the curve once per real energy of `Q₊`,
and the energies of `Q₋` are the mirror images. All six energies are real and simple exactly
when the line cuts the curve three times, so the critical levels of the curves are where the
physical domain ends.

## Branch profiles

`c_branch_profile()` catalogs the curve `C(E)` for fixed `(α, B)`:

- `B > 0`: a single minimum `c_ep` left of the pole, physical set `C ∈ (c_ep, ∞)`.
- `b_ep < B < 0`: a local minimum `c_min` and a local maximum `c_max` left of the pole and a
  minimum `c_ep` right of it. The physical set `(c_min, c_max) ∪ (c_ep, ∞)` has a gap.
- `B < b_ep`: only `c_ep` remains.

`alpha_profile()` does the same for `α(E)` at fixed `(B, C)`, `b_threshold()` for `B(E)`
at fixed `(C, α)`.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect, brentq

from berlinonline.ptlattice.lattice import ProductCouplings
from berlinonline.ptlattice.secular import (Classification, cubic_discriminant,
                                            solve_monic_cubic, spectrum)

LOG = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-12
"""Curve evaluations closer than this to a pole raise `PoleException`."""

SCAN_STEP = 1e-3
"""Grid step of the sign-change scans that bracket critical points and intersections."""

B_EP_XTOL = 1e-13
"""Absolute bisection tolerance for `b_ep_of_c_branch()`."""

ROOT_XTOL = 1e-15
"""Absolute `brentq` tolerance for critical points and intersections."""

MAX_ALPHA_EXTREMA = 4
"""More extrema of α(E) than this are reported as a diagnostic."""


@dataclass(frozen=True)
class AlphaRoot:
    """One of the two real square roots `α = ±√A` of the innermost coupling."""
    value: float
    sign: int
    a_source: float

    @classmethod
    def from_a(cls, a: float, sign: int = 1) -> 'AlphaRoot':
        if a < 0:
            raise ValueError(f"A={a} has no real square root")
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        return cls(sign * math.sqrt(a), sign, a)


def alpha_roots(a: float) -> Tuple[AlphaRoot, AlphaRoot]:
    return AlphaRoot.from_a(a, 1), AlphaRoot.from_a(a, -1)


@dataclass(frozen=True)
class BranchProfile:
    """Zeros, critical energies and critical levels of the curve C(E) for fixed (α, B)."""
    alpha: float
    b: float
    pole: float
    zeros: Tuple[float, ...]
    critical_energies: Tuple[float, ...]
    c_ep: float
    c_min: Optional[float] = None
    c_max: Optional[float] = None
    b_ep: Optional[float] = None
    tolerances: Dict[str, float] = field(default_factory=lambda: {
        'pole': POLE_TOLERANCE, 'b_ep_xtol': B_EP_XTOL, 'root_xtol': ROOT_XTOL})

    @property
    def has_gap(self) -> bool:
        return self.c_min is not None and self.c_max is not None


@dataclass(frozen=True)
class AlphaProfile:
    """The admissible values of `A` for fixed `(B, C)`.

    `admissible` holds open intervals in `A` (the upper end may be `math.inf`) on which
    all six energies are real and simple. `gap` lies between the anomalous component and the
    bulk interval when both exist.
    """
    b: float
    c: float
    critical_energies: Tuple[float, ...]
    critical_levels: Tuple[float, ...]
    admissible: Tuple[Tuple[float, float], ...]
    gap: Optional[Tuple[float, float]] = None
    notes: Tuple[str, ...] = ()


def c_of_e(e: float, b: float, alpha: float) -> float:
    """Return `C(E) = E² - B·E/(E - α)`."""
    if abs(e - alpha) < POLE_TOLERANCE:
        raise PoleException(f"C(E) has a pole at E=alpha={alpha}")
    return e * e - b * e / (e - alpha)


def alpha_of_e(e: float, b: float, c: float) -> float:
    """Return `α(E) = (1 - B/(E² - C))·E`."""
    if abs(e * e - c) < POLE_TOLERANCE:
        raise PoleException(f"alpha(E) has a pole at E²=C={c}")
    return (1 - b / (e * e - c)) * e


def alpha_of_e_partial(e: float, b: float, c: float) -> float:
    """Return α(E) in the partial-fraction form `E - (B/2)(1/(E+γ) + 1/(E-γ))`, `C = γ² > 0`."""
    if c <= 0:
        raise ValueError(f"the partial-fraction form needs C > 0, got C={c}")
    if abs(e * e - c) < POLE_TOLERANCE:
        raise PoleException(f"alpha(E) has a pole at E²=C={c}")
    gamma = math.sqrt(c)
    return e - b / 2 * (1 / (e + gamma) + 1 / (e - gamma))


def b_of_e(e: float, c: float, alpha: float) -> float:
    """Return `B(E) = (E - α)(E² - C)/E`."""
    if abs(e) < POLE_TOLERANCE:
        raise PoleException("B(E) has a pole at E=0")
    return (e - alpha) * (e * e - c) / e


def zeros_of_c(alpha: float, b: float) -> Optional[Tuple[float, float]]:
    """Return the zeros `(α ± √(α² + 4B))/2` of C(E) besides `E = 0`, larger one first.

    Returns `None` when `α² + 4B < 0` and the zeros are not real.
    """
    disc = alpha * alpha + 4 * b
    if disc < 0:
        return None
    root = math.sqrt(disc)
    return (alpha + root) / 2, (alpha - root) / 2


def _critical_cubic(alpha: float, b: float) -> Tuple[float, float, float]:
    # 2E³ - 4αE² + 2α²E + αB, divided by 2
    return -2 * alpha, alpha * alpha, alpha * b / 2


def critical_energies(alpha: float, b: float) -> List[float]:
    """Return the real critical energies of C(E), the real roots of `αB = -2E(E - α)²`.

    Args:
        alpha (float): the branch `α`, nonzero
        b (float): the coupling `B`

    Returns:
        List[float]: the real roots in ascending order
    """
    if alpha == 0:
        raise BoundaryPlaneException("alpha=0 lies on the boundary plane A=0")
    roots = solve_monic_cubic(*_critical_cubic(alpha, b))
    return sorted(root.real for root in roots if root.imag == 0.0)


def b_ep_of_c_branch(alpha: float) -> float:
    """Return the negative `B` at which the two critical energies left of the pole coalesce.

    Located by bisection on the sign of the discriminant of the critical-point cubic
    over `B ∈ [-α², -α²/1000]`.
    """
    if alpha == 0:
        raise BoundaryPlaneException("alpha=0 lies on the boundary plane A=0")
    a = abs(alpha)

    def discriminant_sign(b: float) -> float:
        return float(np.sign(cubic_discriminant(*_critical_cubic(a, b))))

    b_ep = bisect(discriminant_sign, -a * a, -1e-3 * a * a, xtol=B_EP_XTOL)
    LOG.debug(f" b_ep({alpha}) = {b_ep}")
    return b_ep


def c_branch_profile(alpha: float, b: float) -> BranchProfile:
    """Return the profile of C(E) for the branch `α` and the coupling `B`.

    Negative `α` is answered by the mirror `E -> -E` of the profile of `|α|`: zeros and
    critical energies change sign, the levels stay the same.

    Args:
        alpha (float): nonzero branch `α = ±√A`
        b (float): nonzero coupling `B`

    Returns:
        BranchProfile: the profile
    """
    if alpha == 0:
        raise BoundaryPlaneException("alpha=0 lies on the boundary plane A=0")
    if b == 0:
        raise UnphysicalLimitException("B=0 is the boundary plane where both factors share roots")
    if alpha < 0:
        mirrored = c_branch_profile(-alpha, b)
        return replace(
            mirrored,
            alpha=alpha,
            pole=alpha,
            zeros=tuple(sorted(-zero for zero in mirrored.zeros)),
            critical_energies=tuple(sorted(-energy for energy in mirrored.critical_energies)),
        )

    b_ep = b_ep_of_c_branch(alpha)
    roots = solve_monic_cubic(*_critical_cubic(alpha, b))
    real_roots = sorted(root.real for root in roots if root.imag == 0.0)
    c_min = c_max = None
    if b > 0:
        criticals = [real_roots[0]]
        c_ep = c_of_e(criticals[0], b, alpha)
    elif b > b_ep:
        criticals = real_roots if len(real_roots) == 3 else sorted(root.real for root in roots)
        c_min, c_max, c_ep = (c_of_e(energy, b, alpha) for energy in criticals)
    else:
        criticals = [real_roots[-1]]
        c_ep = c_of_e(criticals[0], b, alpha)

    zeros = [0.0]
    other_zeros = zeros_of_c(alpha, b)
    if other_zeros is not None:
        zeros.extend(other_zeros)

    LOG.debug(f" profile alpha={alpha} b={b}: critical energies {criticals}, c_ep={c_ep}")
    return BranchProfile(
        alpha=alpha,
        b=b,
        pole=alpha,
        zeros=tuple(sorted(zeros)),
        critical_energies=tuple(criticals),
        c_ep=c_ep,
        c_min=c_min,
        c_max=c_max,
        b_ep=b_ep,
    )


def _alpha_slope(e: np.ndarray, b: float, c: float) -> np.ndarray:
    """α'(E) = 1 + B(E² + C)/(E² - C)²"""
    return 1 + b * (e * e + c) / (e * e - c) ** 2


def _alpha_curve(e: np.ndarray, b: float, c: float) -> np.ndarray:
    return (1 - b / (e * e - c)) * e


def _poles(c: float) -> List[float]:
    if c > 0:
        gamma = math.sqrt(c)
        return [-gamma, gamma]
    if c == 0:
        return [0.0]
    return []


def _segments(radius: float, c: float, step: float) -> List[np.ndarray]:
    """Return grids over [-radius, radius] that stop just short of the poles of α(E)."""
    edges = [-radius] + [pole for pole in _poles(c) if -radius < pole < radius] + [radius]
    grids = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        lo_inner = lo + 1e-9 if lo != -radius else lo
        hi_inner = hi - 1e-9 if hi != radius else hi
        if hi_inner <= lo_inner:
            continue
        count = max(3, int(math.ceil((hi_inner - lo_inner) / step)) + 1)
        grids.append(np.linspace(lo_inner, hi_inner, count))
    return grids


def _sign_change_roots(func, grids: List[np.ndarray]) -> List[float]:
    roots = []
    for grid in grids:
        with np.errstate(divide='ignore', invalid='ignore'):
            values = func(grid)
        for i in range(grid.size - 1):
            left, right = values[i], values[i + 1]
            if not (np.isfinite(left) and np.isfinite(right)):
                continue
            if left == 0:
                roots.append(float(grid[i]))
            elif left * right < 0:
                roots.append(brentq(lambda e: float(func(np.float64(e))), grid[i], grid[i + 1], xtol=ROOT_XTOL))
        if values.size and values[-1] == 0:
            roots.append(float(grid[-1]))
    unique = []
    for root in sorted(roots):
        if not unique or abs(root - unique[-1]) > 1e-12:
            unique.append(root)
    return unique


def alpha_critical_energies(b: float, c: float, step: float = SCAN_STEP) -> List[float]:
    """Return the real critical points of α(E), bracketed by a sign-change scan of α'(E)."""
    # the critical points solve u² + (B - 2C)u + C² + BC = 0 in u = E², bounded by Cauchy's bound
    radius = math.sqrt(1 + max(abs(b - 2 * c), abs(c * c + b * c))) + step
    return _sign_change_roots(lambda e: _alpha_slope(e, b, c), _segments(radius, c, step))


def alpha_profile(b: float, c: float, step: float = SCAN_STEP) -> AlphaProfile:
    """Return the admissible `A`-intervals for fixed `(B, C)`.

    The critical levels of α(E) split the half-line `α > 0` into intervals on which the
    number of intersections of α(E) with the line at height `α` is constant. One level per
    interval is tested for six simple real energies.

    Args:
        b (float): the coupling `B`
        c (float): the coupling `C`
        step (float, optional): scan step for the critical points. Defaults to SCAN_STEP.

    Returns:
        AlphaProfile: critical energies and levels, admissible intervals and the gap
    """
    if c == 0:
        return AlphaProfile(b, c, (), (), (), None, ("C=0 is a boundary plane",))

    notes = []
    criticals = alpha_critical_energies(b, c, step)
    levels = [alpha_of_e(energy, b, c) for energy in criticals]
    if len(criticals) > MAX_ALPHA_EXTREMA:
        LOG.warning(f" alpha(E) has {len(criticals)} extrema for b={b}, c={c}, "
                    f"expected at most {MAX_ALPHA_EXTREMA}")
        notes.append(f"{len(criticals)} extrema of alpha(E)")

    edges = [0.0] + sorted({level for level in levels if level > 0}) + [math.inf]
    admissible = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sample = (lo + hi) / 2 if math.isfinite(hi) else lo + 1.0
        verdict = spectrum(ProductCouplings(sample * sample, b, c)).classification
        LOG.debug(f" alpha in ({lo}, {hi}): sample {sample} is {verdict.value}")
        if verdict is Classification.ALL_REAL:
            admissible.append((lo * lo, hi * hi))

    gap = None
    if len(admissible) >= 2 and admissible[-2][1] < admissible[-1][0]:
        gap = (admissible[-2][1], admissible[-1][0])

    return AlphaProfile(
        b=b,
        c=c,
        critical_energies=tuple(criticals),
        critical_levels=tuple(levels),
        admissible=tuple(admissible),
        gap=gap,
        notes=tuple(notes),
    )


def alpha_intersections(level: float, b: float, c: float, step: float = SCAN_STEP) -> List[float]:
    """Return every real `E` with `α(E) = level`, i.e. the real energies of `Q₊` at `α = level`.

    The scan covers `|E| <= 1 + max(|level|, |B + C|, |level·C|)`, which bounds the roots of
    the cubic `E³ - level·E² - (B + C)E + level·C`.
    """
    radius = 1 + max(abs(level), abs(b + c), abs(level * c)) + step
    return _sign_change_roots(lambda e: _alpha_curve(e, b, c) - level, _segments(radius, c, step))


def b_threshold(c: float, alpha: float) -> float:
    """Return the lower end of the physical `B` for fixed `(C, α)`.

    For `C >= 0` this is 0. For `C < 0` it is the minimum of the U-shaped side of B(E),
    found with `brentq` on the numerator `2E³ - αE² - αC` of B'(E). The limit `α -> 0` is `-C`.
    """
    if c >= 0:
        return 0.0
    if alpha == 0:
        return -c
    a = abs(alpha)

    def slope_numerator(e: float) -> float:
        return 2 * e ** 3 - a * e * e - a * c

    lo = -1.0
    while slope_numerator(lo) >= 0:
        lo *= 2
    e_star = brentq(slope_numerator, lo, 0.0, xtol=ROOT_XTOL)
    threshold = b_of_e(e_star, c, a)
    LOG.debug(f" b_threshold(c={c}, alpha={alpha}) = {threshold} at E={e_star}")
    return threshold


CURVES = {
    'c': (c_of_e, ('b', 'alpha'), 'C'),
    'alpha': (alpha_of_e, ('b', 'c'), 'alpha'),
    'b': (b_of_e, ('c', 'alpha'), 'B'),
}
"""The sampleable curves: function, parameter names and value column name."""


def sample_curve(kind: str, e_values, **params) -> List[Tuple[float, float]]:
    """Return `(E, value)` rows of the curve `kind` ('c', 'alpha' or 'b'), skipping poles.

    Example:
        sample_curve('c', np.linspace(-2, 2, 401), b=0.1, alpha=0.3)
    """
    if kind not in CURVES:
        raise ValueError(f"unknown curve '{kind}', use one of {sorted(CURVES)}")
    func, names, _ = CURVES[kind]
    missing = [name for name in names if name not in params]
    if missing:
        raise ValueError(f"curve '{kind}' needs the parameters {list(names)}, missing {missing}")
    rows = []
    for e in e_values:
        try:
            rows.append((float(e), func(float(e), *(params[name] for name in names))))
        except PoleException:
            LOG.debug(f" skipping pole at E={e}")
    return rows


class PoleException(Exception):
    pass


class UnphysicalLimitException(Exception):
    pass


class BoundaryPlaneException(Exception):
    pass
