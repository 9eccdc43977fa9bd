"""
`ptlattice.secular` is the closed-form spectral engine. The characteristic polynomial of the
six-site Hamiltonian is even in the energy `E` and cubic in `s = E²`:

```
E⁶ + c4·E⁴ + c2·E² + c0 = 0
c4 = -(A + 2B + 2C)
c2 = B² + C² + 2AC + 2BC
c0 = -A·C²
```

The cubic in `s` is solved in closed form (`solve_monic_cubic()`), the six energies are the
square roots `±√s`, and the spectrum is classified as `AllReal`, `Degenerate` or `Complexified`.

The four-site chain has the quartic `E⁴ - (2λ+a)·E² + λ²`, solved by `spectrum4()`.

The sextic factorizes as `Q₊(E)·Q₋(E)` with `Q±(E) = (E ∓ α)(E² - C) - B·E` and `α = √A`
(`factor_cubic()`). Every implicit curve in `ptlattice.implicit_boundary` is a level set of
one of these factors.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from berlinonline.ptlattice.helper import sort_energies
from berlinonline.ptlattice.lattice import ProductCouplings

LOG = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
"""
The default absolute tolerance on `|s|` and on the separation of two s-roots, below which
a root counts as degenerate.
"""

NEWTON_STEPS = 3
"""Maximal number of Newton steps used to polish each root of the cubic."""

DOUBLE_ROOT_TOLERANCE = 8 * float(np.finfo(float).eps)
"""
A discriminant below this fraction of `(q/2)² + |p/3|³` is rounding noise around a double
root and is treated as zero.
"""

CONDITIONING_FACTOR = 16
"""
Two s-roots closer than this multiple of the rounding error of a double root at their
midpoint are coalesced, whatever `tol` is.
"""

EPS = float(np.finfo(float).eps)


class Classification(Enum):
    ALL_REAL = 'AllReal'
    DEGENERATE = 'Degenerate'
    COMPLEXIFIED = 'Complexified'


@dataclass(frozen=True)
class SecularCoefficients:
    c4: float
    c2: float
    c0: float

    def as_array(self) -> np.ndarray:
        """Return the monic coefficients of the cubic in `s`, highest degree first."""
        return np.array([1.0, self.c4, self.c2, self.c0])

    def sextic(self) -> np.ndarray:
        """Return the seven coefficients of the polynomial in `E`, highest degree first."""
        return np.array([1.0, 0.0, self.c4, 0.0, self.c2, 0.0, self.c0])


@dataclass(frozen=True)
class SpectrumResult:
    """The energies of one parameter point.

    `energies` are sorted by descending real part, then descending imaginary part.
    `s_roots` are the roots of the cubic (or quadratic) in `s = E²` they were taken from.
    """
    energies: Tuple[complex, ...]
    n_real: int
    s_roots: Tuple[complex, ...]
    classification: Classification
    tol_used: float
    degenerate: Tuple[bool, ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.energies)

    def min_separation(self) -> float:
        """Return the smallest distance between two s-roots."""
        roots = self.s_roots
        distances = [abs(roots[i] - roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots))]
        return min(distances) if distances else math.inf


def coefficients(p: ProductCouplings) -> SecularCoefficients:
    A, B, C = p.A, p.B, p.C
    return SecularCoefficients(
        c4=-(2 * C + 2 * B + A),
        c2=2 * B * C + 2 * A * C + C * C + B * B,
        c0=-A * C * C,
    )


def eval_secular(e, k: SecularCoefficients):
    """Evaluate `E⁶ + c4·E⁴ + c2·E² + c0` by Horner's scheme in `E²`.

    Works for real and complex `E`, scalars as well as numpy arrays.
    """
    s = e * e
    return ((s + k.c4) * s + k.c2) * s + k.c0


def _cubic_value(s, a2: float, a1: float, a0: float):
    return ((s + a2) * s + a1) * s + a0


def _cubic_slope(s, a2: float, a1: float):
    return (3 * s + 2 * a2) * s + a1


def _polish(root, a2: float, a1: float, a0: float):
    """Run up to NEWTON_STEPS Newton steps, keeping a step only when it lowers |f|."""
    value = abs(_cubic_value(root, a2, a1, a0))
    for _ in range(NEWTON_STEPS):
        if value == 0:
            break
        slope = _cubic_slope(root, a2, a1)
        if slope == 0:
            break
        candidate = root - _cubic_value(root, a2, a1, a0) / slope
        candidate_value = abs(_cubic_value(candidate, a2, a1, a0))
        if candidate_value >= value:
            break
        root, value = candidate, candidate_value
    return root


def cubic_discriminant(a2: float, a1: float, a0: float) -> float:
    """Return the discriminant of `s³ + a2·s² + a1·s + a0`.

    Positive for three distinct real roots, zero for a multiple root, negative for one
    real root and a complex-conjugate pair.
    """
    return 18 * a2 * a1 * a0 - 4 * a2 ** 3 * a0 + a2 ** 2 * a1 ** 2 - 4 * a1 ** 3 - 27 * a0 ** 2


def solve_monic_cubic(a2: float, a1: float, a0: float) -> List[complex]:
    """Return the three roots of `s³ + a2·s² + a1·s + a0`.

    With three real roots the trigonometric (Viète) form is used, so the roots come out
    exactly real. Otherwise Cardano's formula is applied with the larger-magnitude real
    cube root, and the complex pair is returned as exact conjugates. Every root is polished
    by Newton's method.

    Args:
        a2 (float): coefficient of s²
        a1 (float): coefficient of s
        a0 (float): constant term

    Returns:
        List[complex]: the roots, sorted by descending real part, then imaginary part
    """
    shift = a2 / 3
    p = a1 - a2 * a2 / 3
    q = 2 * a2 ** 3 / 27 - a2 * a1 / 3 + a0
    d = (q / 2) ** 2 + (p / 3) ** 3

    if p == 0 and q == 0:
        LOG.debug(" cubic has a triple root")
        roots = [complex(-shift)] * 3
    elif d <= 0 or (p < 0 and d <= DOUBLE_ROOT_TOLERANCE * ((q / 2) ** 2 + abs(p / 3) ** 3)):
        LOG.debug(f" cubic has three real roots (d={d:.3e}), using the trigonometric form")
        radius = 2 * math.sqrt(-p / 3)
        argument = (3 * q / (2 * p)) * math.sqrt(-3 / p)
        phi = math.acos(min(1.0, max(-1.0, argument)))
        real_roots = [radius * math.cos(phi / 3 - 2 * math.pi * k / 3) - shift for k in range(3)]
        roots = [complex(_polish(root, a2, a1, a0)) for root in real_roots]
    else:
        LOG.debug(f" cubic has one real root (d={d:.3e}), using Cardano's formula")
        w = -q / 2 - math.copysign(math.sqrt(d), q)
        u = float(np.cbrt(w))
        v = -p / (3 * u)
        real_root = _polish(u + v - shift, a2, a1, a0)
        pair = complex(-(u + v) / 2 - shift, math.sqrt(3) / 2 * (u - v))
        pair = _polish(pair, a2, a1, a0)
        roots = [complex(real_root), pair, pair.conjugate()]

    return sort_energies(roots)


def solve_s_cubic(k: SecularCoefficients) -> List[complex]:
    """Return the three roots in `s = E²` of the secular polynomial."""
    return solve_monic_cubic(k.c4, k.c2, k.c0)


def _solve_quadratic(b: float, c: float) -> List[complex]:
    """Return the roots of `s² + b·s + c` without cancellation."""
    disc = b * b - 4 * c
    if disc >= 0:
        if b == 0 and disc == 0:
            return [0j, 0j]
        big = -(b + math.copysign(math.sqrt(disc), b)) / 2
        small = c / big if big != 0 else 0.0
        return sort_energies([big, small])
    root = complex(-b / 2, math.sqrt(-disc) / 2)
    return sort_energies([root, root.conjugate()])


def coalescence_floor(s_roots: Sequence[complex], i: int, j: int) -> float:
    """Return how far apart the roots `i` and `j` may be and still be one double root.

    A double root of a polynomial is only determined to about the square root of the
    rounding error of the polynomial near it, a triple root to about its cube root.
    """
    middle = (s_roots[i] + s_roots[j]) / 2
    size = math.prod(abs(middle) + abs(s) for s in s_roots)
    others = math.prod(abs(middle - s) for k, s in enumerate(s_roots) if k not in (i, j))
    noise = EPS * size
    double = math.sqrt(noise / others) if others > 0 else math.inf
    return CONDITIONING_FACTOR * min(double, noise ** (1 / 3))


def _assemble(s_roots: Sequence[complex], tol: float) -> SpectrumResult:
    """Turn s-roots into energies `±√s` and classify them."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    s_roots = [complex(s) for s in s_roots]
    degenerate = []
    complexifying = []
    for i, s in enumerate(s_roots):
        coalesced = any(abs(s - other) <= max(tol, coalescence_floor(s_roots, i, j))
                        for j, other in enumerate(s_roots) if j != i)
        is_degenerate = abs(s) <= tol or coalesced
        off_axis = abs(s.imag) > tol or s.real < -tol
        degenerate.append(is_degenerate)
        complexifying.append(off_axis if not is_degenerate else s.real < -tol)

    if any(complexifying):
        classification = Classification.COMPLEXIFIED
    elif any(degenerate):
        classification = Classification.DEGENERATE
    else:
        classification = Classification.ALL_REAL

    energies = []
    n_real = 0
    for s, is_degenerate in zip(s_roots, degenerate):
        if (abs(s.imag) <= tol or is_degenerate) and s.real >= -tol:
            n_real += 2
            e = complex(math.sqrt(s.real) if s.real > 0 else 0.0)
        else:
            e = cmath.sqrt(s)
        energies.extend([e, 0j - e])

    return SpectrumResult(
        energies=tuple(sort_energies(energies)),
        n_real=n_real,
        s_roots=tuple(s_roots),
        classification=classification,
        tol_used=tol,
        degenerate=tuple(degenerate),
    )


def spectrum(p: ProductCouplings, tol: float = DEFAULT_TOL) -> SpectrumResult:
    """Return the six energies of the six-site Hamiltonian at `p`.

    Args:
        p (ProductCouplings): the point (A, B, C)
        tol (float, optional): degeneracy tolerance. Defaults to DEFAULT_TOL.

    Returns:
        SpectrumResult: energies, `n_real`, s-roots and classification
    """
    return _assemble(solve_s_cubic(coefficients(p)), tol)


def spectrum4(lam: float, a: float, tol: float = DEFAULT_TOL) -> SpectrumResult:
    """Return the four energies of the four-site Hamiltonian from `E⁴ - (2λ+a)E² + λ² = 0`."""
    return _assemble(_solve_quadratic(-(2 * lam + a), lam * lam), tol)


def spectrum_of(p: ProductCouplings, dim: int = 6, tol: float = DEFAULT_TOL) -> SpectrumResult:
    """Dispatch to `spectrum()` or, for `dim=4`, to `spectrum4(p.C, p.A)`."""
    if dim == 6:
        return spectrum(p, tol)
    if dim == 4:
        return spectrum4(p.C, p.A, tol)
    raise ValueError(f"no secular polynomial for dimension {dim}")


def count_real_energies(p: ProductCouplings, tol: float = DEFAULT_TOL, dim: int = 6) -> int:
    return spectrum_of(p, dim, tol).n_real


def factor_cubic(e, p: ProductCouplings, sign: int = 1):
    """Evaluate `Q±(E) = (E ∓ α)(E² - C) - B·E` with `α = √A`.

    Args:
        e: real or complex energy (or numpy array)
        p (ProductCouplings): the point, `A >= 0`
        sign (int, optional): +1 for Q₊, -1 for Q₋. Defaults to 1.
    """
    if p.A < 0:
        raise ValueError(f"the factorization needs A >= 0, got A={p.A}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    alpha = math.sqrt(p.A)
    return (e - sign * alpha) * (e * e - p.C) - p.B * e
