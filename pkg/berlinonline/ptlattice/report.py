"""
`ptlattice.report` renders human-readable text reports with Jinja2. The templates live in
the package (`berlinonline/ptlattice/templates`) and can use the filters of `ReportFilters`:

```jinja
{{ 0.000123456 | sci }}              -> 1.23e-04
{{ energy | energy }}                 -> 1.8019377358-0.0000000000i
{{ check.passed | status }}           -> PASS
{{ [0.5, inf] | interval }}           -> (0.5, ∞)
```

The `energy` filter uses the `precision` of the `ReportEnvironment` it is called from.
"""
import logging
import math
from typing import Sequence

from jinja2 import Environment, PackageLoader, StrictUndefined, pass_environment
from jinja2.ext import Extension

LOG = logging.getLogger(__name__)

DEFAULT_PRECISION = 10
"""Number of decimals of energies in text reports."""


class ReportEnvironment(Environment):
    """Jinja2 environment that loads the report templates of this package."""
    precision: int

    def __init__(self, precision: int = DEFAULT_PRECISION, **kwargs):
        kwargs.setdefault('loader', PackageLoader('berlinonline.ptlattice', 'templates'))
        kwargs.setdefault('extensions', [ReportFilters])
        kwargs.setdefault('undefined', StrictUndefined)
        kwargs.setdefault('keep_trailing_newline', True)
        kwargs.setdefault('trim_blocks', True)
        kwargs.setdefault('lstrip_blocks', True)
        super().__init__(**kwargs)
        self.precision = precision


class ReportFilters(Extension):
    """Jinja2 extension with the number formatting filters for reports."""

    def __init__(self, environment):
        super().__init__(environment)

        environment.filters['sci'] = self.sci
        environment.filters['energy'] = self.energy
        environment.filters['status'] = self.status
        environment.filters['interval'] = self.interval

    @staticmethod
    def sci(value: float) -> str:
        """Format a float in scientific notation with three significant digits."""
        if value is None:
            return '-'
        return f"{value:.2e}"

    @staticmethod
    @pass_environment
    def energy(environment: ReportEnvironment, value: complex) -> str:
        """Format a complex energy as `re±im·i`."""
        value = complex(value)
        precision = getattr(environment, 'precision', DEFAULT_PRECISION)
        sign = '-' if value.imag < 0 else '+'
        return f"{value.real:.{precision}f}{sign}{abs(value.imag):.{precision}f}i"

    @staticmethod
    def status(passed: bool) -> str:
        return 'PASS' if passed else 'FAIL'

    @staticmethod
    def interval(bounds: Sequence[float]) -> str:
        """Format an open interval, writing an infinite end as `∞`."""
        def end(value):
            if value is None or (isinstance(value, float) and math.isinf(value)):
                return '∞' if value is None or value > 0 else '-∞'
            return f"{value:.10g}"
        lo, hi = bounds
        return f"({end(lo)}, {end(hi)})"


def render(template_name: str, precision: int = DEFAULT_PRECISION, **context) -> str:
    environment = ReportEnvironment(precision=precision)
    LOG.debug(f" rendering {template_name}")
    return environment.get_template(template_name).render(**context)
