"""
`ptlattice.cli` is the command-line front end, installed as `pt-lattice`:

```
pt-lattice spectrum --A 0.09 --B 0.1 --C 1
pt-lattice spectrum --x 0 --y 0 --z 0 --format text
pt-lattice slice --A 0.09 --B -0.01 --scan=-0.01:0.3:0.001
pt-lattice slice --A 1 --dim 4 --refine=-1:1:0.001
pt-lattice profile --alpha 0.3 --B -0.01
pt-lattice trace --grid 0.01:3:0.01,-1:3:0.01 --jobs 4 --out mesh.csv
pt-lattice classify --A 1 --C 0 --dim 4 --direction 0,0,1
pt-lattice selftest --samples 10000
pt-lattice sweep --config sweep.yml
pt-lattice curve --kind c --B 0.1 --alpha 0.3 --e-range=-2:2:0.01
```

Exit codes: 0 on success, 2 on usage and parse errors, 3 on numerical or tolerance failures.
"""
import argparse
import dataclasses
import logging
import math
import sys
from typing import List, Optional

import numpy as np
import yaml

from berlinonline.ptlattice import selftest
from berlinonline.ptlattice.domain import (DEFAULT_EPS, InconclusiveCrossingException,
                                           NotOnBoundaryException, c_slice, classify_transition,
                                           membership, scan_line, slice_scan, trace_boundary)
from berlinonline.ptlattice.export import (alpha_profile_to_dict, branch_profile_to_dict,
                                           curve_to_csv, eigen_to_dict, line_scan_to_dict,
                                           matrix_to_csv, matrix_to_dict, mesh_to_csv, rows_to_csv,
                                           slice_to_dict, spectrum_to_dict, to_json,
                                           transition_to_dict, verdict_to_dict, write_output)
from berlinonline.ptlattice.helper import BadRangeException, parse_grid, parse_range, parse_vector
from berlinonline.ptlattice.implicit_boundary import (CURVES, BoundaryPlaneException, PoleException,
                                                      UnphysicalLimitException, alpha_profile,
                                                      c_branch_profile, sample_curve)
from berlinonline.ptlattice.lattice import (CartesianCouplings, DomainException,
                                            InvalidDimensionException, NoRealPreimageException,
                                            ProductCouplings, hamiltonian_for, to_products)
from berlinonline.ptlattice.oracle import OracleConvergenceException, eig_dense
from berlinonline.ptlattice.report import render
from berlinonline.ptlattice.secular import DEFAULT_TOL, spectrum_of
from berlinonline.ptlattice.sweep import ConfigException, SweepRunner

LOG = logging.getLogger(__name__)

DEFAULT_A_RANGE = '0.01:3:0.01'
"""The default range of `A` for `trace` and `sweep --grid`."""

DEFAULT_B_RANGE = '-1:3:0.01'
"""The default range of `B` for `trace` and `sweep --grid`."""

DEFAULT_C_SCAN = '-1:6:0.001'
"""The default range of `C` for `slice --scan` without a value."""

DEFAULT_E_RANGE = '-3:3:0.01'
"""The default range of `E` for `curve`."""

CURVE_FLAGS = {'b': 'B', 'c': 'C', 'alpha': 'alpha'}
"""The command-line flag of each curve parameter."""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _finite_float(text: str) -> float:
    """`argparse` type for a finite float."""
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text} is not a finite number")
    return value


def _positive_float(text: str) -> float:
    """`argparse` type for a finite float above zero."""
    value = _finite_float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return value


def _read_direction(text: str) -> np.ndarray:
    direction = parse_vector(text)
    if direction.shape != (3,) or not np.all(np.isfinite(direction)) or not np.any(direction):
        raise UsageException(f"--direction must be a nonzero vector 'dA,dB,dC', got '{text}'")
    return direction


def _read_point(args: argparse.Namespace) -> ProductCouplings:
    """Build the point from either `--A/--B/--C` or `--x/--y/--z`.

    For `--dim 4` only `A` (or `x`) and `C` (or `z`, the outer coupling λ) are needed.
    """
    products = {name: getattr(args, name) for name in ('A', 'B', 'C')}
    cartesian = {name: getattr(args, name) for name in ('x', 'y', 'z')}
    given_products = any(value is not None for value in products.values())
    given_cartesian = any(value is not None for value in cartesian.values())
    if given_products and given_cartesian:
        raise UsageException("use either --A/--B/--C or --x/--y/--z, not both")
    if not given_products and not given_cartesian:
        raise UsageException("a point needs --A/--B/--C or --x/--y/--z")

    values = products if given_products else cartesian
    required = ('A', 'C') if args.dim == 4 else ('A', 'B', 'C')
    if given_cartesian:
        required = ('x', 'z') if args.dim == 4 else ('x', 'y', 'z')
    missing = [name for name in required if values[name] is None]
    if missing:
        raise UsageException(f"missing {', '.join('--' + name for name in missing)}")

    if given_cartesian:
        return to_products(CartesianCouplings(*(value if value is not None else 0.0 for value in values.values())))
    return ProductCouplings(*(value if value is not None else 0.0 for value in values.values()))


def cmd_spectrum(args: argparse.Namespace) -> int:
    p = _read_point(args)
    result = spectrum_of(p, args.dim, args.tol)
    if args.format == 'text':
        text = render('spectrum.txt.jinja', point=p, result=result)
    elif args.format == 'csv' and args.matrix:
        text = matrix_to_csv(hamiltonian_for(p, args.dim))
    elif args.format == 'csv':
        text = rows_to_csv(('re', 'im'), ((e.real, e.imag) for e in result.energies))
    else:
        data = spectrum_to_dict(result)
        data['verdict'] = verdict_to_dict(membership(p, args.tol, args.dim))
        if args.matrix:
            data['matrix'] = matrix_to_dict(hamiltonian_for(p, args.dim))
        if args.oracle:
            data['oracle'] = eigen_to_dict(eig_dense(hamiltonian_for(p, args.dim)))
        text = to_json(data)
    write_output(text, args.out)
    return EXIT_OK


def cmd_slice(args: argparse.Namespace) -> int:
    if args.A is None or (args.B is None and args.dim == 6):
        raise UsageException("slice needs --A and --B")
    b = args.B if args.B is not None else 0.0
    if args.scan is not None:
        rows = slice_scan(args.A, b, parse_range(args.scan), args.tol, args.dim)
        text = rows_to_csv(('C', 'verdict'), rows)
    elif args.refine is not None:
        scan = scan_line(ProductCouplings(args.A, b, 0.0), (0.0, 0.0, 1.0), parse_range(args.refine),
                         args.tol, args.dim)
        text = to_json(line_scan_to_dict(scan))
    else:
        text = to_json(slice_to_dict(c_slice(args.A, b, args.tol, args.dim)))
    write_output(text, args.out)
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    if args.B is None:
        raise UsageException("profile needs --B")
    if args.alpha is not None:
        text = to_json(branch_profile_to_dict(c_branch_profile(args.alpha, args.B)))
    elif args.C is not None:
        text = to_json(alpha_profile_to_dict(alpha_profile(args.B, args.C)))
    else:
        raise UsageException("profile needs --alpha (C-branch) or --C (alpha curve)")
    write_output(text, args.out)
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    a_range, b_range = parse_grid(args.grid, 2)
    mesh = trace_boundary(a_range, b_range, args.tol, jobs=args.jobs, progress=args.progress)
    write_output(mesh_to_csv(mesh), args.out)
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    p = _read_point(args)
    direction = _read_direction(args.direction)
    report = classify_transition(p, direction, eps=args.eps, tol=args.tol, dim=args.dim)
    write_output(to_json(transition_to_dict(report)), args.out)
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    results = selftest.run_selftest(samples=args.samples, seed=args.seed)
    write_output(selftest.render_report(results, args.samples, args.seed), args.out)
    failed = [result.name for result in results if not result.passed]
    if failed:
        LOG.error(f" failed checks: {', '.join(failed)}")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.config:
        runner = SweepRunner(config_path=args.config)
    elif args.grid:
        names = ('x', 'y', 'z') if args.coordinates == 'cartesian' else ('A', 'B', 'C')
        grids = parse_grid(args.grid, 3)
        runner = SweepRunner(config={
            'coordinates': args.coordinates,
            'ranges': {name: [grid.start, grid.stop, grid.step] for name, grid in zip(names, grids)},
            'tol': args.tol,
            'format': args.format,
            'output_path': args.out or '',
            'jobs': args.jobs,
        })
    else:
        raise UsageException("sweep needs --config or --grid")
    if args.config and args.out is not None:
        runner.sweep_config = dataclasses.replace(runner.sweep_config, output_path=args.out)
    runner.write(runner.run(progress=args.progress))
    return EXIT_OK


def cmd_curve(args: argparse.Namespace) -> int:
    _, names, value_name = CURVES[args.kind]
    params = {}
    for name in names:
        flag = CURVE_FLAGS[name]
        if getattr(args, flag) is None:
            raise UsageException(f"curve '{args.kind}' needs --{flag}")
        params[name] = getattr(args, flag)
    e_values = parse_range(args.e_range).values()
    write_output(curve_to_csv(sample_curve(args.kind, e_values, **params), value_name), args.out)
    return EXIT_OK


def _add_point_flags(parser: argparse.ArgumentParser):
    for name in ('A', 'B', 'C'):
        parser.add_argument(f'--{name}', type=_finite_float, help=f"product coupling {name}")
    for name in ('x', 'y', 'z'):
        parser.add_argument(f'--{name}', type=_finite_float, help=f"Cartesian coupling {name}")


def _add_common_flags(parser: argparse.ArgumentParser, dim: bool = True):
    parser.add_argument('--tol', type=_positive_float, default=DEFAULT_TOL,
                        help=f"degeneracy tolerance (default: {DEFAULT_TOL})")
    parser.add_argument('--out', type=str, default=None,
                        help="write to this file instead of stdout")
    if dim:
        parser.add_argument('--dim', type=int, choices=(6, 4), default=6,
                            help="six-site chain or its four-site predecessor (default: 6)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pt-lattice',
        description="Spectra, physical domain and exceptional-point boundary of the PT-symmetric "
                    "six-site lattice Hamiltonian.")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="log INFO (-v) or DEBUG (-vv) messages")
    subparsers = parser.add_subparsers(dest='command', required=True)

    spectrum_parser = subparsers.add_parser('spectrum', help="energies at one point")
    _add_point_flags(spectrum_parser)
    _add_common_flags(spectrum_parser)
    spectrum_parser.add_argument('--format', choices=('json', 'text', 'csv'), default='json')
    spectrum_parser.add_argument('--oracle', action='store_true',
                                 help="add the eigenvalues of the independent oracle")
    spectrum_parser.add_argument('--matrix', action='store_true',
                                 help="add the Hamiltonian (with --format csv: print only the matrix)")
    spectrum_parser.set_defaults(func=cmd_spectrum)

    slice_parser = subparsers.add_parser('slice', help="physical set of C at fixed A and B")
    slice_parser.add_argument('--A', type=_finite_float)
    slice_parser.add_argument('--B', type=_finite_float)
    _add_common_flags(slice_parser)
    slice_parser.add_argument('--scan', nargs='?', const=DEFAULT_C_SCAN, default=None,
                              help=f"list the verdict for every C in cmin:cmax:step "
                                   f"(default: {DEFAULT_C_SCAN})")
    slice_parser.add_argument('--refine', default=None,
                              help="refined physical set along cmin:cmax:step as JSON")
    slice_parser.set_defaults(func=cmd_slice)

    profile_parser = subparsers.add_parser('profile', help="extrema of C(E) or alpha(E)")
    profile_parser.add_argument('--alpha', type=_finite_float, help="branch of C(E), the signed square root of A")
    profile_parser.add_argument('--B', type=_finite_float)
    profile_parser.add_argument('--C', type=_finite_float)
    profile_parser.add_argument('--out', type=str, default=None)
    profile_parser.set_defaults(func=cmd_profile)

    trace_parser = subparsers.add_parser('trace', help="boundary mesh over an (A, B) grid")
    trace_parser.add_argument('--grid', default=f'{DEFAULT_A_RANGE},{DEFAULT_B_RANGE}',
                              help="amin:amax:step,bmin:bmax:step")
    _add_common_flags(trace_parser, dim=False)
    trace_parser.add_argument('--jobs', type=_positive_int, default=1)
    trace_parser.add_argument('--progress', action='store_true')
    trace_parser.set_defaults(func=cmd_trace)

    classify_parser = subparsers.add_parser('classify', help="kind of a boundary crossing")
    _add_point_flags(classify_parser)
    _add_common_flags(classify_parser)
    classify_parser.add_argument('--direction', default='0,0,1',
                                 help="crossing direction in (A, B, C) (default: 0,0,1)")
    classify_parser.add_argument('--eps', type=_positive_float, default=DEFAULT_EPS)
    classify_parser.set_defaults(func=cmd_classify)

    selftest_parser = subparsers.add_parser('selftest', help="run the invariant battery")
    selftest_parser.add_argument('--samples', type=_positive_int, default=selftest.DEFAULT_SAMPLES)
    selftest_parser.add_argument('--seed', type=int, default=selftest.DEFAULT_SEED)
    selftest_parser.add_argument('--out', type=str, default=None)
    selftest_parser.set_defaults(func=cmd_selftest)

    sweep_parser = subparsers.add_parser('sweep', help="spectra and verdicts over a grid")
    sweep_parser.add_argument('--config', help="YAML sweep configuration")
    sweep_parser.add_argument('--grid', help="three ranges start:stop:step, comma-separated")
    sweep_parser.add_argument('--coordinates', choices=('products', 'cartesian'), default='products')
    sweep_parser.add_argument('--format', choices=('csv', 'json'), default='csv')
    _add_common_flags(sweep_parser, dim=False)
    sweep_parser.add_argument('--jobs', type=_positive_int, default=1)
    sweep_parser.add_argument('--progress', action='store_true')
    sweep_parser.set_defaults(func=cmd_sweep)

    curve_parser = subparsers.add_parser('curve', help="samples of C(E), alpha(E) or B(E)")
    curve_parser.add_argument('--kind', choices=sorted(CURVES), required=True)
    curve_parser.add_argument('--B', type=_finite_float)
    curve_parser.add_argument('--C', type=_finite_float)
    curve_parser.add_argument('--alpha', type=_finite_float, help="signed square root of A")
    curve_parser.add_argument('--e-range', dest='e_range', default=DEFAULT_E_RANGE)
    curve_parser.add_argument('--out', type=str, default=None)
    curve_parser.set_defaults(func=cmd_curve)

    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s:%(message)s')


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except (UsageException, BadRangeException, ConfigException, DomainException,
            InvalidDimensionException, NoRealPreimageException, BoundaryPlaneException,
            UnphysicalLimitException, PoleException, yaml.YAMLError) as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InconclusiveCrossingException, NotOnBoundaryException, OracleConvergenceException,
            ValueError, ArithmeticError) as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


class UsageException(Exception):
    pass
