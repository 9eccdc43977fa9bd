"""
`ptlattice.export` turns every result type of the package into JSON-ready dictionaries and
CSV text.

JSON has no infinity, so an unbounded interval end is written as `null`. CSV tables have a
header row, decimals with 17 significant digits and LF line endings. Matrices are the only
exception: their CSV form is the bare `n` by `n` block.
"""
import csv
import io
import json
import logging
import math
from typing import Iterable, List, Optional, Sequence

import numpy as np

from berlinonline.ptlattice.domain import (BoundaryMesh, BoundarySlice, DomainVerdict, LineScan,
                                           TransitionReport)
from berlinonline.ptlattice.implicit_boundary import AlphaProfile, BranchProfile
from berlinonline.ptlattice.lattice import ProductCouplings
from berlinonline.ptlattice.oracle import EigenResult
from berlinonline.ptlattice.secular import SpectrumResult

LOG = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 17
"""Number of significant digits of every decimal written to CSV."""


def format_decimal(value: float) -> str:
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def _number(value: Optional[float]) -> Optional[float]:
    if value is None or (isinstance(value, float) and math.isinf(value)):
        return None
    return float(value)


def _interval(interval) -> Optional[List[Optional[float]]]:
    if interval is None:
        return None
    return [_number(interval[0]), _number(interval[1])]


def complex_to_dict(value: complex) -> dict:
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def point_to_dict(p: ProductCouplings) -> dict:
    return {"A": p.A, "B": p.B, "C": p.C}


def matrix_to_dict(m) -> dict:
    m = np.asarray(m)
    return {"dim": int(m.shape[0]), "rows": m.tolist()}


def matrix_to_csv(m) -> str:
    m = np.asarray(m, dtype=float)
    return rows_to_csv(None, m.tolist())


def spectrum_to_dict(result: SpectrumResult) -> dict:
    return {
        "energies": [complex_to_dict(e) for e in result.energies],
        "n_real": result.n_real,
        "s_roots": [complex_to_dict(s) for s in result.s_roots],
        "classification": result.classification.value,
        "tol": result.tol_used,
    }


def eigen_to_dict(result: EigenResult) -> dict:
    return {
        "eigenvalues": [complex_to_dict(e) for e in result.eigenvalues],
        "residual_norms": list(result.residual_norms),
        "iterations": result.iterations,
    }


def branch_profile_to_dict(profile: BranchProfile) -> dict:
    return {
        "alpha": profile.alpha,
        "b": profile.b,
        "pole": profile.pole,
        "zeros": list(profile.zeros),
        "critical_energies": list(profile.critical_energies),
        "c_ep": profile.c_ep,
        "c_min": profile.c_min,
        "c_max": profile.c_max,
        "b_ep": profile.b_ep,
        "tolerances": dict(profile.tolerances),
    }


def alpha_profile_to_dict(profile: AlphaProfile) -> dict:
    return {
        "b": profile.b,
        "c": profile.c,
        "critical_energies": list(profile.critical_energies),
        "critical_levels": list(profile.critical_levels),
        "admissible_a": [_interval(interval) for interval in profile.admissible],
        "gap": _interval(profile.gap),
        "notes": list(profile.notes),
    }


def slice_to_dict(boundary_slice: BoundarySlice) -> dict:
    return {
        "a": boundary_slice.a,
        "b": boundary_slice.b,
        "intervals": [_interval(interval) for interval in boundary_slice.intervals],
        "gap": _interval(boundary_slice.gap),
        "punctures": list(boundary_slice.punctures),
        "note": boundary_slice.note,
    }


def verdict_to_dict(verdict: DomainVerdict) -> dict:
    return {
        "verdict": verdict.verdict.value,
        "n_real": verdict.n_real,
        "min_separation": verdict.min_separation,
        "classification": verdict.classification.value,
        "plane": verdict.plane,
        "tol": verdict.tol,
    }


def transition_to_dict(report: TransitionReport) -> dict:
    return {
        "point": point_to_dict(report.point),
        "direction": list(report.direction),
        "kind": report.kind.value,
        "eps": report.eps,
        "tol": report.tol,
        "dim": report.dim,
        "assignment": list(report.assignment),
        "spectra": {
            "minus": spectrum_to_dict(report.minus),
            "at": spectrum_to_dict(report.at),
            "plus": spectrum_to_dict(report.plus),
        },
    }


def line_scan_to_dict(scan: LineScan) -> dict:
    return {
        "origin": point_to_dict(scan.origin),
        "direction": list(scan.direction),
        "runs": [_interval(run) for run in scan.runs],
        "punctures": list(scan.punctures),
        "transitions": list(scan.transitions),
        "physical_set": [_interval(piece) for piece in scan.physical_set()],
        "tol": scan.tol,
        "dim": scan.dim,
    }


def _cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return format_decimal(float(value))
    if hasattr(value, 'value'):
        return str(value.value)
    return str(value)


def rows_to_csv(header: Optional[Sequence[str]], rows: Iterable[Sequence]) -> str:
    """Return CSV text with LF line endings. Floats carry 17 significant digits."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    if header is not None:
        writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def mesh_to_csv(mesh: BoundaryMesh) -> str:
    """Return the mesh points followed by one record per analytic plane.

    A plane record leaves its free coordinates empty, e.g. `,0,,plane_B`.
    """
    return rows_to_csv(('A', 'B', 'C', 'sheet_tag'), mesh.points + mesh.plane_records())


def curve_to_csv(rows: Iterable[Sequence[float]], value_name: str) -> str:
    """Return a two-column table `E,<value_name>` of curve samples."""
    return rows_to_csv(('E', value_name), rows)


def to_json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + '\n'


def write_output(text: str, path: Optional[str]):
    """Write `text` to `path` as UTF-8, or to stdout when `path` is empty."""
    if not path:
        print(text, end='')
        return
    LOG.info(f" writing {path}")
    with open(path, 'w', encoding='utf-8', newline='\n') as output_file:
        output_file.write(text)
