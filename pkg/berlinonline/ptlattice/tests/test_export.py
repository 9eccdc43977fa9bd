import json
import math
import os

import pytest

from berlinonline.ptlattice.domain import (BoundaryMesh, Verdict, c_slice, classify_transition,
                                           membership, scan_line)
from berlinonline.ptlattice.export import (
    alpha_profile_to_dict,
    branch_profile_to_dict,
    complex_to_dict,
    curve_to_csv,
    eigen_to_dict,
    format_decimal,
    line_scan_to_dict,
    matrix_to_csv,
    matrix_to_dict,
    mesh_to_csv,
    rows_to_csv,
    slice_to_dict,
    spectrum_to_dict,
    to_json,
    transition_to_dict,
    verdict_to_dict,
    write_output,
)
from berlinonline.ptlattice.helper import GridRange
from berlinonline.ptlattice.implicit_boundary import alpha_profile, c_branch_profile
from berlinonline.ptlattice.lattice import ProductCouplings, build_laplacean
from berlinonline.ptlattice.oracle import eig_dense
from berlinonline.ptlattice.secular import spectrum
from berlinonline.ptlattice.tests import GAP_POINT, PATH_GRAPH_POINT, temporary_output_folder


class TestNumbers(object):

    @pytest.mark.parametrize("data", [
        {'value': 0.1, 'text': '0.10000000000000001'},
        {'value': 1.0, 'text': '1'},
        {'value': -0.25, 'text': '-0.25'},
        {'value': 1e-20, 'text': '9.9999999999999995e-21'},
    ])
    def test_format_decimal(self, data):
        assert format_decimal(data['value']) == data['text']

    def test_complex_to_dict(self):
        assert complex_to_dict(1 - 2j) == {"re": 1.0, "im": -2.0}
        assert complex_to_dict(3) == {"re": 3.0, "im": 0.0}


class TestMatrices(object):

    def test_matrix_to_dict(self):
        data = matrix_to_dict(build_laplacean(2))
        assert data == {"dim": 2, "rows": [[0, -1], [-1, 0]]}

    def test_matrix_csv_has_no_header(self):
        assert matrix_to_csv(build_laplacean(2)) == "0,-1\n-1,0\n"


class TestResultDicts(object):

    def test_spectrum(self):
        data = spectrum_to_dict(spectrum(PATH_GRAPH_POINT))
        assert set(data) == {"energies", "n_real", "s_roots", "classification", "tol"}
        assert data["classification"] == "AllReal"
        assert data["n_real"] == 6
        assert len(data["energies"]) == 6
        assert len(data["s_roots"]) == 3
        assert data["tol"] == 1e-10

    def test_eigen(self):
        data = eigen_to_dict(eig_dense(build_laplacean(4)))
        assert len(data["eigenvalues"]) == len(data["residual_norms"]) == 4
        assert data["iterations"] >= 1

    def test_slice_writes_null_for_infinity(self):
        data = slice_to_dict(c_slice(1.0, 2.0))
        assert data["intervals"][0][1] is None
        assert data["gap"] is None
        assert data["punctures"] == [0.0]
        assert '"gap": null' in to_json(data)

    def test_gap_slice(self):
        a, b = GAP_POINT
        data = slice_to_dict(c_slice(a, b))
        assert len(data["intervals"]) == 2
        assert data["gap"] == [data["intervals"][0][1], data["intervals"][1][0]]

    def test_branch_profile(self):
        data = branch_profile_to_dict(c_branch_profile(1.0, 2.0))
        assert data["c_min"] is None
        assert data["pole"] == 1.0
        assert set(data["tolerances"]) == {'pole', 'b_ep_xtol', 'root_xtol'}
        assert json.loads(to_json(data)) == data

    def test_alpha_profile(self):
        data = alpha_profile_to_dict(alpha_profile(0.1, 1.0))
        assert data["admissible_a"] == [[0.0, None]]
        assert data["gap"] is None

    def test_verdict(self):
        data = verdict_to_dict(membership(ProductCouplings(0, 1, 1)))
        assert data["verdict"] == "Boundary"
        assert data["plane"] == "A"
        assert data["classification"] == "Degenerate"

    def test_transition_embeds_three_spectra(self):
        report = classify_transition(ProductCouplings(0.0, 1.0, 1.0), (1, 0, 0))
        data = transition_to_dict(report)
        assert data["kind"] == "FirstKind"
        assert set(data["spectra"]) == {"minus", "at", "plus"}
        assert data["point"] == {"A": 0.0, "B": 1.0, "C": 1.0}

    def test_line_scan(self):
        scan = scan_line(ProductCouplings(1.0, 0.0, 0.0), (0, 0, 1), GridRange(-1.0, 1.0, 0.01), dim=4)
        data = line_scan_to_dict(scan)
        assert len(data["runs"]) == 1
        assert len(data["physical_set"]) == 2
        assert data["dim"] == 4


class TestCSV(object):

    def test_rows_with_header(self):
        assert rows_to_csv(('x', 'name'), [(0.1, 'a'), (2.0, 'b')]) == \
            "x,name\n0.10000000000000001,a\n2,b\n"

    def test_enum_cells_are_written_by_value(self):
        assert rows_to_csv(('C', 'verdict'), [(0.5, Verdict.PHYSICAL)]) == "C,verdict\n0.5,Physical\n"

    def test_mesh(self):
        mesh = BoundaryMesh(((1.0, 2.0, -0.5, 'c_ep'),))
        assert mesh_to_csv(mesh) == (
            "A,B,C,sheet_tag\n"
            "1,2,-0.5,c_ep\n"
            "0,,,plane_A\n"
            ",0,,plane_B\n"
            ",,0,plane_C\n"
        )

    def test_four_site_mesh_has_two_planes(self):
        mesh = BoundaryMesh((), planes=('A', 'C'))
        assert mesh_to_csv(mesh).splitlines()[1:] == ['0,,,plane_A', ',,0,plane_C']

    def test_none_cells_are_empty(self):
        assert rows_to_csv(None, [(None, 1.0)]) == ",1\n"

    def test_curve(self):
        assert curve_to_csv([(1.0, 2.0), (1.5, math.pi)], 'alpha') == \
            "E,alpha\n1,2\n1.5,3.1415926535897931\n"


class TestWriteOutput(object):

    def test_stdout(self, capsys):
        write_output("a,b\n", None)
        assert capsys.readouterr().out == "a,b\n"

    def test_file(self, temporary_output_folder):
        path = os.path.join(temporary_output_folder, 'mesh.csv')
        write_output("A,B\n1,2\n", path)
        with open(path, 'rb') as output_file:
            assert output_file.read() == b"A,B\n1,2\n"
