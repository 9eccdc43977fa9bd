import json
import os

import pytest

from berlinonline.ptlattice import cli, secular, selftest
from berlinonline.ptlattice.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from berlinonline.ptlattice.tests import build_config_path, temporary_output_folder


def run(capsys, *argv) -> tuple:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSpectrum(object):

    def test_json(self, capsys):
        code, out, _ = run(capsys, 'spectrum', '--A', '0.09', '--B', '0.1', '--C', '1')
        assert code == EXIT_OK
        data = json.loads(out)
        assert data['classification'] == 'AllReal'
        assert data['n_real'] == 6
        assert data['verdict']['verdict'] == 'Physical'

    def test_cartesian_text(self, capsys):
        code, out, _ = run(capsys, 'spectrum', '--x', '0', '--y', '0', '--z', '0', '--format', 'text')
        assert code == EXIT_OK
        assert 'classification: AllReal, 6 real energies' in out

    def test_four_sites(self, capsys):
        code, out, _ = run(capsys, 'spectrum', '--A', '1', '--C', '1', '--dim', '4')
        assert code == EXIT_OK
        assert json.loads(out)['n_real'] == 4

    def test_matrix_csv(self, capsys):
        code, out, _ = run(capsys, 'spectrum', '--A', '1', '--B', '1', '--C', '1', '--format', 'csv', '--matrix')
        assert code == EXIT_OK
        lines = out.splitlines()
        assert len(lines) == 6
        assert lines[0] == '0,-1,0,0,0,0'

    def test_oracle_and_matrix_json(self, capsys):
        code, out, _ = run(capsys, 'spectrum', '--A', '1', '--B', '1', '--C', '1', '--oracle', '--matrix')
        assert code == EXIT_OK
        data = json.loads(out)
        assert len(data['oracle']['eigenvalues']) == 6
        assert data['matrix']['dim'] == 6

    def test_energy_csv(self, capsys):
        code, out, _ = run(capsys, 'spectrum', '--A', '1', '--B', '1', '--C', '1', '--format', 'csv')
        assert code == EXIT_OK
        assert out.splitlines()[0] == 're,im'

    @pytest.mark.parametrize("argv", [
        ['spectrum', '--A', '2'],
        ['spectrum', '--A', '1', '--x', '0'],
        ['spectrum'],
        ['spectrum', '--A', 'one', '--B', '1', '--C', '1'],
        ['spectrum', '--x', '0', '--y', '0', '--z', '0', '--dim', '5'],
        ['nonsense'],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, _ = run(capsys, *argv)
        assert code == EXIT_USAGE

    @pytest.mark.parametrize("argv", [
        ['spectrum', '--A', 'nan', '--B', '1', '--C', '1'],
        ['spectrum', '--A', '1', '--B', '1', '--C', '1', '--tol', '0'],
        ['classify', '--A', '0', '--B', '1', '--C', '1', '--direction', '0,0,0'],
        ['classify', '--A', '0', '--B', '1', '--C', '1', '--direction', '1,0'],
        ['classify', '--A', '0', '--B', '1', '--C', '1', '--eps', '-1'],
        ['selftest', '--samples', '0'],
    ])
    def test_bad_arguments_are_usage_errors(self, capsys, argv):
        code, _, _ = run(capsys, *argv)
        assert code == EXIT_USAGE

    def test_value_error_inside_computation_is_numerical(self, capsys, monkeypatch):
        def failing_spectrum(p, dim, tol):
            raise ValueError("array must not contain infs or NaNs")

        monkeypatch.setattr(cli, 'spectrum_of', failing_spectrum)
        code, _, err = run(capsys, 'spectrum', '--A', '1', '--B', '1', '--C', '1')
        assert code == EXIT_NUMERICAL
        assert 'infs or NaNs' in err

    def test_write_to_file(self, capsys, temporary_output_folder):
        path = os.path.join(temporary_output_folder, 'spectrum.json')
        code, out, _ = run(capsys, 'spectrum', '--A', '1', '--B', '1', '--C', '1', '--out', path)
        assert code == EXIT_OK
        assert out == ''
        with open(path) as output_file:
            assert json.load(output_file)['n_real'] == 6


class TestSlice(object):

    def test_json(self, capsys):
        code, out, _ = run(capsys, 'slice', '--A', '0.09', '--B', '-0.01')
        assert code == EXIT_OK
        data = json.loads(out)
        assert len(data['intervals']) == 2
        assert data['intervals'][1][1] is None
        assert data['punctures'] == [0.0]

    def test_scan(self, capsys):
        code, out, _ = run(capsys, 'slice', '--A', '0.09', '--B', '-0.01', '--scan=0:0.3:0.1')
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == 'C,verdict'
        assert [line.split(',')[1] for line in lines[1:]] == ['Boundary', 'Unphysical', 'Physical', 'Physical']

    def test_refine(self, capsys):
        code, out, _ = run(capsys, 'slice', '--A', '1', '--dim', '4', '--refine=-1:1:0.01')
        assert code == EXIT_OK
        data = json.loads(out)
        assert len(data['physical_set']) == 2
        assert data['physical_set'][0][0] == pytest.approx(-0.25, abs=1e-9)

    def test_bad_range(self, capsys):
        code, _, err = run(capsys, 'slice', '--A', '0.09', '--B', '-0.01', '--scan=1:0:0.1')
        assert code == EXIT_USAGE
        assert 'pt-lattice slice' in err

    def test_missing_b(self, capsys):
        code, _, _ = run(capsys, 'slice', '--A', '0.09')
        assert code == EXIT_USAGE


class TestProfileAndCurve(object):

    def test_branch_profile(self, capsys):
        code, out, _ = run(capsys, 'profile', '--alpha', '0.3', '--B', '-0.01')
        assert code == EXIT_OK
        data = json.loads(out)
        assert data['c_min'] < 0 < data['c_max'] < data['c_ep']

    def test_alpha_profile(self, capsys):
        code, out, _ = run(capsys, 'profile', '--B', '0.1', '--C', '1')
        assert code == EXIT_OK
        assert json.loads(out)['admissible_a'] == [[0.0, None]]

    @pytest.mark.parametrize("argv", [
        ['profile', '--B', '1'],
        ['profile', '--alpha', '0.3'],
        ['profile', '--alpha', '0', '--B', '1'],
    ])
    def test_profile_usage_errors(self, capsys, argv):
        code, _, _ = run(capsys, *argv)
        assert code == EXIT_USAGE

    def test_curve(self, capsys):
        code, out, _ = run(capsys, 'curve', '--kind', 'c', '--B', '0.1', '--alpha', '0.3', '--e-range=0:1:0.5')
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == 'E,C'
        assert len(lines) == 4
        assert lines[1] == '0,0'

    def test_curve_needs_its_parameters(self, capsys):
        code, _, err = run(capsys, 'curve', '--kind', 'c', '--B', '0.1')
        assert code == EXIT_USAGE
        assert '--alpha' in err


class TestTraceAndClassify(object):

    def test_trace(self, capsys):
        code, out, _ = run(capsys, 'trace', '--grid', '0.09:0.09:1,-0.01:-0.01:1')
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == 'A,B,C,sheet_tag'
        assert [line.split(',')[3] for line in lines[1:]] == [
            'c_min', 'c_max', 'c_ep', 'plane_A', 'plane_B', 'plane_C']

    def test_classify_second_kind(self, capsys):
        code, out, _ = run(capsys, 'classify', '--A', '1', '--C', '0', '--dim', '4')
        assert code == EXIT_OK
        assert json.loads(out)['kind'] == 'SecondKind'

    def test_classify_first_kind(self, capsys):
        code, out, _ = run(capsys, 'classify', '--A', '0', '--B', '1', '--C', '1', '--direction', '1,0,0')
        assert code == EXIT_OK
        assert json.loads(out)['kind'] == 'FirstKind'

    @pytest.mark.parametrize("argv", [
        ['classify', '--A', '0', '--B', '1', '--C', '1', '--direction', '0,1,0'],
        ['classify', '--A', '0.09', '--B', '0.1', '--C', '1'],
    ])
    def test_numerical_failures(self, capsys, argv):
        code, _, _ = run(capsys, *argv)
        assert code == EXIT_NUMERICAL


class TestSweep(object):

    def test_config(self, capsys):
        code, out, _ = run(capsys, 'sweep', '--config', build_config_path('products_sweep.yml'))
        assert code == EXIT_OK
        assert len(json.loads(out)['rows']) == 5

    def test_grid(self, capsys):
        code, out, _ = run(capsys, 'sweep', '--grid', '1:1:1,1:1:1,0:1:0.5', '--out', '')
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == 'A,B,C,n_real,classification,verdict'
        assert len(lines) == 4

    def test_config_output_is_overridden(self, capsys, temporary_output_folder):
        path = os.path.join(temporary_output_folder, 'sweep.json')
        code, _, _ = run(capsys, 'sweep', '--config', build_config_path('products_sweep.yml'), '--out', path)
        assert code == EXIT_OK
        assert os.path.isfile(path)

    def test_missing_config(self, capsys):
        code, _, _ = run(capsys, 'sweep', '--config', build_config_path('missing.yml'))
        assert code == EXIT_USAGE

    def test_needs_config_or_grid(self, capsys):
        code, _, _ = run(capsys, 'sweep')
        assert code == EXIT_USAGE


class TestSelftest(object):

    def test_passing_battery(self, capsys, monkeypatch):
        monkeypatch.setattr(selftest, 'CHECKS', [selftest.check_coefficient_identity])
        code, out, _ = run(capsys, 'selftest', '--samples', '5')
        assert code == EXIT_OK
        assert '[PASS] coefficient_identity' in out

    def test_broken_coefficients_fail(self, capsys, monkeypatch):
        def wrong_coefficients(p):
            k = secular.SecularCoefficients(-(2 * p.C + 2 * p.B + p.A), 2 * p.B * p.C + 2 * p.A * p.C, -p.A * p.C * p.C)
            return k

        monkeypatch.setattr(selftest, 'CHECKS', [selftest.check_coefficient_identity])
        monkeypatch.setattr(secular, 'coefficients', wrong_coefficients)
        code, out, _ = run(capsys, 'selftest', '--samples', '5')
        assert code == EXIT_NUMERICAL
        assert '[FAIL] coefficient_identity' in out
