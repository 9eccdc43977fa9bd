import json
import os

import pytest
import yaml

from berlinonline.ptlattice.helper import GridRange
from berlinonline.ptlattice.secular import DEFAULT_TOL
from berlinonline.ptlattice.sweep import (
    COLUMNS,
    DEFAULT_COORDINATES,
    DEFAULT_FORMAT,
    DEFAULT_JOBS,
    DEFAULT_OUTPUT_PATH,
    ConfigException,
    SweepRunner,
)
from berlinonline.ptlattice.tests import build_config_path, temporary_output_folder


def single_point_ranges(c_range: list) -> dict:
    return {'A': [0.09, 0.09, 0.01], 'B': [0.1, 0.1, 0.01], 'C': c_range}


class TestInstantiation(object):

    def test_missing_config_raises_error(self):
        with pytest.raises(ConfigException):
            SweepRunner(build_config_path('missing.yml'))

    def test_empty_config_raises_error(self):
        with pytest.raises(ConfigException):
            SweepRunner(build_config_path('empty_config.yml'))

    def test_bad_yaml_raises_error(self):
        with pytest.raises(yaml.parser.ParserError):
            SweepRunner(build_config_path('bad_yaml_config.yml'))

    def test_no_ranges_raises_error(self):
        with pytest.raises(ConfigException):
            SweepRunner(build_config_path('no_ranges.yml'))

    def test_bad_format_raises_error(self):
        with pytest.raises(ConfigException):
            SweepRunner(build_config_path('bad_format.yml'))

    def test_only_ranges_uses_default_settings(self):
        runner = SweepRunner(build_config_path('only_ranges.yml'))
        sweep_config = runner.sweep_config
        assert sweep_config.coordinates == DEFAULT_COORDINATES
        assert sweep_config.tol == DEFAULT_TOL
        assert sweep_config.format == DEFAULT_FORMAT
        assert sweep_config.output_path == DEFAULT_OUTPUT_PATH
        assert sweep_config.jobs == DEFAULT_JOBS
        assert sweep_config.ranges == (GridRange(1.0, 1.0, 0.1),) * 3

    @pytest.mark.parametrize("data", [
        {'ranges': {'A': [0, 1, 0.1], 'B': [0, 1, 0.1]}},
        {'ranges': {'A': [1, 0, 0.1], 'B': [0, 1, 0.1], 'C': [0, 1, 0.1]}},
        {'ranges': {'A': [0, 1, 0], 'B': [0, 1, 0.1], 'C': [0, 1, 0.1]}},
        {'ranges': {'A': [0, 1], 'B': [0, 1, 0.1], 'C': [0, 1, 0.1]}},
        {'ranges': {'A': ['a', 1, 0.1], 'B': [0, 1, 0.1], 'C': [0, 1, 0.1]}},
        {'ranges': [0, 1, 0.1]},
        {'ranges': single_point_ranges([0, 1, 0.5]), 'coordinates': 'polar'},
        {'ranges': single_point_ranges([0, 1, 0.5]), 'jobs': 0},
        {'ranges': single_point_ranges([0, 1, 0.5]), 'tol': 0},
    ])
    def test_bad_settings_raise_error(self, data):
        with pytest.raises(ConfigException):
            SweepRunner(config=data)

    def test_cartesian_ranges_need_xyz(self):
        with pytest.raises(ConfigException):
            SweepRunner(config={'coordinates': 'cartesian', 'ranges': single_point_ranges([0, 1, 0.5])})


class TestRun(object):

    def test_products_sweep(self):
        runner = SweepRunner(build_config_path('products_sweep.yml'))
        rows = runner.run()
        assert [row.C for row in rows] == pytest.approx([-1.0, -0.5, 0.0, 0.5, 1.0])
        assert rows[0].verdict == 'Unphysical'
        assert rows[2].verdict == 'Boundary'
        assert rows[4].verdict == 'Physical'
        assert rows[4].n_real == 6
        assert rows[4].classification == 'AllReal'

    def test_cartesian_points_are_converted(self):
        runner = SweepRunner(build_config_path('cartesian_sweep.yml'))
        rows = runner.run()
        assert [(row.A, row.B, row.C) for row in rows] == pytest.approx(
            [(1.0, 1.0, 1.0), (1.0, 1.0, 0.75), (1.0, 1.0, 0.0)])
        assert rows[0].verdict == 'Physical'
        assert rows[2].verdict == 'Boundary'

    def test_first_coordinate_varies_slowest(self):
        runner = SweepRunner(config={'ranges': {'A': [0.5, 1.0, 0.5], 'B': [1, 1, 1], 'C': [0, 1, 1]}})
        rows = runner.run()
        assert [(row.A, row.C) for row in rows] == [(0.5, 0.0), (0.5, 1.0), (1.0, 0.0), (1.0, 1.0)]

    def test_jobs_give_identical_rows(self):
        ranges = single_point_ranges([-1.0, 1.0, 0.25])
        serial = SweepRunner(config={'ranges': ranges}).run()
        parallel = SweepRunner(config={'ranges': ranges, 'jobs': 2}).run(progress=True)
        assert serial == parallel


class TestOutput(object):

    def test_json(self):
        runner = SweepRunner(build_config_path('products_sweep.yml'))
        data = json.loads(runner.render(runner.run()))
        assert data['tol'] == 1e-10
        assert len(data['rows']) == 5
        assert set(data['rows'][0]) == set(COLUMNS)

    def test_csv_to_stdout(self, capsys):
        runner = SweepRunner(config={'ranges': single_point_ranges([1, 1, 1]), 'output_path': ''})
        runner.write(runner.run())
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == 'A,B,C,n_real,classification,verdict'
        assert lines[1] == '0.089999999999999997,0.10000000000000001,1,6,AllReal,Physical'

    def test_write_file(self, temporary_output_folder):
        path = os.path.join(temporary_output_folder, 'sweep.csv')
        runner = SweepRunner(config={'ranges': single_point_ranges([0, 1, 0.5]), 'output_path': path})
        runner.write(runner.run())
        assert os.path.isfile(path)
        with open(path) as output_file:
            lines = output_file.read().splitlines()
        assert len(lines) == 4
        assert lines[1].endswith(',Boundary')
