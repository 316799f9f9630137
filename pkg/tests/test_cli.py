import json

import pytest

from click.testing import CliRunner

from mps2cl.cli import main, run
from mps2cl.config import ConfigParser
from mps2cl.consts import VERSION
from mps2cl.core.mps import dump_tensors
from mps2cl.errors import SolverError
from mps2cl.experiments.common import Experiment, Table
from mps2cl.verdicts import Verdict


@pytest.fixture
def workspace(tmp_path):
    def make(content: str):
        path = tmp_path / 'config.yml'
        path.write_text(content)
        return str(path), str(tmp_path / 'out')
    return make


def _summary(out: str, subcommand: str):
    with open(f'{out}/{subcommand}/summary.json') as fp:
        return json.load(fp)


def test_version():
    result = CliRunner().invoke(main, ['--version'])
    assert result.exit_code == 0
    assert VERSION in result.output


def test_g1_for_aklt(workspace):
    config, out = workspace('model:\n  preset: aklt\n')
    result = CliRunner().invoke(main, ['-c', config, '-o', out, 'g1'])
    assert result.exit_code == 0
    summary = _summary(out, 'g1')
    assert summary['L0'] == 2
    assert summary['span_dims'] == [3, 4]
    assert summary['passed'] is True


def test_canon_for_classical_preset(workspace):
    config, out = workspace('model:\n  preset: aklt\n')
    result = CliRunner().invoke(main, ['-c', config, '-o', out, '-p', 'classical', 'canon'])
    assert result.exit_code == 0
    summary = _summary(out, 'canon')
    assert summary['L0'] == 1
    assert summary['xi'] == pytest.approx([0.6, 0.4])


def test_spectrum_for_aklt(workspace):
    config, out = workspace('model:\n  preset: aklt\n')
    result = CliRunner().invoke(main, ['-c', config, '-o', out, 'spectrum'])
    assert result.exit_code == 0
    summary = _summary(out, 'spectrum')
    assert summary['lambda2'] == pytest.approx(1 / 3)
    with open(f'{out}/spectrum/spectrum.csv') as fp:
        assert fp.readline().strip() == 'index,real,imag,modulus'


def test_parent_gap_from_tensor_file(workspace, tmp_path, random_model):
    tensors = str(tmp_path / 'tensors.json')
    dump_tensors(random_model, tensors)
    config, out = workspace(f'model:\n  file: {tensors}\nparent:\n  N_list: [8, 10]\n')
    result = CliRunner().invoke(main, ['-c', config, '-o', out, 'parent-gap'])
    assert result.exit_code == 0
    summary = _summary(out, 'parent-gap')
    assert summary['interaction_range'] == 3
    assert summary['passed'] is True


def test_missing_model_exits_with_config_error(workspace):
    config, out = workspace('output:\n  workers: 1\n')
    result = CliRunner().invoke(main, ['-c', config, '-o', out, 'g1'])
    assert result.exit_code == 2


def test_caps_are_checked_before_running(workspace):
    config, out = workspace('model:\n  preset: aklt\n')
    result = CliRunner().invoke(main, ['-c', config, '-o', out, 'decompose', '-L', '4', '-m', '3'])
    assert result.exit_code == 2


def test_non_injective_model_is_rejected(workspace, tmp_path):
    tensors = tmp_path / 'diagonal.json'
    tensors.write_text(json.dumps({'matrices': [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}))
    config, out = workspace(f'model:\n  file: {tensors}\n  g1_cap: 4\n')
    result = CliRunner().invoke(main, ['-c', config, '-o', out, 'canon'])
    assert result.exit_code == 2


def test_workers_from_environment(workspace):
    config, out = workspace('model:\n  preset: aklt\n')
    result = CliRunner().invoke(main, ['-c', config, 'g1'],
                                env={'MPS2CL_OUTPUT_DIR': out, 'MPS2CL_WORKERS': '3'})
    assert result.exit_code == 0
    with open(f'{out}/g1/metadata.json') as fp:
        assert json.load(fp)['workers'] == 3


class FailingCheck(Experiment):
    NAME = 'failing-check'

    def run(self):
        self.tables['values'] = Table(columns=['x'], rows=[[1.0]])
        self.record(Verdict.upper('some_bound', 2.0, 1.0))
        self.summary['after_failure'] = True


class RaisingSolver(Experiment):
    NAME = 'raising-solver'

    def run(self):
        raise SolverError('no convergence', 1e-3)


def _parser(out: str) -> ConfigParser:
    cfg_parser = ConfigParser()
    cfg_parser.read_string(f'model:\n  preset: aklt\noutput:\n  directory: {out}\n')
    cfg_parser.validate()
    return cfg_parser


def test_failed_check_still_writes_results(tmp_path):
    out = str(tmp_path / 'out')
    with pytest.raises(SystemExit) as e:
        run(FailingCheck, _parser(out))
    assert e.value.code == 1
    summary = _summary(out, 'failing-check')
    assert summary['passed'] is False
    assert 'after_failure' not in summary
    assert summary['verdicts'][0]['name'] == 'some_bound'
    with open(f'{out}/failing-check/values.csv') as fp:
        assert fp.readline().strip() == 'x'


def test_solver_error_still_writes_summary(tmp_path):
    out = str(tmp_path / 'out')
    with pytest.raises(SystemExit) as e:
        run(RaisingSolver, _parser(out))
    assert e.value.code == 1
    summary = _summary(out, 'raising-solver')
    assert summary['passed'] is False
    assert summary['error']['type'] == 'SolverError'
