import numpy as np
import pytest

from maxres import cli, fieldfile


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


SOLVE_INI = """
[grid]
dim = 2
n = 32

[material]
eps11 = 2.0
eps12 = 0.3
eps22 = 1.2
mu = 0.8

[frequency]
re = 2.0
im = 0.6

[source]
kind = random
kmax = 6
"""


def test_solve_writes_field_and_report(tmp_path, capsys):
    cfg = _write(tmp_path, 'job.ini', SOLVE_INI)
    out = tmp_path / 'out'
    code = cli.main(['solve', '--config', cfg, '--out', str(out),
                     '--seed', '3'])
    assert code == 0
    text = capsys.readouterr().out
    assert 'residual_rel_l2 = ' in text
    rel = float(text.split('residual_rel_l2 = ')[1].splitlines()[0])
    assert rel < 1e-10
    u = fieldfile.read_field(out / 'fields.mxfd')
    assert u.data.shape == (3, 32, 32)
    report = (out / 'solve_report.txt').read_text()
    assert report in text or text.endswith(report)


def test_solve_is_deterministic(tmp_path):
    cfg = _write(tmp_path, 'job.ini', SOLVE_INI)
    outs = []
    for name in ('a', 'b'):
        out = tmp_path / name
        assert cli.main(['solve', '--config', cfg, '--out', str(out),
                         '--seed', '7']) == 0
        outs.append((out / 'fields.mxfd').read_bytes())
    assert outs[0] == outs[1]


def test_solve_rejects_real_frequency(tmp_path, capsys):
    cfg = _write(tmp_path, 'job.ini',
                 SOLVE_INI.replace('im = 0.6', 'im = 0.0'))
    assert cli.main(['solve', '--config', cfg,
                     '--out', str(tmp_path / 'o')]) == 1
    assert 'lap subcommand' in capsys.readouterr().err


def test_missing_config_is_failure(tmp_path, capsys):
    assert cli.main(['solve', '--config', str(tmp_path / 'nope.ini')]) == 1
    assert cli.main(['solve']) == 1


def test_verify_passes_and_flip_fails(tmp_path, capsys):
    cfg = _write(tmp_path, 'v.ini', "[verify]\npoints = 4000\n")
    out = tmp_path / 'v'
    assert cli.main(['verify', '--config', cfg, '--out', str(out),
                     '--seed', '0']) == 0
    capsys.readouterr()
    cfg2 = _write(tmp_path, 'v2.ini',
                  "[verify]\npoints = 4000\nflip_entry = 2,4\n")
    assert cli.main(['verify', '--config', cfg2, '--out', str(out),
                     '--seed', '0']) == 1
    text = capsys.readouterr().out
    assert 'passed = false' in text
    assert 'witness = ' in text
    # entries that are identically zero cannot be flipped meaningfully
    cfg3 = _write(tmp_path, 'v3.ini',
                  "[verify]\npoints = 1000\nflip_entry = 0,3\n")
    assert cli.main(['verify', '--config', cfg3, '--out', str(out)]) == 1


LAP_INI = """
[grid]
dim = 2
n = 32

[material]
eps11 = 1.3
eps12 = 0.25
eps22 = 0.9
mu = 1.4

[frequency]
re = 3.1

[source]
kind = random
kmax = 6
"""


def test_lap_writes_both_signs(tmp_path, capsys):
    cfg = _write(tmp_path, 'lap.ini', LAP_INI)
    out = tmp_path / 'lap'
    assert cli.main(['lap', '--config', cfg, '--out', str(out),
                     '--seed', '1']) == 0
    text = capsys.readouterr().out
    defect = float(text.split('difference_identity_defect = ')[1]
                   .splitlines()[0])
    assert defect < 1e-8
    for name in ('fields_plus.mxfd', 'fields_minus.mxfd'):
        assert fieldfile.read_field(out / name).data.shape == (3, 32, 32)


def test_lap_rejects_complex_frequency(tmp_path):
    cfg = _write(tmp_path, 'lap.ini',
                 LAP_INI.replace('re = 3.1', 're = 3.1\nim = 0.5'))
    assert cli.main(['lap', '--config', cfg,
                     '--out', str(tmp_path / 'o')]) == 1


def test_region_gamma_map_csv(tmp_path, capsys):
    cfg = _write(tmp_path, 'r.ini',
                 "[region]\nmode = gamma_map\ndim = 3\nresolution = 5\n")
    out = tmp_path / 'r'
    assert cli.main(['region', '--config', cfg, '--out', str(out)]) == 0
    lines = (out / 'gamma_map.csv').read_text().split('\n')
    assert lines[0] == 'x,y,gamma'
    assert len(lines) == 27          # header + 25 rows + trailing newline
    # decimal separator '.', field separator ',', shortest round trip
    row = dict(zip(lines[0].split(','),
                   (float(v) for v in lines[1].split(','))))
    assert row['gamma'] == 2.0       # (x, y) = (0, 0), d = 3


def test_region_membership_csv(tmp_path, capsys):
    cfg = _write(tmp_path, 'r.ini',
                 "[region]\nmode = membership\ndim = 3\n"
                 "points = 0.75,0.25; 0.5,0.5\n")
    out = tmp_path / 'r'
    assert cli.main(['region', '--config', cfg, '--out', str(out)]) == 0
    lines = (out / 'membership.csv').read_text().splitlines()
    assert lines[0] == 'x,y,r0_half,r1,p_set'
    assert lines[1] == '0.75,0.25,false,true,true'
    assert lines[2] == '0.5,0.5,true,false,false'


def test_region_boundary_and_empty(tmp_path, capsys):
    cfg = _write(tmp_path, 'r.ini',
                 "[region]\nmode = boundary\nx = 0.6\ny = 0.4\ndim = 2\n"
                 "ell = 1.3\nresolution = 64\n")
    out = tmp_path / 'r'
    assert cli.main(['region', '--config', cfg, '--out', str(out)]) == 0
    lines = (out / 'z_boundary.csv').read_text().splitlines()
    assert lines[0] == 're_omega,im_omega'
    assert len(lines) > 10
    capsys.readouterr()
    # an empty sublevel region is reported, not an error
    cfg2 = _write(tmp_path, 'r2.ini',
                  "[region]\nmode = boundary\nx = 0.75\ny = 0.25\ndim = 2\n"
                  "ell = 0.5\n")
    assert cli.main(['region', '--config', cfg2, '--out', str(out)]) == 0
    assert 'empty' in capsys.readouterr().out


def test_probe_blowup_slope(tmp_path, capsys):
    cfg = _write(tmp_path, 'p.ini',
                 "[grid]\ndim = 2\nn = 64\n"
                 "[material]\neps11 = 1.0\neps22 = 1.0\n"
                 "[probe]\nfamily = blowup\n")
    out = tmp_path / 'p'
    assert cli.main(['probe', '--config', cfg, '--out', str(out)]) == 0
    text = capsys.readouterr().out
    slope = float(text.split('fitted_slope = ')[1].splitlines()[0])
    assert slope == pytest.approx(-1.0, abs=0.1)
    lines = (out / 'probe.csv').read_text().splitlines()
    assert lines[0] == 'delta,norm_ratio'
    assert len(lines) == 8


def test_unknown_source_kind(tmp_path):
    cfg = _write(tmp_path, 'bad.ini',
                 SOLVE_INI.replace('kind = random', 'kind = mystery'))
    assert cli.main(['solve', '--config', cfg,
                     '--out', str(tmp_path / 'o')]) == 1
