"""Command-line surface: ``maxres <subcommand> --config job.ini``.

Subcommands:

* ``solve``   complex-frequency solve, writes a field file, prints the
              residual, divergence defect and charge norms.
* ``verify``  randomized symbol/multiplier invariant suites; exit 0 iff
              every suite passes, otherwise exit 1 with the first
              failing witness.
* ``lap``     real-frequency limiting solutions for both signs, writes
              both fields and prints the difference-identity defect; a
              cross-validation disagreement between the two evaluation
              methods exits with code 2.
* ``region``  exponent-region arithmetic: gamma maps, membership
              tables and Z-region boundaries as CSV.
* ``probe``   empirical operator-norm scaling probes, CSV of
              (parameter, norm) pairs plus a fitted slope.

Configuration is INI-style UTF-8 text (see the README for the keys).
Exit codes: 0 success, 1 failure (including configuration errors),
2 cross-validation disagreement.  A fixed ``--seed`` makes reports and
output files byte-identical between runs.
"""

import argparse
import configparser
import os
import sys

import numpy as np

from . import fieldfile, lap, region, spectral, verify
from .errors import ConfigError, EmptyRegion, MaxresError, MethodsDisagree
from .materials import Material2, Material3
from .region import LebesguePair, RegionQuery
from .spectral import Grid

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DISAGREE = 2


# ---------------------------------------------------------------------------
# configuration


def load_config(path):
    cp = configparser.ConfigParser()
    read = cp.read(path, encoding='utf-8')
    if not read:
        raise ConfigError("cannot read config file %r" % path)
    return cp


def _get(cp, section, key, cast=str, default=None):
    if not cp.has_option(section, key):
        if default is not None:
            return default
        raise ConfigError("missing [%s] %s" % (section, key))
    raw = cp.get(section, key)
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError("bad value for [%s] %s: %r (%s)"
                          % (section, key, raw, exc))


def parse_grid(cp):
    dim = _get(cp, 'grid', 'dim', int)
    n = _get(cp, 'grid', 'n', int)
    length = _get(cp, 'grid', 'length', float, default=2 * np.pi)
    try:
        return Grid(dim, n, length)
    except ValueError as exc:
        raise ConfigError("invalid grid: %s" % exc)


def parse_material(cp):
    dim = _get(cp, 'grid', 'dim', int)
    try:
        if dim == 2:
            return Material2(_get(cp, 'material', 'eps11', float),
                             _get(cp, 'material', 'eps12', float, default=0.0),
                             _get(cp, 'material', 'eps22', float),
                             mu=_get(cp, 'material', 'mu', float, default=1.0))
        if dim == 3:
            return Material3(_get(cp, 'material', 'eps_axis', float),
                             _get(cp, 'material', 'eps_perp', float),
                             axis=_get(cp, 'material', 'axis', int, default=1),
                             mu=_get(cp, 'material', 'mu', float, default=1.0))
    except ValueError as exc:
        raise ConfigError("invalid material: %s" % exc)
    raise ConfigError("dim must be 2 or 3, got %d" % dim)


def parse_omega(cp):
    re = _get(cp, 'frequency', 're', float)
    im = _get(cp, 'frequency', 'im', float, default=0.0)
    return complex(re, im)


def build_source(cp, grid, mat, rng):
    """Source field from [source]: a file, or a builtin random family."""
    kind = _get(cp, 'source', 'kind', str, default='random')
    ncomp = 3 if grid.dim == 2 else 6
    if kind == 'file':
        path = _get(cp, 'source', 'path')
        f = fieldfile.read_field(path)
        if f.grid.dim != grid.dim or f.grid.n != grid.n:
            raise ConfigError("source file grid does not match [grid]")
        return f
    if kind in ('random', 'solenoidal'):
        kmax = _get(cp, 'source', 'kmax', int, default=grid.n // 4)
        return spectral.random_band_limited(
            grid, ncomp, rng, kmax=kmax,
            solenoidal=(kind == 'solenoidal'), mat=mat)
    if kind == 'annulus':
        omega = parse_omega(cp)
        thickness = _get(cp, 'source', 'thickness', float, default=1.0)
        return region.annulus_source(grid, omega.real, mat,
                                     thickness=thickness, rng=rng)
    if kind == 'knapp':
        omega = parse_omega(cp)
        return region.knapp_source(grid, omega, mat)
    raise ConfigError("unknown source kind %r" % kind)


# ---------------------------------------------------------------------------
# output helpers


def format_float(x):
    """Shortest round-trip decimal form."""
    return repr(float(x))


def write_csv(path, header, rows):
    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.write(','.join(header) + '\n')
        for row in rows:
            fh.write(','.join(format_float(v) if isinstance(v, float)
                              else str(v) for v in row) + '\n')


def _outdir(args):
    out = args.out or '.'
    os.makedirs(out, exist_ok=True)
    return out


def _emit(lines, path=None):
    text = '\n'.join(lines) + '\n'
    sys.stdout.write(text)
    if path is not None:
        with open(path, 'w', encoding='utf-8', newline='\n') as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args, cp):
    grid = parse_grid(cp)
    mat = parse_material(cp)
    omega = parse_omega(cp)
    if omega.imag == 0:
        raise ConfigError("Im(omega) = 0: use the lap subcommand for "
                          "real-frequency limiting solutions")
    rng = np.random.default_rng(args.seed)
    J = build_source(cp, grid, mat, rng)
    u = spectral.solve(omega, J, mat)
    out = _outdir(args)
    fieldfile.write_field(os.path.join(out, 'fields.mxfd'), u)
    resid = spectral.forward_operator(omega, u, mat) - J
    rel = spectral.lebesgue_norm(resid, 2) / spectral.lebesgue_norm(J, 2)
    charges = spectral.divergence_and_charges(J)
    q = _get(cp, 'tolerances', 'charge_q', float, default=2.0)
    lines = ['omega = %s' % omega,
             'residual_rel_l2 = %s' % format_float(rel)]
    for name, rho in (('rho_e', charges.rho_e), ('rho_m', charges.rho_m)):
        div = spectral.lebesgue_norm(rho, 2)
        lines.append('divergence_%s_l2 = %s' % (name, format_float(div)))
        if div > 0:
            pot = spectral.fractional_laplacian(rho, -1.0)
            nrm = spectral.lebesgue_norm(pot, q)
            lines.append('halfinv_laplacian_%s_l%s = %s'
                         % (name, format_float(q), format_float(nrm)))
    _emit(lines, os.path.join(out, 'solve_report.txt'))
    tol = _get(cp, 'tolerances', 'residual', float, default=1e-10)
    return EXIT_OK if rel < tol else EXIT_FAIL


def cmd_verify(args, cp):
    n_points = _get(cp, 'verify', 'points', int, default=100_000) \
        if cp.has_section('verify') else 100_000
    flip = None
    if cp is not None and cp.has_option('verify', 'flip_entry'):
        parts = cp.get('verify', 'flip_entry').split(',')
        flip = (int(parts[0]), int(parts[1]))
        if flip in verify.M3_ZERO_ENTRIES:
            raise ConfigError("flip_entry %r is identically zero" % (flip,))
    reports = verify.run_all(seed=args.seed, n_points=n_points,
                             flip_entry=flip)
    out = _outdir(args)
    lines = []
    code = EXIT_OK
    for r in reports:
        lines.append('[%s]' % r.name)
        lines.append('count = %d' % r.count)
        lines.append('max_defect = %s' % format_float(r.max_defect))
        lines.append('tolerance = %s' % format_float(r.tolerance))
        lines.append('passed = %s' % str(r.passed).lower())
        for k in sorted(r.extras):
            lines.append('%s = %s' % (k, r.extras[k]))
        if not r.passed and code == EXIT_OK:
            code = EXIT_FAIL
            lines.append('witness = %s' % (r.witness,))
        lines.append('')
    _emit(lines, os.path.join(out, 'verify_report.txt'))
    return code


def cmd_lap(args, cp):
    grid = parse_grid(cp)
    mat = parse_material(cp)
    omega = parse_omega(cp)
    if omega.imag != 0:
        raise ConfigError("lap requires real omega; use solve otherwise")
    rng = np.random.default_rng(args.seed)
    J = build_source(cp, grid, mat, rng)
    method = _get(cp, 'lap', 'method', str, default='quadrature') \
        if cp.has_section('lap') else 'quadrature'
    cross = _get(cp, 'lap', 'cross_tol', float, default=0.0) \
        if cp.has_section('lap') else 0.0
    out = _outdir(args)
    kw = dict(method=method)
    if cross > 0:
        kw['cross_tol'] = cross
    u_plus = lap.lap_solve(omega.real, J, mat, sign=+1, **kw)
    u_minus = lap.lap_solve(omega.real, J, mat, sign=-1, **kw)
    fieldfile.write_field(os.path.join(out, 'fields_plus.mxfd'), u_plus)
    fieldfile.write_field(os.path.join(out, 'fields_minus.mxfd'), u_minus)
    surf = lap.surface_terms(omega.real, J, mat)
    diff = (u_plus - u_minus) - 2.0 * surf
    denom = max(spectral.lebesgue_norm(u_plus, 2),
                spectral.lebesgue_norm(u_minus, 2), 1e-300)
    defect = spectral.lebesgue_norm(diff, 2) / denom
    lines = ['omega = %s' % format_float(omega.real),
             'method = %s' % method,
             'difference_identity_defect = %s' % format_float(defect)]
    _emit(lines, os.path.join(out, 'lap_report.txt'))
    return EXIT_OK


def _parse_pair(cp, section='region'):
    x = _get(cp, section, 'x', float)
    y = _get(cp, section, 'y', float)
    dim = _get(cp, 'grid', 'dim', int) if cp.has_section('grid') \
        else _get(cp, section, 'dim', int)
    return LebesguePair(x, y, dim)


def cmd_region(args, cp):
    mode = _get(cp, 'region', 'mode', str, default='gamma_map')
    out = _outdir(args)
    if mode == 'gamma_map':
        d = _get(cp, 'region', 'dim', int, default=3)
        n = _get(cp, 'region', 'resolution', int, default=101)
        rows = []
        for i in range(n):
            for j in range(n):
                x = i / (n - 1)
                y = j / (n - 1)
                g = region.gamma(LebesguePair(x, y, d))
                rows.append((float(x), float(y), float(g)))
        write_csv(os.path.join(out, 'gamma_map.csv'),
                  ('x', 'y', 'gamma'), rows)
        _emit(['wrote gamma_map.csv (%d rows)' % len(rows)])
        return EXIT_OK
    if mode == 'boundary':
        pair = _parse_pair(cp)
        ell = _get(cp, 'region', 'ell', float)
        n = _get(cp, 'region', 'resolution', int, default=256)
        query = RegionQuery(pair, ell)
        try:
            pts = region.z_boundary(query, resolution=n)
        except EmptyRegion as exc:
            _emit(['Z region is empty: %s' % exc])
            return EXIT_OK
        rows = [(float(w.real), float(w.imag)) for w in pts]
        write_csv(os.path.join(out, 'z_boundary.csv'),
                  ('re_omega', 'im_omega'), rows)
        _emit(['wrote z_boundary.csv (%d rows)' % len(rows)])
        return EXIT_OK
    if mode == 'membership':
        pair_dim = _get(cp, 'region', 'dim', int, default=3)
        pts = _get(cp, 'region', 'points')
        rows = []
        for tok in pts.split(';'):
            xs, ys = tok.split(',')
            p = LebesguePair(float(xs), float(ys), pair_dim)
            rows.append((float(p.x), float(p.y),
                         str(region.membership(p, 'R0_half')).lower(),
                         str(region.membership(p, 'R1')).lower(),
                         str(region.membership(p, 'P_set')).lower()))
        write_csv(os.path.join(out, 'membership.csv'),
                  ('x', 'y', 'r0_half', 'r1', 'p_set'), rows)
        _emit(['wrote membership.csv (%d rows)' % len(rows)])
        return EXIT_OK
    raise ConfigError("unknown region mode %r" % mode)


def cmd_probe(args, cp):
    grid = parse_grid(cp)
    mat = parse_material(cp)
    family = _get(cp, 'probe', 'family', str, default='annulus')
    pair = _parse_pair(cp, 'probe') if cp.has_option('probe', 'x') \
        else LebesguePair(0.5, 0.5, grid.dim)
    out = _outdir(args)
    rng = np.random.default_rng(args.seed)
    if family == 'blowup':
        omega = region.on_sphere_frequency(grid, mat)
        deltas = [2.0 ** -k for k in range(3, 10)]
        fit, ds, ratios = lap.lap_blowup_probe(omega, pair, mat, deltas,
                                               grid=grid)
        write_csv(os.path.join(out, 'probe.csv'), ('delta', 'norm_ratio'),
                  list(zip(map(float, ds), map(float, ratios))))
        _emit(['family = blowup', 'omega = %s' % format_float(omega),
               'fitted_slope = %s' % format_float(fit.slope),
               'fit_residual = %s' % format_float(fit.residual)])
        return EXIT_OK
    if family == 'annulus':
        family = 'radial'
    if family in ('radial', 'knapp'):
        vary = _get(cp, 'probe', 'vary', str, default='dist')
        count = _get(cp, 'probe', 'samples', int, default=6)
        if vary == 'dist':
            base = region.on_sphere_frequency(grid, mat)
            omegas = [base + 1j * 2.0 ** -k for k in range(2, 2 + count)]
        else:
            omegas = [lam + 0.25j for lam in
                      np.linspace(4.0, 10.0, count)]
        fit, xs, ys = region.norm_scaling_probe(pair, mat, family, omegas,
                                                grid=grid, vary=vary,
                                                rng=rng)
        write_csv(os.path.join(out, 'probe.csv'), ('parameter', 'norm_ratio'),
                  list(zip(map(float, xs), map(float, ys))))
        _emit(['family = %s' % family, 'vary = %s' % vary,
               'fitted_slope = %s' % format_float(fit.slope),
               'fit_residual = %s' % format_float(fit.residual)])
        return EXIT_OK
    raise ConfigError("unknown probe family %r" % family)


# ---------------------------------------------------------------------------
# entry point


COMMANDS = {'solve': cmd_solve, 'verify': cmd_verify, 'lap': cmd_lap,
            'region': cmd_region, 'probe': cmd_probe}


def build_parser():
    ap = argparse.ArgumentParser(
        prog='maxres',
        description='Spectral Maxwell resolvent toolkit')
    ap.add_argument('command', choices=sorted(COMMANDS))
    ap.add_argument('--config', help='INI job configuration file')
    ap.add_argument('--out', help='output directory (default: cwd)')
    ap.add_argument('--seed', type=int, default=0,
                    help='RNG seed; fixed seed gives byte-identical output')
    ap.add_argument('--threads', type=int, default=0,
                    help='limit BLAS/FFT thread pools (0 = leave alone)')
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads > 0:
        try:
            import threadpoolctl
            threadpoolctl.threadpool_limits(args.threads)
        except ImportError:
            os.environ['OMP_NUM_THREADS'] = str(args.threads)
    cp = None
    try:
        if args.config is not None:
            cp = load_config(args.config)
        elif args.command != 'verify':
            raise ConfigError("--config is required for %r" % args.command)
        if cp is None:
            cp = configparser.ConfigParser()
        return COMMANDS[args.command](args, cp)
    except MethodsDisagree as exc:
        sys.stderr.write('method cross-validation failed: %s\n' % exc)
        return EXIT_DISAGREE
    except (ConfigError, OSError) as exc:
        sys.stderr.write('error: %s\n' % exc)
        return EXIT_FAIL
    except MaxresError as exc:
        sys.stderr.write('%s: %s\n' % (type(exc).__name__, exc))
        return EXIT_FAIL


if __name__ == '__main__':
    sys.exit(main())
