"""Command-line front end: ``gbdt {check,potential,solve,dynamic,kdv,verify,example}``.

Input is a JSON config (``--config``) and/or a preset (``--preset``); flags
override ``GBDT_*`` environment variables, which override the config file.
Tables are written as CSV with ``#`` header lines.  Exit codes: 0 ok,
1 tolerance breach, 2 configuration error, 3 numerical failure.
"""
import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import catalog
from .core import (COND_TOL, IDENTITY_TOL, SolutionRequest, Triple, build_s_engine,
                   DynamicField, make_dressing, potential, transformed_solution,
                   validate_triple)
from .errors import GbdtError, SingularS, SpectralPoint
from .grid import Grid2D, GridSpec
from .kdv import build_kdv_engine, kdv_potential
from .matfun import EIGEN_TOL
from .verify import (DYNAMIC_C, FD_QUADRATURE, KDV_C, SCHRODINGER_C, dynamic_residual, identity_check,
                     kdv_residual, kdv_units, sampled_max_norm, schrodinger_residual,
                     schrodinger_unit)

OK, BREACH, CONFIG_ERROR, NUMERIC_FAILURE = 0, 1, 2, 3
SINGULAR = 'SINGULAR'
COMMANDS = ('check', 'potential', 'solve', 'dynamic', 'kdv', 'verify', 'example')

# Residual floors per equation and the dimensionless stencil steps.
FLOORS = {'schrodinger': 1e-6, 'dynamic': 1e-6, 'kdv': 1e-5}
SCHRODINGER_STEP = 0.05
KDV_STEP = 8e-3

_CONFIG_KEYS = {'preset', 'params', 'triple', 'Q', 'f1', 'f2', 'grid', 'tgrid', 'lambda',
                'f0', 'tolerances', 'mode', 'out'}
_ENV = ('config', 'out', 'grid', 'tgrid', 'lambda', 'preset', 'mode', 'tol_identity',
        'tol_residual', 'tol_cond', 'b', 'c', 'd', 'report')


class ConfigError(Exception):
    pass


class Breach(Exception):
    pass


# ---------------------------------------------------------------- parsing

def _number(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f'{path}: expected a real number, got {v!r}')
    return float(v)


def parse_scalar(v, path='value'):
    """A real number or an ``[re, im]`` pair."""
    if isinstance(v, list):
        if len(v) != 2:
            raise ConfigError(f'{path}: complex scalars are [re, im] pairs')
        return complex(_number(v[0], path + '[0]'), _number(v[1], path + '[1]'))
    return complex(_number(v, path))


def parse_matrix(v, path='matrix'):
    """Nested row arrays of scalars."""
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise ConfigError(f'{path}: expected a nonempty list of rows')
    width = len(v[0])
    rows = []
    for i, row in enumerate(v):
        if len(row) != width or not row:
            raise ConfigError(f'{path}[{i}]: rows must be nonempty and of equal length')
        rows.append([parse_scalar(e, f'{path}[{i}][{k}]') for k, e in enumerate(row)])
    return np.array(rows, dtype=np.complex128)


def parse_vector(v, path='vector'):
    if not isinstance(v, list) or not v:
        raise ConfigError(f'{path}: expected a nonempty list')
    return np.array([parse_scalar(e, f'{path}[{k}]') for k, e in enumerate(v)])


def parse_grid(v, path='grid'):
    try:
        if isinstance(v, str):
            return GridSpec.parse(v)
        if isinstance(v, dict):
            return GridSpec(_number(v.get('start'), path + '.start'),
                            _number(v.get('stop'), path + '.stop'),
                            _number(v.get('step'), path + '.step'))
    except ValueError as exc:
        raise ConfigError(f'{path}: {exc}') from None
    raise ConfigError(f'{path}: expected "start:stop:step" or an object')


def parse_lambdas(v, path='lambda'):
    if isinstance(v, str):
        try:
            return [complex(p.strip().replace('i', 'j')) for p in v.split(',') if p.strip()]
        except ValueError:
            raise ConfigError(f'{path}: cannot parse {v!r}') from None
    if isinstance(v, list):
        return [parse_scalar(e, f'{path}[{k}]') for k, e in enumerate(v)]
    return [parse_scalar(v, path)]


def load_config(path):
    try:
        with open(path, encoding='utf-8') as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f'{path}: {exc.strerror}') from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f'{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}') from None
    if not isinstance(cfg, dict):
        raise ConfigError(f'{path}: top level must be an object')
    unknown = sorted(set(cfg) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f'{path}: unknown field(s) {", ".join(unknown)}')
    return cfg


# ---------------------------------------------------------------- setup

@dataclass
class Tolerances:
    identity: float = IDENTITY_TOL
    residual: float = None
    cond: float = COND_TOL

    def floor(self, kind):
        return FLOORS[kind] if self.residual is None else self.residual

    def header(self):
        res = 'default' if self.residual is None else _fmt(self.residual)
        return f'tol_identity={_fmt(self.identity)} tol_residual={res} tol_cond={_fmt(self.cond)}'


@dataclass
class Setup:
    triple: Triple
    label: str
    cfg: dict
    opts: dict
    tol: Tolerances
    mode: str = None
    q: np.ndarray = None
    f1: np.ndarray = None
    f2: np.ndarray = None
    preset: object = None
    dressing: object = None

    def option(self, key):
        return self.opts.get(key) if self.opts.get(key) is not None else self.cfg.get(key)

    def grid(self, key='grid', required=True, default=None):
        v = self.option(key)
        if v is None:
            v = default
        if v is None:
            if required:
                raise ConfigError(f'missing {key}: pass --{key} start:stop:step')
            return None
        return parse_grid(v, key)

    def lambdas(self):
        v = self.option('lambda')
        if v is None:
            raise ConfigError('missing lambda: pass --lambda v[,v...]')
        lams = parse_lambdas(v)
        if not lams:
            raise ConfigError('lambda list is empty')
        return lams

    def f0(self):
        v = self.cfg.get('f0')
        h = self.triple.h
        if v is None:
            f0 = np.zeros(2 * h, dtype=np.complex128)
            f0[0] = 1.0
            return f0
        f0 = parse_vector(v, 'f0')
        if f0.size != 2 * h:
            raise ConfigError(f'f0: expected {2 * h} entries, got {f0.size}')
        return f0

    def ensure_dressing(self):
        if self.dressing is None:
            chk = validate_triple(self.triple)
            if not chk.passed(self.tol.identity):
                raise Breach(f'triple fails the identity check: residual {chk.identity:.3e}, '
                             f'hermitian defect {chk.hermitian:.3e}, scale {chk.scale:.3e}')
            if self.preset is not None and self.q is None:
                self.dressing = self.preset.dressing()
            else:
                self.dressing = make_dressing(self.triple, q=self.q, f1=self.f1, f2=self.f2,
                                              identity_tol=self.tol.identity)
        return self.dressing

    def header(self, command, engine=None):
        mode = engine.mode if engine is not None else 'n/a'
        lines = [f'gbdt {command}', f'source={self.label}',
                 f'n={self.triple.n} h={self.triple.h} mode={mode}', self.tol.header()]
        return ['# ' + s for s in lines]


def _env_opts(args):
    opts = {}
    for key in _ENV:
        val = getattr(args, key, None)
        if val is None:
            val = os.environ.get('GBDT_' + key.upper())
        opts[key] = val
    return opts


def _float_opt(opts, key):
    v = opts.get(key)
    if v is None:
        return None
    try:
        return float(v)
    except ValueError:
        raise ConfigError(f'{key}: not a number: {v!r}') from None


def build_setup(args):
    opts = _env_opts(args)
    cfg = load_config(opts['config']) if opts['config'] else {}
    tol_cfg = cfg.get('tolerances', {})
    if not isinstance(tol_cfg, dict):
        raise ConfigError('tolerances: expected an object')
    tol = Tolerances()
    for key in ('identity', 'residual', 'cond'):
        v = _float_opt(opts, 'tol_' + key)
        if v is None and key in tol_cfg:
            v = _number(tol_cfg[key], 'tolerances.' + key)
        if v is not None:
            if not v > 0:
                raise ConfigError(f'tol_{key} must be positive')
            setattr(tol, key, v)
    mode = opts.get('mode') or cfg.get('mode')
    if mode not in (None, 'closed_form', 'quadrature'):
        raise ConfigError(f'mode: expected closed_form or quadrature, got {mode!r}')

    preset_id = opts.get('preset') or cfg.get('preset')
    setup_kw = dict(cfg=cfg, opts=opts, tol=tol, mode=mode)
    if preset_id is not None:
        if 'triple' in cfg:
            raise ConfigError('config gives both a preset and a triple')
        params = dict(cfg.get('params', {}))
        for key in ('b', 'c', 'd'):
            v = _float_opt(opts, key)
            if v is not None:
                params[key] = v
        for key in ('S0', 'theta2'):
            if key in params:
                params[key] = parse_matrix(params[key], f'params.{key}')
        for key in ('b', 'c', 'd'):
            if key in params and not isinstance(params[key], np.ndarray):
                params[key] = _number(params[key], f'params.{key}')
        try:
            preset = catalog.get_preset(preset_id, **params)
            triple = preset.triple()
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc).strip('"')) from None
        label = 'preset ' + preset_id + ''.join(
            f' {k}={_fmt(v)}' for k, v in sorted(preset.params.items())
            if not isinstance(v, (list, np.ndarray)))
        setup = Setup(triple, label, preset=preset, **setup_kw)
    else:
        tr = cfg.get('triple')
        if not isinstance(tr, dict):
            raise ConfigError('no triple: give --preset or a config with a "triple" object')
        missing = [k for k in ('A', 'S0', 'theta1', 'theta2') if k not in tr]
        if missing:
            raise ConfigError(f'triple: missing {", ".join(missing)}')
        mats = {k: parse_matrix(tr[k], 'triple.' + k) for k in ('A', 'S0', 'theta1', 'theta2')}
        try:
            triple = Triple(**mats)
        except ValueError as exc:
            raise ConfigError(f'triple: {exc}') from None
        setup = Setup(triple, 'config', **setup_kw)
    for key in ('Q', 'f1', 'f2'):
        if key in cfg:
            setattr(setup, key.lower(), parse_matrix(cfg[key], key))
    return setup


# ---------------------------------------------------------------- output

def _fmt(v):
    # shortest round-trip repr: exact and reproducible
    return repr(float(v) + 0.0)


def _complex_cols(z):
    return [_fmt(z.real), _fmt(z.imag)]


def _entry_names(prefix, shape):
    if len(shape) == 1:
        return [f'{prefix}{i + 1}' for i in range(shape[0])]
    return [f'{prefix}{i + 1}{k + 1}' for i in range(shape[0]) for k in range(shape[1])]


def _value_header(prefix, shape):
    return [f'{name}.{part}' for name in _entry_names(prefix, shape) for part in ('re', 'im')]


def _values(arr):
    return [s for z in np.asarray(arr).ravel() for s in _complex_cols(z)]


class Table:
    def __init__(self, header_lines, columns):
        self.buf = io.StringIO(newline='')
        self.writer = csv.writer(self.buf, lineterminator='\n')
        for line in header_lines:
            self.buf.write(line + '\n')
        self.writer.writerow(columns)
        self.width = len(columns)

    def row(self, keys, values):
        self.writer.writerow([*keys, *values])

    def singular(self, keys):
        self.writer.writerow([*keys, *([SINGULAR] * (self.width - len(keys)))])

    def text(self):
        return self.buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_report(setup, report):
    path = setup.opts.get('report')
    if path:
        with open(path, 'w', encoding='utf-8', newline='') as fh:
            json.dump(report, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write('\n')


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    return str(o)


def _say(msg):
    print(msg, file=sys.stderr)


def _check_entry(name, report, floor, c):
    bound = report.bound(floor, c)
    return {'check': name, 'passed': bool(report.max_residual <= bound),
            'bound': bound, **report.as_dict()}


def _summarise(checks):
    for c in checks:
        state = 'PASS' if c['passed'] else 'FAIL'
        _say(f"{state} {c['check']}: max residual {c['max_residual']:.3e} "
             f"(bound {c['bound']:.3e})")
    return all(c['passed'] for c in checks)


# ---------------------------------------------------------------- checks

def _identity_sweep(setup, engine, xs, ts=None):
    worst = {'check': 'identity', 'max_residual': 0.0, 'bound': setup.tol.identity,
             'location': None, 'passed': True}
    pts = [(x, None) for x in xs] if ts is None else [(x, t) for t in ts for x in xs]
    for x, t in pts:
        defect, scale = identity_check(engine, float(x), None if t is None else float(t))
        rel = defect / scale
        if rel > worst['max_residual']:
            worst.update(max_residual=rel, location=x if t is None else (x, t))
    worst['passed'] = worst['max_residual'] <= setup.tol.identity
    return worst


def _schrodinger_check(setup, d, req, grid):
    engine = build_s_engine(d, mode=setup.mode, **FD_QUADRATURE)
    u = lambda x: potential(d, engine, x, setup.tol.cond)  # noqa: E731
    y = lambda x: transformed_solution(d, engine, x, req, setup.tol.cond)  # noqa: E731
    unit = schrodinger_unit(u, req.lam, grid.points())
    rep = schrodinger_residual(u, y, req.lam, grid, fd_step=SCHRODINGER_STEP * unit, unit=unit)
    return _check_entry(f'schrodinger lambda={req.lam}', rep, setup.tol.floor('schrodinger'),
                        SCHRODINGER_C)


def _dynamic_check(setup, d, grid2d):
    engine = build_s_engine(d, mode=setup.mode, **FD_QUADRATURE)
    u = lambda x: potential(d, engine, x, setup.tol.cond)  # noqa: E731
    psi = DynamicField(d, engine, setup.tol.cond)
    steps = None
    if len(grid2d.x) < 5 or len(grid2d.t) < 3:
        steps = (grid2d.x.step, grid2d.t.step)
    rep = dynamic_residual(u, psi, grid2d, fd_steps=steps)
    return _check_entry('dynamic', rep, setup.tol.floor('dynamic'), DYNAMIC_C)


def _kdv_check(setup, d, grid2d):
    kengine = build_kdv_engine(d, mode=setup.mode, **FD_QUADRATURE)
    u = lambda x, t: kdv_potential(kengine, x, t, setup.tol.cond)  # noqa: E731
    top = sampled_max_norm(u, [(x, t) for t in grid2d.t.points() for x in grid2d.x.points()])
    lx, lt = kdv_units(d, top)
    rep = kdv_residual(u, grid2d, fd_steps=(KDV_STEP * lx, KDV_STEP * lt), units=(lx, lt))
    return _check_entry('kdv', rep, setup.tol.floor('kdv'), KDV_C)


def _warn_lambdas(setup, lams):
    eig = np.linalg.eigvals(setup.triple.A)
    scale = max(1.0, float(np.max(np.abs(eig))))
    for lam in lams:
        dist = float(np.min(np.abs(eig - lam)))
        if dist <= 1e3 * EIGEN_TOL * scale:
            _say(f'warning: lambda={lam} lies on or near spec(A) (distance {dist:.3e})')


# ---------------------------------------------------------------- commands

def cmd_check(setup, args):
    """Validate the triple and its Sylvester identity."""
    tr = setup.triple
    chk = validate_triple(tr)
    eig = np.sort_complex(np.linalg.eigvals(tr.A))
    lines = [f'n={tr.n} h={tr.h}',
             f'identity residual: {chk.identity:.3e} (scale {chk.scale:.3e})',
             f'hermitian residual: {chk.hermitian:.3e}',
             'spec(A): ' + ' '.join(f'{z.real:+.6g}{z.imag:+.6g}i' for z in eig)]
    ok = chk.passed(setup.tol.identity)
    report = {'command': 'check', 'identity': chk.identity, 'hermitian': chk.hermitian,
              'scale': chk.scale, 'spectrum': [complex(z) for z in eig], 'passed': ok}
    if ok:
        d = setup.ensure_dressing()
        engine = build_s_engine(d, mode=setup.mode)
        r1, r2 = d.initial_residual()
        lines += [f'Q: {"supplied" if setup.q is not None or setup.preset else "principal root"}'
                  f', |Q^2 - A| = {d.root_residual():.3e}',
                  f'f residuals: {r1:.3e}, {r2:.3e}',
                  f'S engine: {engine.mode}']
        report.update(root_residual=d.root_residual(), mode=engine.mode)
    lines.append('PASS' if ok else 'FAIL')
    _emit('\n'.join(lines) + '\n', setup.option('out'))
    _write_report(setup, report)
    return OK if ok else BREACH


def cmd_potential(setup, args):
    """Tabulate the transformed potential on an x grid."""
    d = setup.ensure_dressing()
    engine = build_s_engine(d, mode=setup.mode)
    grid = setup.grid()
    table = Table(setup.header('potential', engine), ['x', *_value_header('u', (d.h, d.h))])
    for x in grid.points():
        key = [_fmt(x)]
        try:
            table.row(key, _values(potential(d, engine, float(x), setup.tol.cond)))
        except SingularS:
            table.singular(key)
    _emit(table.text(), setup.option('out'))
    if not args.verify:
        return OK
    checks = [_identity_sweep(setup, engine, grid.points())]
    _write_report(setup, {'command': 'potential', 'checks': checks})
    return OK if _summarise(checks) else BREACH


def cmd_solve(setup, args):
    """Tabulate transformed solutions for each spectral parameter."""
    d = setup.ensure_dressing()
    engine = build_s_engine(d, mode=setup.mode)
    grid = setup.grid()
    lams = setup.lambdas()
    f0 = setup.f0()
    _warn_lambdas(setup, lams)
    table = Table(setup.header('solve', engine),
                  ['lambda.re', 'lambda.im', 'x', *_value_header('y', (d.h,))])
    failed = []
    checks = []
    for lam in lams:
        req = SolutionRequest(lam, f0)
        rows = []
        try:
            for x in grid.points():
                key = [*_complex_cols(req.lam), _fmt(x)]
                try:
                    rows.append((key, _values(transformed_solution(d, engine, float(x), req,
                                                                  setup.tol.cond))))
                except SingularS:
                    rows.append((key, None))
        except SpectralPoint as exc:
            _say(f'error: {exc}')
            failed.append(lam)
            continue
        for key, vals in rows:
            if vals is None:
                table.singular(key)
            else:
                table.row(key, vals)
        if args.verify:
            checks.append(_schrodinger_check(setup, d, req, grid))
    _emit(table.text(), setup.option('out'))
    status = OK
    if args.verify:
        _write_report(setup, {'command': 'solve', 'checks': checks,
                              'spectral_points': [complex(z) for z in failed]})
        status = OK if _summarise(checks) else BREACH
    return NUMERIC_FAILURE if failed else status


def cmd_dynamic(setup, args):
    """Tabulate the dynamical Schrodinger solution on an (x, t) grid."""
    d = setup.ensure_dressing()
    engine = build_s_engine(d, mode=setup.mode)
    grid = setup.grid()
    tgrid = setup.grid('tgrid')
    psi = DynamicField(d, engine, setup.tol.cond)
    table = Table(setup.header('dynamic', engine),
                  ['t', 'x', *_value_header('psi', (d.h, d.n))])
    for t in tgrid.points():
        for x in grid.points():
            key = [_fmt(t), _fmt(x)]
            try:
                table.row(key, _values(psi(x, t)))
            except SingularS:
                table.singular(key)
    _emit(table.text(), setup.option('out'))
    if not args.verify:
        return OK
    checks = [_dynamic_check(setup, d, Grid2D(grid, tgrid))]
    _write_report(setup, {'command': 'dynamic', 'checks': checks})
    return OK if _summarise(checks) else BREACH


def cmd_kdv(setup, args):
    """Tabulate the matrix KdV solution on an (x, t) grid."""
    d = setup.ensure_dressing()
    kengine = build_kdv_engine(d, mode=setup.mode)
    grid = setup.grid()
    tgrid = setup.grid('tgrid')
    table = Table(setup.header('kdv', kengine), ['t', 'x', *_value_header('u', (d.h, d.h))])
    for t in tgrid.points():
        for x in grid.points():
            key = [_fmt(t), _fmt(x)]
            try:
                table.row(key, _values(kdv_potential(kengine, float(x), float(t),
                                                     setup.tol.cond)))
            except SingularS:
                table.singular(key)
    _emit(table.text(), setup.option('out'))
    if not args.verify:
        return OK
    checks = [_kdv_check(setup, d, Grid2D(grid, tgrid))]
    _write_report(setup, {'command': 'kdv', 'checks': checks})
    return OK if _summarise(checks) else BREACH


def cmd_verify(setup, args):
    """Run identity and finite-difference residual checks."""
    d = setup.ensure_dressing()
    engine = build_s_engine(d, mode=setup.mode)
    grid = setup.grid()
    tgrid = setup.grid('tgrid', required=False)
    checks = [_identity_sweep(setup, engine, grid.points())]
    if setup.option('lambda') is not None:
        lams = setup.lambdas()
        _warn_lambdas(setup, lams)
        f0 = setup.f0()
        for lam in lams:
            try:
                checks.append(_schrodinger_check(setup, d, SolutionRequest(lam, f0), grid))
            except SpectralPoint as exc:
                checks.append({'check': f'schrodinger lambda={lam}', 'passed': False,
                               'error': str(exc), 'max_residual': math.inf, 'bound': 0.0})
    if tgrid is not None:
        kengine = build_kdv_engine(d, mode=setup.mode)
        g2 = Grid2D(grid, tgrid)
        checks.append(_identity_sweep(setup, kengine, grid.points(), tgrid.points()))
        checks[-1]['check'] = 'identity (x, t)'
        checks.append(_dynamic_check(setup, d, g2))
        checks.append(_kdv_check(setup, d, g2))
    ok = all(c['passed'] for c in checks)
    lines = [*setup.header('verify', engine)]
    for c in checks:
        lines.append(f"{'PASS' if c['passed'] else 'FAIL'} {c['check']}: "
                     f"max residual {c['max_residual']:.3e} bound {c['bound']:.3e}")
    lines.append('PASS' if ok else 'FAIL')
    _emit('\n'.join(lines) + '\n', setup.option('out'))
    _write_report(setup, {'command': 'verify', 'checks': checks, 'passed': ok})
    return OK if ok else BREACH


def cmd_example(setup, args):
    """Pipeline potential next to the preset's closed form."""
    if setup.preset is None:
        raise ConfigError('example needs a preset id')
    d = setup.ensure_dressing()
    engine = build_s_engine(d, mode=setup.mode)
    grid = setup.grid(default='0.5:5:0.5')
    shape = (d.h, d.h)
    table = Table(setup.header('example', engine),
                  ['x', *_value_header('u', shape), *_value_header('ref', shape)])
    worst = 0.0
    for x in grid.points():
        key = [_fmt(x)]
        try:
            u = potential(d, engine, float(x), setup.tol.cond)
            ref = setup.preset.potential_reference(float(x))
        except (SingularS, GbdtError):
            table.singular(key)
            continue
        worst = max(worst, float(np.linalg.norm(u - ref) / max(1.0, np.linalg.norm(ref))))
        table.row(key, [*_values(u), *_values(ref)])
    _emit(table.text(), setup.option('out'))
    _say(f'max relative deviation from closed form: {worst:.3e}')
    return OK if worst <= 1e-10 else BREACH


_HANDLERS = {'check': cmd_check, 'potential': cmd_potential, 'solve': cmd_solve,
             'dynamic': cmd_dynamic, 'kdv': cmd_kdv, 'verify': cmd_verify,
             'example': cmd_example}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON configuration file')
    common.add_argument('--out', help='output path (default: stdout)')
    common.add_argument('--report', help='write a JSON report here')
    common.add_argument('--grid', help='x grid start:stop:step')
    common.add_argument('--tgrid', help='t grid start:stop:step')
    common.add_argument('--lambda', dest='lambda', help='spectral parameters v[,v...]')
    common.add_argument('--verify', action='store_true', help='attach residual checks')
    common.add_argument('--tol-identity', dest='tol_identity')
    common.add_argument('--tol-residual', dest='tol_residual')
    common.add_argument('--tol-cond', dest='tol_cond', help='rcond threshold for S')
    common.add_argument('--mode', choices=('closed_form', 'quadrature'))
    common.add_argument('--preset', choices=catalog.PRESETS)
    for p in ('b', 'c', 'd'):
        common.add_argument(f'--{p}', help=f'preset parameter {p}')
    parser = argparse.ArgumentParser(prog='gbdt', description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=(_HANDLERS[name].__doc__ or name))
        if name == 'example':
            sp.add_argument('example_id', nargs='?', choices=catalog.PRESETS)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CONFIG_ERROR if exc.code else OK
    if args.command == 'example' and args.example_id:
        args.preset = args.example_id
    try:
        setup = build_setup(args)
        return _HANDLERS[args.command](setup, args)
    except ConfigError as exc:
        _say(f'config error: {exc}')
        return CONFIG_ERROR
    except Breach as exc:
        _say(f'tolerance breach: {exc}')
        return BREACH
    except (GbdtError, np.linalg.LinAlgError) as exc:
        _say(f'numerical failure: {type(exc).__name__}: {exc}')
        return NUMERIC_FAILURE
    except OSError as exc:
        _say(f'I/O error: {exc}')
        return CONFIG_ERROR


if __name__ == '__main__':
    sys.exit(main())
