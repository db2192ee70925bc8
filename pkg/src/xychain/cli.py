"""Deterministic command-line front end emitting CSV.

Subcommands: spectrum, bath-spectrum, flux, magnetization, spinflip,
validate.  Runs are configured by a flat `key = value` file (# comments)
plus flag overrides (`--N 7`).  Every CSV starts with a comment block
echoing the fully resolved configuration with 17 significant digits, so
re-parsing the echo reproduces the configuration exactly and repeated runs
are byte-identical.

Exit codes: 0 success, 2 integration failure, 3 configuration error,
4 capability (problem size) error, 1 failed validation suite.
"""

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import validate as validation
from .bath import BathParams, incomplete_spectral, markov_spectral, spectral_density
from .dynamics import IntegratorConfig, integrate
from .errors import CapabilityError, ConfigError, IntegrationError
from .liouvillian import generator_apply, lamb_shift, thermal_product_state
from .secular import flux_bounds, secular_energy, secular_flux, secular_magnetization, thermal_occupations
from .spectrum import ChainParams, dispersions
from .spinflip import ResponseQuery, evaluate_response

SCHEMES = ("concatenation", "secular", "secular_delta", "reference", "both")

REQUIRED_KEYS = ("N", "j", "h", "lambda", "beta_bath", "sigma", "t_max")


def _int_min(lo):
    def parse(raw):
        v = int(str(raw).strip())
        if v < lo:
            raise ValueError(f"must be >= {lo}")
        return v
    return parse


def _float_any(raw):
    return float(str(raw).strip())


def _float_pos(raw):
    v = float(str(raw).strip())
    if not v > 0:
        raise ValueError("must be > 0")
    return v


def _float_nonneg(raw):
    v = float(str(raw).strip())
    if v < 0:
        raise ValueError("must be >= 0")
    return v


def _int_range(lo, hi):
    def parse(raw):
        v = int(str(raw).strip())
        if not lo <= v <= hi:
            raise ValueError(f"must be in {lo}..{hi}")
        return v
    return parse


def _scheme(raw):
    v = str(raw).strip()
    if v not in SCHEMES:
        raise ValueError(f"must be one of {', '.join(SCHEMES)}")
    return v


_KEY_PARSERS = {
    "N": _int_min(1),
    "j": _float_any,
    "h": _float_any,
    "lambda": _float_nonneg,
    "beta_bath": _float_any,
    "sigma": _float_pos,
    "n_trunc": _int_range(1, 4),
    "beta_sys0": _float_any,
    "scheme": _scheme,
    "t_max": _float_pos,
    "t_switch": _float_nonneg,
    "rel_tol": _float_pos,
    "abs_tol": _float_pos,
    "sample_dt": _float_pos,
    "max_step": _float_pos,
    "output_path": lambda raw: str(raw).strip(),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration."""

    chain: ChainParams
    bath: BathParams
    integrator: IntegratorConfig
    beta_sys0: float
    scheme: str
    output_path: Optional[str] = None


def _parse_pairs(text: str) -> dict:
    """key -> (raw value, line number) from flat key=value text."""
    pairs = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEY_PARSERS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in pairs:
            raise ConfigError("duplicate key", key=key, line=lineno)
        pairs[key] = (value, lineno)
    return pairs


def _coerced(pairs: dict) -> dict:
    out = {}
    for key, (raw, lineno) in pairs.items():
        if key not in _KEY_PARSERS:
            raise ConfigError("unknown key", key=key, line=lineno)
        try:
            out[key] = _KEY_PARSERS[key](raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid value {raw!r}: {exc}", key=key, line=lineno) from exc
    return out


def _require(vals: dict, keys) -> None:
    for key in keys:
        if key not in vals:
            raise ConfigError("missing required key", key=key)


def _chain_from(vals: dict) -> ChainParams:
    _require(vals, ("N", "j", "h"))
    try:
        return ChainParams(vals["N"], vals["j"], vals["h"])
    except ValueError as exc:
        raise ConfigError(str(exc), key="N") from exc


def _bath_from(vals: dict) -> BathParams:
    _require(vals, ("lambda", "beta_bath", "sigma"))
    try:
        return BathParams(vals["lambda"], vals["beta_bath"], vals["sigma"],
                          vals.get("n_trunc", 2))
    except ValueError as exc:
        raise ConfigError(str(exc), key="sigma") from exc


def _build_config(vals: dict) -> RunConfig:
    _require(vals, REQUIRED_KEYS)
    chain = _chain_from(vals)
    bath = _bath_from(vals)
    t_max = vals["t_max"]
    t_switch = vals.get("t_switch", min(3.5 / bath.sigma, t_max))
    sample_dt = vals.get("sample_dt", t_max / 400.0)
    try:
        integrator = IntegratorConfig(
            t_max=t_max,
            rel_tol=vals.get("rel_tol", 1e-8),
            abs_tol=vals.get("abs_tol", 1e-10),
            t_switch=t_switch,
            sample_dt=sample_dt,
            max_step=vals.get("max_step", np.inf),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), key="t_max") from exc
    return RunConfig(
        chain=chain,
        bath=bath,
        integrator=integrator,
        beta_sys0=vals.get("beta_sys0", 0.0),
        scheme=vals.get("scheme", "concatenation"),
        output_path=vals.get("output_path"),
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a flat key=value configuration file."""
    return _build_config(_coerced(_parse_pairs(text)))


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def config_echo(cfg: RunConfig) -> list:
    """Resolved configuration as parseable `key = value` lines."""
    c, b, i = cfg.chain, cfg.bath, cfg.integrator
    items = [
        ("N", c.N), ("j", c.j), ("h", c.h),
        ("lambda", b.lam), ("beta_bath", b.beta_bath), ("sigma", b.sigma),
        ("n_trunc", b.n_trunc), ("beta_sys0", cfg.beta_sys0), ("scheme", cfg.scheme),
        ("t_max", i.t_max), ("t_switch", i.t_switch),
        ("rel_tol", i.rel_tol), ("abs_tol", i.abs_tol),
        ("sample_dt", i.sample_dt), ("max_step", i.max_step),
    ]
    if cfg.output_path is not None:
        items.append(("output_path", cfg.output_path))
    return [f"{k} = {_fmt(v)}" for k, v in items]


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".xychain-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(echo_lines, notes, header, rows) -> str:
    out = []
    out.extend(f"# {line}\n" for line in echo_lines)
    out.extend(f"## {line}\n" for line in notes)
    out.append(",".join(header) + "\n")
    out.extend(",".join(_fmt(v) for v in row) + "\n" for row in rows)
    return "".join(out)


# ---------------------------------------------------------------------------
# subcommands

def _collect_values(args) -> dict:
    """Config file values overlaid with command-line overrides."""
    pairs = {}
    if args.config is not None:
        with open(args.config) as fh:
            pairs = _parse_pairs(fh.read())
    vals = _coerced(pairs)
    for key in _KEY_PARSERS:
        attr = {"lambda": "lam", "output_path": "output"}.get(key, key)
        raw = getattr(args, attr, None)
        if raw is not None:
            try:
                vals[key] = _KEY_PARSERS[key](raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"invalid value {raw!r}: {exc}", key=key) from exc
    return vals


def _cmd_spectrum(args) -> int:
    vals = _collect_values(args)
    chain = _chain_from(vals)
    om = dispersions(chain)
    echo = [f"N = {chain.N}", f"j = {_fmt(chain.j)}", f"h = {_fmt(chain.h)}"]
    rows = [(a, om[a - 1]) for a in range(1, chain.N + 1)]
    _write_text(vals.get("output_path"), _csv_text(echo, [], ("a", "omega"), rows))
    return 0


def _cmd_bath_spectrum(args) -> int:
    vals = _collect_values(args)
    bath = _bath_from(vals)
    t = args.t if args.t is not None else 3.5 / bath.sigma
    if t < 0:
        raise ConfigError("evaluation time must be >= 0", key="t")
    if args.omega_points < 2:
        raise ConfigError("need at least 2 grid points", key="omega_points")
    om = np.linspace(args.omega_min, args.omega_max, args.omega_points)
    gam = spectral_density(bath, om)
    ginf = markov_spectral(bath, om)
    gt = incomplete_spectral(bath, om, t)
    echo = [
        f"lambda = {_fmt(bath.lam)}", f"beta_bath = {_fmt(bath.beta_bath)}",
        f"sigma = {_fmt(bath.sigma)}", f"n_trunc = {bath.n_trunc}",
    ]
    notes = [f"t = {_fmt(t)}"]
    header = ("omega", "gamma", "re_Gamma_inf", "im_Gamma_inf", "re_Gamma_t", "im_Gamma_t")
    rows = [
        (om[i], gam[i], ginf[i].real, ginf[i].imag, gt[i].real, gt[i].imag)
        for i in range(om.size)
    ]
    _write_text(vals.get("output_path"), _csv_text(echo, notes, header, rows))
    return 0


def _trajectory_rows(cfg: RunConfig, scheme: str):
    rho0 = thermal_product_state(cfg.chain, cfg.beta_sys0)
    traj = integrate(cfg.chain, cfg.bath, rho0, cfg.integrator, scheme=scheme)
    header = ["t", "J"] + [f"m_{n}" for n in range(1, cfg.chain.N + 1)] + [
        "energy", "trace_error", "min_eig"]
    rows = [
        (traj.times[i], traj.flux[i], *traj.magnetization[i],
         traj.energy[i], traj.trace_error[i], traj.min_eigenvalue[i])
        for i in range(traj.times.size)
    ]
    return header, rows


def _secular_flux_rows(cfg: RunConfig):
    occ0 = thermal_occupations(cfg.chain, cfg.beta_sys0)
    t = cfg.integrator.sample_times()
    J = secular_flux(t, cfg.chain, cfg.bath, occ0)
    lo, hi = flux_bounds(t, cfg.chain, cfg.bath)
    energy = secular_energy(t, cfg.chain, cfg.bath, occ0)
    header = ["t", "J", "J_lower_bound", "J_upper_bound", "energy"]
    rows = [(t[i], J[i], lo[i], hi[i], energy[i]) for i in range(t.size)]
    return header, rows


def _with_suffix(path: Optional[str], tag: str) -> Optional[str]:
    if path is None:
        return None
    stem, ext = os.path.splitext(path)
    return f"{stem}_{tag}{ext or '.csv'}"


def _dump_operators(cfg: RunConfig, prefix: str) -> None:
    """Markov-kernel Lamb shifts and the generator image of the initial state."""
    gamma = lambda w: markov_spectral(cfg.bath, w)
    rho0 = thermal_product_state(cfg.chain, cfg.beta_sys0)
    blocks = {
        "lamb_shift_plus": lamb_shift(cfg.chain, gamma, +1),
        "lamb_shift_minus": lamb_shift(cfg.chain, gamma, -1),
        "generator_rho0": generator_apply(cfg.chain, gamma, rho0),
    }
    for tag, M in blocks.items():
        rows = [[f"{v.real:.17g}{v.imag:+.17g}j" for v in row] for row in M]
        text = "".join(f"# {line}\n" for line in config_echo(cfg))
        text += "".join(",".join(row) + "\n" for row in rows)
        _write_text(f"{prefix}_{tag}.csv", text)


def _cmd_flux(args) -> int:
    cfg = _build_config(_collect_values(args))
    if getattr(args, "dump_operators", None):
        _dump_operators(cfg, args.dump_operators)
    if cfg.scheme == "both":
        header, rows = _trajectory_rows(cfg, "concatenation")
        text = _csv_text(config_echo(cfg), ["scheme = concatenation"], header, rows)
        _write_text(_with_suffix(cfg.output_path, "concatenation"), text)
        header, rows = _secular_flux_rows(cfg)
        text = _csv_text(config_echo(cfg), ["scheme = secular"], header, rows)
        _write_text(_with_suffix(cfg.output_path, "secular"), text)
        return 0
    if cfg.scheme == "secular":
        header, rows = _secular_flux_rows(cfg)
    else:
        header, rows = _trajectory_rows(cfg, cfg.scheme)
    _write_text(cfg.output_path, _csv_text(config_echo(cfg), [], header, rows))
    return 0


def _cmd_magnetization(args) -> int:
    cfg = _build_config(_collect_values(args))
    if cfg.scheme == "both":
        raise ConfigError("scheme 'both' applies to the flux subcommand only", key="scheme")
    header = ["t"] + [f"m_{n}" for n in range(1, cfg.chain.N + 1)]
    if cfg.scheme == "secular":
        t = cfg.integrator.sample_times()
        occ0 = thermal_occupations(cfg.chain, cfg.beta_sys0)
        m = secular_magnetization(t, cfg.chain, cfg.bath, occ0)
        rows = [(t[i], *m[i]) for i in range(t.size)]
    else:
        rho0 = thermal_product_state(cfg.chain, cfg.beta_sys0)
        traj = integrate(cfg.chain, cfg.bath, rho0, cfg.integrator, scheme=cfg.scheme)
        rows = [(traj.times[i], *traj.magnetization[i]) for i in range(traj.times.size)]
    _write_text(cfg.output_path, _csv_text(config_echo(cfg), [], header, rows))
    return 0


def _parse_sites(spec: str) -> list:
    sites = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if "-" in chunk[1:]:
            lo, hi = chunk.split("-", 1)
            sites.extend(range(int(lo), int(hi) + 1))
        else:
            sites.append(int(chunk))
    if not sites or any(n < 1 for n in sites):
        raise ValueError("sites must be positive integers")
    return sites


def _cmd_spinflip(args) -> int:
    # the time grid may start or end at 0 for the exact modes, so the grid
    # extent bypasses the trajectory t_max > 0 validator
    grid_max_raw, args.t_max = args.t_max, None
    vals = _collect_values(args)
    mode = args.mode.replace("-", "_")
    finite = mode in ("eigen", "thermal")
    chain = _chain_from(vals) if finite else None
    if finite:
        j, h = chain.j, chain.h
    else:
        _require(vals, ("j", "h"))
        j, h = vals["j"], vals["h"]
    try:
        sites = _parse_sites(args.sites)
    except ValueError as exc:
        raise ConfigError(str(exc), key="sites") from exc
    if finite and max(sites) > chain.N:
        raise ConfigError(f"site {max(sites)} exceeds N={chain.N}", key="sites")
    try:
        t_hi = float(grid_max_raw) if grid_max_raw is not None else vals.get("t_max", 10.0)
    except ValueError as exc:
        raise ConfigError(f"invalid value {grid_max_raw!r}", key="t_max") from exc
    if t_hi < args.t_min:
        raise ConfigError("grid end must be >= --t-min", key="t_max")
    if args.t_points < 1:
        raise ConfigError("need at least one time point", key="t_points")
    times = np.linspace(args.t_min, t_hi, args.t_points)
    if mode in ("high_temp", "low_temp") and times.min() <= 0:
        raise ConfigError(
            f"mode {args.mode} is a large-time asymptotic; set --t-min > 0", key="t_min")
    beta = args.beta
    code = None
    if mode == "eigen":
        if args.occupation is None:
            raise ConfigError("mode eigen requires --occupation", key="occupation")
        bits = args.occupation.strip()
        if len(bits) != chain.N or set(bits) - {"0", "1"}:
            raise ConfigError(
                f"occupation must be {chain.N} characters of 0/1", key="occupation")
        code = int(bits[::-1], 2)
    norm = 1.0
    if args.normalized:
        if beta == 0 or h == 0:
            raise ConfigError("normalization by beta*h undefined for beta=0 or h=0",
                              key="normalized")
        norm = beta * h

    echo = []
    if finite:
        echo += [f"N = {chain.N}"]
    echo += [f"j = {_fmt(j)}", f"h = {_fmt(h)}"]
    notes = [f"mode = {args.mode}", f"beta = {_fmt(beta)}", f"normalized = {args.normalized}"]
    if code is not None:
        notes.append(f"occupation = {args.occupation.strip()}")
    rows = []
    for n in sites:
        for t in times:
            q = ResponseQuery(mode=mode, n=n, t=float(t), beta=beta,
                              chain=chain, j=j, h=h, k=code)
            rows.append((n, float(t), evaluate_response(q) / norm))
    _write_text(vals.get("output_path"), _csv_text(echo, notes, ("n", "t", "delta"), rows))
    return 0


def _cmd_validate(args) -> int:
    return 0 if validation.run_all() else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _make_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat key=value configuration file")
    shared.add_argument("--N", dest="N")
    shared.add_argument("--j", dest="j")
    shared.add_argument("--h", dest="h")
    shared.add_argument("--lambda", dest="lam")
    shared.add_argument("--beta-bath", dest="beta_bath")
    shared.add_argument("--sigma", dest="sigma")
    shared.add_argument("--n-trunc", dest="n_trunc")
    shared.add_argument("--beta-sys0", dest="beta_sys0")
    shared.add_argument("--scheme", dest="scheme")
    shared.add_argument("--t-max", dest="t_max")
    shared.add_argument("--t-switch", dest="t_switch")
    shared.add_argument("--rel-tol", dest="rel_tol")
    shared.add_argument("--abs-tol", dest="abs_tol")
    shared.add_argument("--sample-dt", dest="sample_dt")
    shared.add_argument("--max-step", dest="max_step")
    shared.add_argument("--output", dest="output")

    parser = _Parser(prog="xychain", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[shared],
                       help="mode frequencies as CSV (a, omega)")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("bath-spectrum", parents=[shared],
                       help="bath spectral functions on an omega grid")
    p.add_argument("--t", type=float, default=None,
                   help="evaluation time for Gamma_t (default 3.5/sigma)")
    p.add_argument("--omega-min", type=float, default=-10.0)
    p.add_argument("--omega-max", type=float, default=10.0)
    p.add_argument("--omega-points", type=int, default=201)
    p.set_defaults(func=_cmd_bath_spectrum)

    p = sub.add_parser("flux", parents=[shared],
                       help="heat-flux trajectory (or closed form for --scheme secular)")
    p.add_argument("--dump-operators", metavar="PREFIX",
                   help="also dump Lamb shifts and the generator image of the "
                        "initial state (Markov kernel) as CSV matrices")
    p.set_defaults(func=_cmd_flux)

    p = sub.add_parser("magnetization", parents=[shared],
                       help="local magnetization trajectory (t, m_1..m_N)")
    p.set_defaults(func=_cmd_magnetization)

    p = sub.add_parser("spinflip", parents=[shared],
                       help="single-spin-flip magnetization response (n, t, delta)")
    p.add_argument("--mode", required=True,
                   choices=["eigen", "thermal", "thermo", "high-temp", "low-temp"])
    p.add_argument("--beta", type=float, default=0.8,
                   help="initial inverse temperature (thermal/thermo modes)")
    p.add_argument("--sites", default="1-10", help="site list, e.g. 1,3,5 or 1-20")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-points", type=int, default=101)
    p.add_argument("--occupation", help="eigenstate bits k_1..k_N, e.g. 0101")
    p.add_argument("--normalized", action="store_true",
                   help="divide the response by beta*h")
    p.set_defaults(func=_cmd_spinflip)

    p = sub.add_parser("validate", parents=[shared],
                       help="run the oracle cross-check suites")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return 4
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
