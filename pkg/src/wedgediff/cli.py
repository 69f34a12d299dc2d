"""Command-line front end: field sweeps, amplitudes, rate fits, half-plane comparison, checks."""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, TextIO

import numpy as np

from . import __version__
from . import amplitude as amp
from .geometry import DEFAULT_BAND, ConfigError, CriticalRayError, PolarPoint, WedgeScene, derive
from .profiles import Profile, ProfileError
from .quadrature import DecayError, QuadratureError, QuadratureSpec

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
REF_PHI, REF_ALPHA = math.pi / 2, math.pi / 4
NUMERIC_ERRORS = (QuadratureError, DecayError, FloatingPointError, ZeroDivisionError)

COMMON_KEYS = {
    "phi", "alpha", "omega0", "profile", "s0", "rel_tol", "abs_tol", "band", "out", "threads",
    "strict", "degrees",
}
COMMAND_KEYS = {
    "field": {"rho", "theta", "t"},
    "amplitude": {"rho", "theta", "t"},
    "rate": {"rho", "theta", "t_lo", "t_hi", "per_decade"},
    "halfplane": {"rho", "theta", "t", "route", "npoints", "seed"},
    "validate": {"no_rates"},
    "kernel": {"beta", "theta"},
}


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    n: int

    def values(self, geometric: bool = False) -> np.ndarray:
        if self.n == 1:
            return np.array([self.lo])
        if geometric:
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


def parse_grid(text: str, name: str) -> Grid:
    """'v' for a single value or 'lo:hi:n' for n evenly spaced values."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return Grid(v, v, 1)
        if len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            return Grid(lo, hi, n)
    except ValueError:
        pass
    raise ConfigError(f"field '{name}': expected 'value' or 'lo:hi:n', got {text!r}")


@dataclass
class RunConfig:
    command: str
    scene: WedgeScene
    profile: Profile
    spec: QuadratureSpec
    band: float
    out: str | None = None
    threads: int = 1
    strict: bool = False
    degrees: bool = False
    options: dict[str, Any] = field(default_factory=dict)

    def angle(self, v: float) -> float:
        return math.radians(v) if self.degrees else float(v)

    def grid(self, name: str, default: str | None = None) -> Grid:
        v = self.options.get(name, default)
        if v is None:
            raise ConfigError(f"field '{name}': required")
        return parse_grid(v, name)

    def angles(self, name: str, default: str | None = None) -> np.ndarray:
        return np.array([self.angle(v) for v in self.grid(name, default).values()])


# ---------------------------------------------------------------- configuration

def _load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _positive(name: str, v: Any) -> float:
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"field '{name}': not a number: {v!r}") from None
    if not (x > 0 and math.isfinite(x)):
        raise ConfigError(f"field '{name}': must be positive, got {v!r}")
    return x


def build_config(ns: argparse.Namespace) -> RunConfig:
    cmd = ns.command
    allowed = COMMON_KEYS | COMMAND_KEYS[cmd]
    merged: dict[str, Any] = {}
    if ns.config:
        filed = _load_config_file(ns.config)
        unknown = sorted(set(filed) - allowed)
        if unknown:
            raise ConfigError(f"{ns.config}: unknown field(s) for '{cmd}': {', '.join(unknown)}")
        merged.update(filed)
    for k in allowed:
        v = getattr(ns, k, None)
        if v is not None and v is not False:
            merged[k] = v

    degrees = bool(merged.get("degrees", False))
    conv = (lambda x: math.radians(float(x))) if degrees else float
    try:
        phi = conv(merged.get("phi", math.degrees(REF_PHI) if degrees else REF_PHI))
        alpha = conv(merged.get("alpha", math.degrees(REF_ALPHA) if degrees else REF_ALPHA))
    except (TypeError, ValueError):
        raise ConfigError("field 'phi'/'alpha': not a number") from None
    omega0 = _positive("omega0", merged.get("omega0", 1.0))
    scene = derive(phi, alpha, omega0)

    kind = merged.get("profile", "heaviside")
    try:
        if kind == "ramp":
            profile = Profile.ramp(_positive("s0", merged.get("s0", 0.5)))
        elif kind == "heaviside":
            profile = Profile.heaviside()
        else:
            raise ConfigError(f"field 'profile': expected ramp or heaviside, got {kind!r}")
    except ProfileError as exc:
        raise ConfigError(f"field 's0': {exc}") from exc

    try:
        spec = QuadratureSpec(rel_tol=_positive("rel_tol", merged.get("rel_tol", 1e-8)),
                              abs_tol=_positive("abs_tol", merged.get("abs_tol", 1e-12)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    band = _positive("band", merged.get("band", DEFAULT_BAND))
    threads = merged.get("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        raise ConfigError(f"field 'threads': must be a positive integer, got {threads!r}")
    options = {k: merged[k] for k in COMMAND_KEYS[cmd] if k in merged}
    return RunConfig(cmd, scene, profile, spec, band, merged.get("out"), threads,
                     bool(merged.get("strict", False)), degrees, options)


# ---------------------------------------------------------------- output

def fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(fh: TextIO, header: list[str], rows: Iterable[list[Any]], cfg: RunConfig,
              extra: Iterable[str] = ()) -> None:
    fh.write(",".join(header) + "\n")
    for r in rows:
        fh.write(",".join(fmt(v) for v in r) + "\n")
    for line in extra:
        fh.write(f"# {line}\n")
    fh.write(f"# scene={cfg.scene.describe()}\n")
    fh.write(f"# profile={cfg.profile.describe()}\n")
    fh.write(f"# tolerances={cfg.spec.describe()};band={cfg.band!r}\n")
    fh.write(f"# version={__version__}\n")


def _cx(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _pmap(fn: Callable, items: list, threads: int) -> list:
    """Ordered map; results come back in input order for any worker count."""
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


# ---------------------------------------------------------------- commands

NAN2 = [math.nan, math.nan]


def _field_row(args) -> list:
    from .fields import incident_lit, u_d_with_error, u_in, u_r
    scene, profile, spec, band, rho, theta, t = args
    p = PolarPoint(rho, theta)
    ui = u_in(scene, profile, p, t) if incident_lit(scene, theta) else 0j
    ur = u_r(scene, profile, p, t)
    try:
        ud, err = u_d_with_error(scene, profile, p, t, spec, band)
        status = "ok"
    except CriticalRayError:
        return [rho, theta, t, *_cx(ui), *_cx(ur), *NAN2, *NAN2, math.nan, "critical_band"]
    except NUMERIC_ERRORS:
        return [rho, theta, t, *_cx(ui), *_cx(ur), *NAN2, *NAN2, math.nan, "quad_fail"]
    return [rho, theta, t, *_cx(ui), *_cx(ur), *_cx(ud), *_cx(ui + ur + ud), err, status]


def cmd_field(cfg: RunConfig, fh: TextIO) -> int:
    rhos = cfg.grid("rho", "1").values()
    thetas = cfg.angles("theta", str(math.degrees(3.5) if cfg.degrees else 3.5))
    ts = cfg.grid("t", "2").values()
    if np.any(rhos < 0):
        raise ConfigError("field 'rho': must be >= 0")
    lo = cfg.scene.phi
    if np.any((thetas < lo) | (thetas > 2 * math.pi)):
        raise ConfigError(f"field 'theta': must lie in [phi, 2 pi] = [{lo:.17g}, 2 pi]")
    items = [(cfg.scene, cfg.profile, cfg.spec, cfg.band, float(r), float(th), float(t))
             for t in ts for th in thetas for r in rhos]
    rows = _pmap(_field_row, items, cfg.threads)
    header = ["rho", "theta", "t", "re_u_in", "im_u_in", "re_u_r", "im_u_r", "re_u_d", "im_u_d",
              "re_u", "im_u", "error_estimate", "status"]
    write_csv(fh, header, rows, cfg)
    if cfg.strict and any(r[-1] == "quad_fail" for r in rows):
        return EXIT_NUMERIC
    return EXIT_OK


def _amp_row(args) -> list:
    scene, profile, spec, band, p, t, a_sum, a_con = args
    try:
        a_t = amp.a_total_time(scene, profile, p, t, spec, band)
    except NUMERIC_ERRORS:
        return [t, *NAN2, *_cx(a_sum), *_cx(a_con), math.nan, "quad_fail"]
    return [t, *_cx(a_t), *_cx(a_sum), *_cx(a_con), abs(a_t - a_sum), "ok"]


def cmd_amplitude(cfg: RunConfig, fh: TextIO) -> int:
    rho = cfg.grid("rho", "1").lo
    theta = cfg.angle(cfg.grid("theta", "3.5").lo)
    ts = cfg.grid("t", f"{5 * rho}:{320 * rho}:7").values(geometric=True)
    p = PolarPoint(rho, theta)
    header = ["t", "re_A", "im_A", "re_A_inf_sum", "im_A_inf_sum", "re_A_inf_contour",
              "im_A_inf_contour", "abs_A_minus_A_inf", "status"]
    try:
        a_sum = amp.a_components(cfg.scene, p, cfg.spec, cfg.band).a_inf
        a_con = amp.a_inf_contour(cfg.scene, p, cfg.spec, cfg.band)
    except CriticalRayError:
        rows = [[float(t), *NAN2, *NAN2, *NAN2, math.nan, "critical_band"] for t in ts]
        write_csv(fh, header, rows, cfg)
        return EXIT_OK
    items = [(cfg.scene, cfg.profile, cfg.spec, cfg.band, p, float(t), a_sum, a_con) for t in ts]
    rows = _pmap(_amp_row, items, cfg.threads)
    write_csv(fh, header, rows, cfg, [f"rho={rho!r};theta={theta!r};route_gap={abs(a_sum - a_con):.3e}"])
    if cfg.strict and any(r[-1] == "quad_fail" for r in rows):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_rate(cfg: RunConfig, fh: TextIO) -> int:
    rho = cfg.grid("rho", "1").lo
    theta = cfg.angle(cfg.grid("theta", "3.5").lo)
    p = PolarPoint(rho, theta)
    t_lo = float(cfg.options.get("t_lo", 10 * rho))
    t_hi = float(cfg.options.get("t_hi", 1000 * rho))
    per_decade = int(cfg.options.get("per_decade", 16))
    ts, v = amp.rate_sweep(cfg.scene, p, t_lo, t_hi, per_decade, cfg.spec)
    floor = 1e3 * cfg.spec.abs_tol
    fits = {"im": amp.fit_loglog(ts, v.imag, floor), "re": amp.fit_loglog(ts, v.real, floor)}
    signs = {"im": int(np.sign(np.median(v.imag[len(ts) // 2:]))),
             "re": int(np.sign(np.median(v.real[len(ts) // 2:])))}
    first = amp.rate_prediction(cfg.scene, p, order=1)
    lead = amp.rate_prediction(cfg.scene, p, order=None)
    rows = []
    for part in ("im", "re"):
        f = fits[part]
        for label, pr in (("first_order", first), ("leading", lead)):
            e = pr.im_exponent if part == "im" else pr.re_exponent
            c = pr.im_coeff if part == "im" else pr.re_coeff
            rows.append([part, label, pr.order, f.slope, e, signs[part] * f.coeff, c, f.npoints])
    header = ["part", "prediction", "order", "fitted_slope", "predicted_slope",
              "fitted_coeff", "predicted_coeff", "npoints"]
    write_csv(fh, header, rows, cfg, [f"rho={rho!r};theta={theta!r};t_lo={t_lo!r};t_hi={t_hi!r}"])
    return EXIT_OK


def cmd_halfplane(cfg: RunConfig, fh: TextIO) -> int:
    from .halfplane import HalfPlaneError, halfplane_compare
    if not cfg.scene.is_halfplane:
        raise ConfigError("field 'phi': the half-plane comparison needs phi = 0")
    route = cfg.options.get("route", "s")
    if route not in ("s", "beta"):
        raise ConfigError(f"field 'route': expected s or beta, got {route!r}")
    if "rho" in cfg.options or "theta" in cfg.options or "t" in cfg.options:
        pts = [(float(r), float(th), float(t)) for t in cfg.grid("t", "3").values()
               for th in cfg.angles("theta", "2.0") for r in cfg.grid("rho", "1").values()]
    else:
        rng = np.random.default_rng(int(cfg.options.get("seed", 0)))
        pts = []
        for _ in range(int(cfg.options.get("npoints", 10))):
            r = float(rng.uniform(0.2, 3.0))
            pts.append((r, float(rng.uniform(0.1, 2 * math.pi - 0.1)), float(r * rng.uniform(2.05, 6.0))))
    try:
        rep = halfplane_compare(cfg.scene.alpha, pts, cfg.scene.omega0, route, cfg.spec)
    except (HalfPlaneError, CriticalRayError) as exc:
        raise ConfigError(f"field 'theta': {exc}") from exc
    rows = [[r.rho, r.theta, r.t, *_cx(r.u_d), *_cx(r.phi_d), r.factor, r.deviation, r.deviation_flipped]
            for r in rep.rows]
    header = ["rho", "theta", "t", "re_u_d", "im_u_d", "re_phi_d", "im_phi_d", "factor",
              "abs_u_d_minus_factor_phi_d", "abs_u_d_plus_factor_phi_d"]
    rel = "u_d = Phi_d" if rep.theta0 != 0.0 else "u_d = 2 Phi_d"
    ok = rep.max_deviation <= 1e-6
    extra = [f"relation={rel};route={route};max_deviation={rep.max_deviation:.3e};"
             f"max_deviation_sign_flipped={rep.max_deviation_flipped:.3e};confirmed={'yes' if ok else 'no'}"]
    write_csv(fh, header, rows, cfg, extra)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_validate(cfg: RunConfig, fh: TextIO) -> int:
    from .validation import run_suite
    prof = cfg.profile if cfg.profile.smooth else Profile.ramp(0.5)
    cfg.profile = prof
    reps = run_suite(cfg.scene, prof, cfg.spec, include_rates=not cfg.options.get("no_rates", False))

    def val(v):
        if isinstance(v, complex):
            return f"{v.real:.17g}{v.imag:+.17g}j"
        return fmt(v)
    rows = [[r.name.replace(",", ";"), val(r.observed), val(r.expected), r.tolerance,
             "pass" if r.passed else "fail", r.details.replace(",", ";")] for r in reps]
    nfail = sum(not r.passed for r in reps)
    write_csv(fh, ["check", "observed", "expected", "tolerance", "result", "details"], rows, cfg,
              [f"checks={len(reps)};failed={nfail}"])
    return EXIT_OK if nfail == 0 else EXIT_CHECK


def cmd_kernel(cfg: RunConfig, fh: TextIO) -> int:
    from .kernels import PoleError, h_dd, h_dn, h_nn, z_nn
    betas = cfg.grid("beta", "-5:5:101").values()
    theta = cfg.angle(cfg.grid("theta", "3.5").lo)
    sc = cfg.scene
    rows = []
    for b in betas:
        z = complex(b, theta)
        vals = []
        status = "ok"
        for fn in (lambda: h_nn(sc, z), lambda: h_dd(sc, z), lambda: h_dn(sc, z),
                   lambda: z_nn(sc, float(b), theta, band=cfg.band)):
            try:
                vals += _cx(complex(np.asarray(fn()).item()))
            except CriticalRayError:
                vals += NAN2
                status = "critical_band"
            except PoleError:
                vals += NAN2
                status = "pole"
        rows.append([float(b), theta, *vals, status])
    header = ["beta", "theta", "re_h_nn", "im_h_nn", "re_h_dd", "im_h_dd", "re_h_dn", "im_h_dn",
              "re_z_nn", "im_z_nn", "status"]
    write_csv(fh, header, rows, cfg)
    return EXIT_OK


COMMANDS = {
    "field": cmd_field, "amplitude": cmd_amplitude, "rate": cmd_rate,
    "halfplane": cmd_halfplane, "validate": cmd_validate, "kernel": cmd_kernel,
}


# ---------------------------------------------------------------- argument parsing

def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scene and numerics")
    g.add_argument("--config", help="JSON object with any of the long option names; flags override it")
    g.add_argument("--phi", type=float, help="wedge face angle (default pi/2)")
    g.add_argument("--alpha", type=float, help="incidence angle (default pi/4)")
    g.add_argument("--omega0", type=float, help="incident frequency (default 1)")
    g.add_argument("--profile", choices=["ramp", "heaviside"], help="incident profile (default heaviside)")
    g.add_argument("--s0", type=float, help="ramp width (default 0.5)")
    g.add_argument("--rel-tol", dest="rel_tol", type=float, help="quadrature relative tolerance")
    g.add_argument("--abs-tol", dest="abs_tol", type=float, help="quadrature absolute tolerance")
    g.add_argument("--band", type=float, help="critical-ray exclusion band in radians")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--threads", type=int, help="worker processes for sweeps (default 1)")
    g.add_argument("--strict", action="store_true", help="exit 3 if any point fails to integrate")
    g.add_argument("--degrees", action="store_true", help="angles given in degrees")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wedgediff", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    grid_help = "value or lo:hi:n"

    p = sub.add_parser("field", help="u_in, u_r, u_d and u on a (rho, theta, t) grid")
    p.add_argument("--rho", help=grid_help)
    p.add_argument("--theta", help=grid_help)
    p.add_argument("--t", help=grid_help)
    _common(p)

    p = sub.add_parser("amplitude", help="A(t) = u e^{i w0 t} against both A_inf routes")
    p.add_argument("--rho")
    p.add_argument("--theta")
    p.add_argument("--t", help="lo:hi:n, geometric spacing (default 5rho:320rho:7)")
    _common(p)

    p = sub.add_parser("rate", help="log-log slopes of the residual against predictions")
    p.add_argument("--rho")
    p.add_argument("--theta")
    p.add_argument("--t-lo", dest="t_lo", type=float)
    p.add_argument("--t-hi", dest="t_hi", type=float)
    p.add_argument("--per-decade", dest="per_decade", type=int)
    _common(p)

    p = sub.add_parser("halfplane", help="u_d of the phi=0 scene against the comparison field")
    p.add_argument("--rho", help=grid_help)
    p.add_argument("--theta", help=grid_help)
    p.add_argument("--t", help=grid_help)
    p.add_argument("--route", choices=["s", "beta"])
    p.add_argument("--npoints", type=int, help="random points when no grid is given (default 10)")
    p.add_argument("--seed", type=int)
    _common(p)

    p = sub.add_parser("validate", help="run the verification suite")
    p.add_argument("--no-rates", dest="no_rates", action="store_true")
    _common(p)

    p = sub.add_parser("kernel", help="kernel values on a beta grid at fixed theta")
    p.add_argument("--beta", help=grid_help)
    p.add_argument("--theta")
    _common(p)
    return ap


def main(argv: list[str] | None = None) -> int:
    ns = make_parser().parse_args(argv)
    try:
        cfg = build_config(ns)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fh = open(cfg.out, "w", encoding="utf-8", newline="") if cfg.out else sys.stdout
    try:
        return COMMANDS[cfg.command](cfg, fh)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (*NUMERIC_ERRORS, ValueError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        if fh is not sys.stdout:
            fh.close()


if __name__ == "__main__":
    sys.exit(main())
