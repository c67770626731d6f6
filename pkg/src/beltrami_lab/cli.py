"""Command-line interface.

Subcommands
-----------
solve       principal solution for a named dilatation, field dumps + summary
truncate    truncation-scheme run over a K-cap schedule
holder      log-continuity scan of a named closed-form map
radial      radial profile table + modulus-inequality spot checks
dilatation  dilatation diagnostics: K sup, weight mass, integrability scan
report      merge the *.summary.json files in an output directory

Every run writes ``<command>.summary.json`` under --out.  CSV artifacts use
17 significant digits, '.' decimal separator, ',' field separator, and LF
line endings; CFLD field dumps are raw little-endian float64 pairs behind a
two-line ASCII header.  Reruns with identical flags and seed are
byte-identical (timings live only in the JSON).  Exit status: 0 all checks
passed, 1 a check failed, 2 invalid config or runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .dilatation import (
    MuSpec,
    build_dilatation_report,
    example3_image_weight,
    example4_image_weight,
    l1_norm,
    named_map,
    truncate_mu,
)
from .numerics import ComplexField, GridSpec
from .radial import (
    Example2Profile,
    IdentityProfile,
    LimitStretchProfile,
    RadialWeight,
    example1_weight,
    inverse_poletsky_check,
    power_weight,
    rho_profile,
    unit_weight,
)
from .solver import SolveConfig, residual_report, solve_principal, truncation_scheme
from .verify import HolderConfig, holder_scan

__all__ = ["main", "parse_config", "run_command", "dump_field", "read_field", "RunConfig"]


class ConfigError(ValueError):
    """Invalid run configuration; the message lists every bad field."""


@dataclass
class RunConfig:
    command: str
    mu: str = "const:0.3"
    alpha: float = 0.5
    k: float | None = None
    k_schedule: tuple = (4.0, 8.0, 16.0, 32.0, 64.0)
    order_p: float = 1.5
    bound: str = "auto"
    map_name: str = "example3"
    profile: str = "example2"
    n: int = 2
    m: float = 2.0
    pairs: int = 2000
    scale_range: tuple = (3, 14)
    compact_radius: float = 0.75
    weight: str = "auto"
    scan_radii: tuple = ()
    grid_n: int = 512
    half_width: float = 2.0
    fix_tol: float = 1e-10
    max_iter: int = 200
    residual_tol: float | None = None
    out_dir: str = "out"
    seed: int = 0
    dump_fields: bool = True


_WEIGHTS = {
    "unit": lambda cfg: unit_weight(cfg.n),
    "power": lambda cfg: power_weight(cfg.n),
    "example1": lambda cfg: example1_weight(cfg.n),
    "example3-image": lambda cfg: example3_image_weight(cfg.alpha),
    "example4-image": lambda cfg: example4_image_weight(),
}


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    if isinstance(x, (complex, np.complexfloating)):
        return "%.17g%+.17gj" % (x.real, x.imag)
    return str(x)


def write_csv(path: str, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def dump_field(fld: ComplexField, path: str) -> None:
    """Write the CFLD format: magic line, one ASCII header line
    'nx ny x0 y0 dx dy', then nx*ny little-endian float64 (re, im) pairs,
    row-major with y as the outer index."""
    g = fld.grid
    header = "CFLD1\n" + "%d %d %.17g %.17g %.17g %.17g\n" % (
        g.nx, g.ny, g.x_min, g.y_min, g.dx, g.dy,
    )
    payload = np.empty((g.ny, g.nx, 2), dtype="<f8")
    payload[:, :, 0] = fld.data.real
    payload[:, :, 1] = fld.data.imag
    try:
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(payload.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write field dump {path!r}: {exc}") from exc


def read_field(path: str) -> ComplexField:
    try:
        with open(path, "rb") as fh:
            magic = fh.readline()
            if magic != b"CFLD1\n":
                raise ValueError(f"{path!r} is not a CFLD file")
            parts = fh.readline().split()
            if len(parts) != 6:
                raise ValueError(f"{path!r}: malformed CFLD header")
            nx, ny = int(parts[0]), int(parts[1])
            x0, y0, dx, dy = (float(p) for p in parts[2:])
            raw = np.frombuffer(fh.read(), dtype="<f8")
    except OSError as exc:
        raise OSError(f"cannot read field dump {path!r}: {exc}") from exc
    if raw.size != nx * ny * 2:
        raise ValueError(f"{path!r}: payload size mismatch")
    pairs = raw.reshape(ny, nx, 2)
    grid = GridSpec(nx=nx, ny=ny, x_min=x0, y_min=y0, dx=dx, dy=dy)
    return ComplexField(grid, pairs[:, :, 0] + 1j * pairs[:, :, 1])


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="beltrami-lab", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", default=None, help="JSON file mirroring flags")

    ps = sub.add_parser("solve", help="principal solution for a dilatation")
    ps.add_argument("--mu", default="const:0.3",
                    help="const:C, example3, example4, or grid:FILE.cfld")
    ps.add_argument("--alpha", type=float, default=0.5)
    ps.add_argument("--k", type=float, default=None, help="truncation level")
    ps.add_argument("--grid", type=int, default=512)
    ps.add_argument("--half-width", type=float, default=2.0)
    ps.add_argument("--tol", type=float, default=1e-10)
    ps.add_argument("--max-iter", type=int, default=200)
    ps.add_argument("--residual-tol", type=float, default=None,
                    help="override the automatic residual check threshold")
    ps.add_argument("--no-dump", action="store_true")
    common(ps)

    pt = sub.add_parser("truncate", help="truncation scheme over a K-cap schedule")
    pt.add_argument("--mu", default="example4")
    pt.add_argument("--alpha", type=float, default=0.5)
    pt.add_argument("--p", type=float, default=1.5, dest="order_p")
    pt.add_argument("--k", default="4,8,16,32,64", help="comma-separated caps")
    pt.add_argument("--bound", default="auto",
                    help="'auto' (pi + 2pi/(2-p)), 'none', or a number")
    pt.add_argument("--grid", type=int, default=512)
    pt.add_argument("--half-width", type=float, default=2.0)
    pt.add_argument("--tol", type=float, default=1e-10)
    pt.add_argument("--max-iter", type=int, default=200)
    common(pt)

    ph = sub.add_parser("holder", help="log-continuity scan of a closed-form map")
    ph.add_argument("--map", default="example3", dest="map_name",
                    choices=["identity", "example3", "example4", "example2"])
    ph.add_argument("--alpha", type=float, default=0.5)
    ph.add_argument("--k", type=float, default=None)
    ph.add_argument("--m", type=float, default=2.0)
    ph.add_argument("--pairs", type=int, default=2000)
    ph.add_argument("--scales", default="3:14",
                    help="dyadic exponent range lo:hi, scales 2^-lo .. 2^-hi")
    ph.add_argument("--compact-radius", type=float, default=0.75)
    ph.add_argument("--weight", default="auto",
                    help="auto, none, or one of: " + ", ".join(sorted(_WEIGHTS)))
    common(ph)

    pr = sub.add_parser("radial", help="profile table and modulus spot checks")
    pr.add_argument("--profile", default="example2",
                    choices=["identity", "example2", "example4-limit", "numeric"])
    pr.add_argument("--n", type=int, default=2)
    pr.add_argument("--m", type=float, default=2.0)
    pr.add_argument("--weight", default="power", help="weight for numeric profiles")
    pr.add_argument("--alpha", type=float, default=0.5)
    pr.add_argument("--pairs", type=int, default=20, help="random radius pairs")
    common(pr)

    pd = sub.add_parser("dilatation", help="dilatation diagnostics")
    pd.add_argument("--mu", default="example3")
    pd.add_argument("--alpha", type=float, default=0.5)
    pd.add_argument("--k", type=float, default=None)
    pd.add_argument("--weight", default="auto")
    pd.add_argument("--scan-radii", default="",
                    help="comma-separated radii for the integrability scan")
    common(pd)

    pp = sub.add_parser("report", help="merge summaries in an output directory")
    common(pp)
    return top


def _inject_config_file(argv: list) -> list:
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ConfigError("--config needs a file path")
    path = argv[idx + 1]
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config file {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path!r} must hold a JSON object")
    extra: list[str] = []
    for key, val in sorted(data.items()):
        if key == "command":
            continue
        flag = "--" + str(key).replace("_", "-")
        if isinstance(val, bool):
            if val:
                extra.append(flag)
        elif isinstance(val, (list, tuple)):
            extra.extend([flag, ",".join(str(v) for v in val)])
        else:
            extra.extend([flag, str(val)])
    # file values come first so explicit argv flags win
    return argv[:1] + extra + argv[1:]


def _parse_mu(text: str, alpha: float, errors: list) -> MuSpec | None:
    try:
        if text.startswith("const:"):
            return MuSpec.constant(complex(text[6:]))
        if text == "example3":
            return MuSpec.example3(alpha)
        if text == "example4":
            return MuSpec.example4()
        if text.startswith("grid:"):
            return MuSpec.from_grid(read_field(text[5:]))
    except (ValueError, OSError) as exc:
        errors.append(f"--mu/--alpha: {exc}")
        return None
    errors.append(f"--mu: unknown dilatation {text!r}")
    return None


def parse_config(argv: list) -> RunConfig:
    """Parse and validate argv (after the program name).  All invalid
    fields are reported together in a single ConfigError."""
    argv = _inject_config_file(list(argv))
    ns = _build_parser().parse_args(argv)
    errors: list[str] = []
    cfg = RunConfig(command=ns.command)
    cfg.out_dir = ns.out
    cfg.seed = ns.seed

    def positive(name, value, kind=float):
        try:
            v = kind(value)
        except (TypeError, ValueError):
            errors.append(f"--{name}: not a number: {value!r}")
            return None
        if v <= 0:
            errors.append(f"--{name}: must be positive, got {value!r}")
            return None
        return v

    if ns.command in ("solve", "truncate", "dilatation"):
        cfg.mu = ns.mu
        cfg.alpha = ns.alpha
        _parse_mu(ns.mu, ns.alpha, errors)
    if ns.command in ("solve", "truncate"):
        cfg.grid_n = ns.grid
        cfg.half_width = ns.half_width
        cfg.fix_tol = ns.tol
        cfg.max_iter = ns.max_iter
        if ns.grid < 8:
            errors.append(f"--grid: need at least 8 points per side, got {ns.grid}")
        if ns.half_width < 1.5:
            errors.append("--half-width: must be >= 1.5 to pad the disk")
        positive("tol", ns.tol)
        if ns.max_iter < 1:
            errors.append("--max-iter: must be >= 1")
    if ns.command == "solve":
        cfg.residual_tol = ns.residual_tol
        cfg.dump_fields = not ns.no_dump
        if ns.k is not None:
            cfg.k = positive("k", ns.k)
            if cfg.k is not None and cfg.k < 1.0:
                errors.append("--k: truncation level must be >= 1")
    if ns.command == "truncate":
        try:
            ks = tuple(float(s) for s in str(ns.k).split(",") if s.strip())
        except ValueError:
            errors.append(f"--k: not a comma-separated number list: {ns.k!r}")
            ks = ()
        if ks and (any(x < 1 for x in ks) or any(b <= a for a, b in zip(ks, ks[1:]))):
            errors.append(f"--k: schedule must be increasing levels >= 1: {ns.k!r}")
        cfg.k_schedule = ks
        cfg.order_p = ns.order_p
        if not (1.0 < ns.order_p <= 2.0):
            errors.append(f"--p: order must lie in (1, 2], got {ns.order_p}")
        cfg.bound = str(ns.bound)
        if cfg.bound not in ("auto", "none"):
            try:
                float(cfg.bound)
            except ValueError:
                errors.append(f"--bound: expected auto, none, or a number: {ns.bound!r}")
    if ns.command == "holder":
        cfg.map_name = ns.map_name
        cfg.alpha = ns.alpha
        cfg.k = ns.k
        cfg.m = ns.m
        cfg.pairs = ns.pairs
        cfg.compact_radius = ns.compact_radius
        cfg.weight = ns.weight
        if ns.pairs < 1:
            errors.append("--pairs: must be >= 1")
        if not (0.0 < ns.compact_radius < 1.0):
            errors.append("--compact-radius: must lie in (0, 1)")
        if ns.map_name == "example3" and not (0.0 < ns.alpha < 2.0):
            errors.append(f"--alpha: must satisfy 0 < alpha < 2, got {ns.alpha}")
        if ns.k is not None and ns.k < 1.0:
            errors.append("--k: truncation level must be >= 1")
        if ns.map_name == "example2" and ns.m < 1.0:
            errors.append("--m: slope parameter must be >= 1")
        try:
            lo, hi = (int(s) for s in ns.scales.split(":"))
            if not (0 < lo < hi):
                raise ValueError
            cfg.scale_range = (lo, hi)
        except ValueError:
            errors.append(f"--scales: expected lo:hi with 0 < lo < hi, got {ns.scales!r}")
        if ns.weight not in ("auto", "none") and ns.weight not in _WEIGHTS:
            errors.append(f"--weight: unknown weight {ns.weight!r}")
    if ns.command == "radial":
        cfg.profile = ns.profile
        cfg.n = ns.n
        cfg.m = ns.m
        cfg.weight = ns.weight
        cfg.alpha = ns.alpha
        cfg.pairs = ns.pairs
        if ns.n < 2:
            errors.append("--n: dimension must be >= 2")
        if ns.profile == "example2" and ns.m < 1.0:
            errors.append("--m: slope parameter must be >= 1")
        if ns.profile == "numeric" and ns.weight not in _WEIGHTS:
            errors.append(f"--weight: unknown weight {ns.weight!r}")
        if ns.pairs < 1:
            errors.append("--pairs: must be >= 1")
    if ns.command == "dilatation":
        cfg.weight = ns.weight
        if ns.k is not None:
            if ns.k < 1.0:
                errors.append("--k: truncation level must be >= 1")
            else:
                cfg.k = float(ns.k)
        if ns.weight not in ("auto", "none") and ns.weight not in _WEIGHTS:
            errors.append(f"--weight: unknown weight {ns.weight!r}")
        radii = ()
        if ns.scan_radii.strip():
            try:
                radii = tuple(float(s) for s in ns.scan_radii.split(","))
            except ValueError:
                errors.append(f"--scan-radii: not a number list: {ns.scan_radii!r}")
        if radii and any(r <= 0 for r in radii):
            errors.append("--scan-radii: radii must be positive")
        cfg.scan_radii = radii
    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
    return cfg


def _provenance(cfg: RunConfig, checks: dict) -> dict:
    import scipy

    return {
        "package": "beltrami-lab",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "config_echo": asdict(cfg),
        "checks_run": sorted(checks),
    }


def _write_summary(cfg: RunConfig, results: dict, checks: dict,
                   error: str | None = None) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, f"{cfg.command}.summary.json")
    doc = {
        "command": cfg.command,
        "results": results,
        "checks": checks,
        "provenance": _provenance(cfg, checks),
    }
    if error is not None:
        doc["error"] = error
    with open(path, "w", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return path


def _mu_from_cfg(cfg: RunConfig) -> MuSpec:
    errs: list[str] = []
    spec = _parse_mu(cfg.mu, cfg.alpha, errs)
    if spec is None:
        raise ConfigError(errs[0])
    if cfg.k is not None:
        spec = truncate_mu(spec, cfg.k)
    return spec


def _solve_cfg(cfg: RunConfig) -> SolveConfig:
    return SolveConfig(
        grid=GridSpec.square(cfg.grid_n, cfg.half_width),
        fix_tol=cfg.fix_tol,
        max_iter=cfg.max_iter,
    )


def _cmd_solve(cfg: RunConfig) -> tuple[dict, dict]:
    spec = _mu_from_cfg(cfg)
    res = solve_principal(spec, _solve_cfg(cfg))
    rep = residual_report(res)
    sup_mu = float(np.max(np.abs(res.mu_field.data)))
    if cfg.residual_tol is not None:
        threshold = cfg.residual_tol
    else:
        k_eff = (1.0 + sup_mu) / (1.0 - sup_mu)
        threshold = max(10.0 * cfg.fix_tol, k_eff * res.f.grid.dx)
    results = {
        "iterations": res.iterations,
        "final_update_l2": res.final_delta,
        "residual_linf": rep.linf,
        "residual_l2": rep.l2,
        "worst_point": [rep.worst_point.real, rep.worst_point.imag],
        "mean_term": [res.mean_term.real, res.mean_term.imag],
        "sup_mu_sampled": sup_mu,
        "solve_seconds": res.solve_seconds,
    }
    checks = {
        "residual_below_tol": {
            "passed": bool(rep.linf <= threshold),
            "value": rep.linf,
            "threshold": threshold,
        }
    }
    if cfg.dump_fields:
        dump_field(res.f, os.path.join(cfg.out_dir, "f.cfld"))
        dump_field(res.mu_field, os.path.join(cfg.out_dir, "mu.cfld"))
    return results, checks


def _cmd_truncate(cfg: RunConfig) -> tuple[dict, dict]:
    spec = _mu_from_cfg(cfg)
    if cfg.bound == "auto":
        bound = math.pi + 2.0 * math.pi / (2.0 - cfg.order_p)
    elif cfg.bound == "none":
        bound = None
    else:
        bound = float(cfg.bound)
    run = truncation_scheme(spec, cfg.k_schedule, cfg.order_p, _solve_cfg(cfg),
                            bound_M=bound)
    rows = []
    for i, (k, res) in enumerate(zip(run.k_schedule, run.per_k)):
        rows.append((
            k,
            res.iterations,
            res.residual_linf_on_disk,
            run.KIp_integrals[i],
            run.bound_ok[i] if run.bound_ok else "",
            run.pairwise_sup_dist[i - 1] if i > 0 else "",
        ))
    os.makedirs(cfg.out_dir, exist_ok=True)
    write_csv(
        os.path.join(cfg.out_dir, "truncate.csv"),
        ("k", "iterations", "residual_linf", "kip_integral", "bound_ok",
         "dist_from_previous"),
        rows,
    )
    results = {
        "k_schedule": list(run.k_schedule),
        "order_p": run.order_p,
        "KIp_integrals": list(run.KIp_integrals),
        "pairwise_sup_dist": list(run.pairwise_sup_dist),
        "bound_M": run.bound_M,
    }
    checks = {}
    if run.bound_ok is not None:
        checks["kip_below_bound"] = {
            "passed": bool(all(run.bound_ok)),
            "value": max(run.KIp_integrals),
            "threshold": run.bound_M,
        }
    return results, checks


def _cmd_holder(cfg: RunConfig) -> tuple[dict, dict]:
    f, branch = named_map(cfg.map_name, alpha=cfg.alpha, k=cfg.k, m=cfg.m)
    lo, hi = cfg.scale_range
    hcfg = HolderConfig(
        compact_radius=cfg.compact_radius,
        r0=1.0 - cfg.compact_radius,
        dyadic_scales=tuple(2.0**-j for j in range(lo, hi + 1)),
        pairs_per_scale=cfg.pairs,
        seed=cfg.seed,
    )
    weight: RadialWeight | None
    if cfg.weight == "auto":
        if cfg.map_name == "example3":
            weight = example3_image_weight(cfg.alpha)
        elif cfg.map_name == "example4":
            weight = example4_image_weight()
        else:
            weight = None
    elif cfg.weight == "none":
        weight = None
    else:
        weight = _WEIGHTS[cfg.weight](cfg)
    rep = holder_scan(f, hcfg, Q=weight, branch_radii=branch)
    os.makedirs(cfg.out_dir, exist_ok=True)
    write_csv(
        os.path.join(cfg.out_dir, "holder.csv"),
        ("scale", "max_product"),
        list(zip(rep.scales, rep.per_scale_max_product)),
    )
    results = {
        "per_scale_max_product": list(rep.per_scale_max_product),
        "empirical_C": rep.empirical_C,
        "q_l1": rep.q_l1,
        "bounded": rep.bounded_flag,
    }
    checks = {
        "products_bounded": {
            "passed": bool(rep.bounded_flag),
            "value": max(rep.per_scale_max_product),
            "threshold": None,
        }
    }
    return results, checks


def _profile_from_cfg(cfg: RunConfig):
    if cfg.profile == "identity":
        return IdentityProfile(cfg.n), unit_weight(cfg.n)
    if cfg.profile == "example2":
        return Example2Profile(cfg.n, cfg.m), power_weight(cfg.n)
    if cfg.profile == "example4-limit":
        return LimitStretchProfile(cfg.n), power_weight(cfg.n)
    weight = _WEIGHTS[cfg.weight](cfg)
    return rho_profile(weight), weight


def _cmd_radial(cfg: RunConfig) -> tuple[dict, dict]:
    prof, weight = _profile_from_cfg(cfg)
    radii = np.linspace(0.01, 1.0, 100)
    rows = []
    for r in radii:
        rows.append((float(r), prof.value(float(r)), prof.derivative(float(r))))
    os.makedirs(cfg.out_dir, exist_ok=True)
    write_csv(os.path.join(cfg.out_dir, "profile.csv"),
              ("r", "rho", "rho_prime"), rows)
    rng = np.random.default_rng(cfg.seed)
    checks_rows = []
    all_hold = True
    # image radii must lie in the map's range, which starts at rho(0+) for
    # profiles that compress the origin; probing rho(0.05) bounds the floor
    # for every profile kind, numeric ones included
    lo_image = min(max(0.05, prof.value(0.05) + 0.02), 0.85)
    for _ in range(cfg.pairs):
        r1 = float(rng.uniform(lo_image, 0.9))
        r2 = float(rng.uniform(r1 + 0.05, 1.0))
        rep = inverse_poletsky_check(prof, weight, r1, r2)
        all_hold &= rep.holds
        checks_rows.append((r1, r2, rep.lhs, rep.rhs, rep.holds))
    write_csv(os.path.join(cfg.out_dir, "poletsky.csv"),
              ("r1", "r2", "lhs", "rhs", "holds"), checks_rows)
    results = {
        "profile": cfg.profile,
        "n": cfg.n,
        "pairs": cfg.pairs,
        "rho_at_half": prof.value(0.5),
    }
    checks = {
        "modulus_inequality": {
            "passed": bool(all_hold),
            "value": cfg.pairs,
            "threshold": None,
        }
    }
    return results, checks


def _cmd_dilatation(cfg: RunConfig) -> tuple[dict, dict]:
    spec = _mu_from_cfg(cfg)
    if cfg.weight == "auto":
        if spec.kind == "example3":
            weight = example3_image_weight(cfg.alpha)
        elif spec.kind == "example4":
            weight = example4_image_weight()
        else:
            weight = None
    elif cfg.weight == "none":
        weight = None
    else:
        weight = _WEIGHTS[cfg.weight](cfg)
    rep = build_dilatation_report(spec, weight,
                                  cfg.scan_radii if cfg.scan_radii else None)
    results = {
        "kind": rep.kind,
        "k_cap": rep.k_cap,
        "k_sup_probe": rep.k_sup_probe,
        "ess_sup_mu": rep.ess_sup_mu,
    }
    if rep.l1 is not None:
        results["l1_value"] = rep.l1.value
        results["l1_divergent"] = rep.l1.divergent
        results["l1_partial"] = rep.l1.partial
    if rep.scan is not None:
        os.makedirs(cfg.out_dir, exist_ok=True)
        write_csv(
            os.path.join(cfg.out_dir, "scan.csv"),
            ("radius", "spherical_mean", "finite"),
            list(zip(rep.scan.radii, rep.scan.means, rep.scan.finite)),
        )
        results["finite_measure_estimate"] = rep.scan.finite_measure_estimate
    return results, {}


def _cmd_report(cfg: RunConfig) -> tuple[dict, dict]:
    merged = {}
    checks = {}
    try:
        names = sorted(os.listdir(cfg.out_dir))
    except OSError as exc:
        raise ConfigError(f"cannot list output directory {cfg.out_dir!r}: {exc}")
    for name in names:
        if not name.endswith(".summary.json") or name == "report.summary.json":
            continue
        with open(os.path.join(cfg.out_dir, name)) as fh:
            doc = json.load(fh)
        merged[doc.get("command", name)] = doc.get("results", {})
        for cname, c in doc.get("checks", {}).items():
            checks[f"{doc.get('command', name)}.{cname}"] = c
    path = os.path.join(cfg.out_dir, "report.json")
    with open(path, "w", newline="") as fh:
        json.dump({"merged": merged, "checks": checks}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"merged_commands": sorted(merged)}, checks


_COMMANDS = {
    "solve": _cmd_solve,
    "truncate": _cmd_truncate,
    "holder": _cmd_holder,
    "radial": _cmd_radial,
    "dilatation": _cmd_dilatation,
    "report": _cmd_report,
}


def _try_write_summary(cfg: RunConfig, error: str) -> None:
    # the summary is best effort on the failure path; the output directory
    # itself may be the thing that is broken
    try:
        _write_summary(cfg, {}, {}, error=error)
    except OSError:
        pass


def run_command(cfg: RunConfig) -> int:
    """Execute a validated config; returns the process exit status and
    always leaves a summary JSON in the output directory."""
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
        results, checks = _COMMANDS[cfg.command](cfg)
    except (ConfigError,) as exc:
        _try_write_summary(cfg, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surfaced in the summary
        _try_write_summary(cfg, error=f"{type(exc).__name__}: {exc}")
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    path = _write_summary(cfg, results, checks)
    failed = [name for name, c in checks.items() if not c.get("passed", True)]
    for name, c in sorted(checks.items()):
        status = "PASS" if c.get("passed", True) else "FAIL"
        print(f"{status} {name}: value={c.get('value')} threshold={c.get('threshold')}")
    print(f"summary: {path}")
    return 1 if failed else 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
