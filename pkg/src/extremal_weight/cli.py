"""Command line: build, verify and measure extremal weights.

Every global flag can also come from an environment variable named
``EXTREMAL_WEIGHT_<FLAG>`` (for example ``EXTREMAL_WEIGHT_K=3``); flags on
the command line win.  Exit codes: 0 pass, 1 a check failed, 2 bad config.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
from dataclasses import dataclass

from gmpy2 import mpq

from . import __version__
from .checks import run_checks
from .norms.hilbest import hilbest_report
from .norms.quadrature import QuadratureError, hilbert_l2sigma
from .norms.sawyer import random_triadic_pair, sawyer_verify
from .norms.testing import MAX_SCALE_FLOOR, testing_constant
from .ops.hilbert import HilbertEvaluator
from .validation import check_digits, check_k, check_nu, check_positive, check_window
from .weightlab import ConstructedWeight, build_weight, derive_params, piece_count

__all__ = ["RunConfig", "main", "build_parser", "ENV_PREFIX"]

ENV_PREFIX = "EXTREMAL_WEIGHT_"
MAX_PIECES = 200_000
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("extremal_weight")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    k: int | None = 2
    t: str | None = None
    nu: int | None = None
    precision: int = 50
    tol: float = 1e-8
    window: int = 3
    scale_floor: int | None = None
    threads: int = 1
    seed: int = 0
    out: str | None = None

    def params(self):
        k = check_k(self.k) if self.t is None else None
        return derive_params(k=k, t=self.t, nu=check_nu(self.nu, k))


# flag name -> (type, default)
GLOBAL_FLAGS = {
    "k": (int, None),
    "t": (str, None),
    "nu": (int, None),
    "precision": (int, 50),
    "tol": (float, 1e-8),
    "window": (int, 3),
    "scale_floor": (int, None),
    "threads": (int, 1),
    "seed": (int, 0),
    "out": (str, None),
}


def _env_default(name: str, kind, default):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None or raw == "":
        return default
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{ENV_PREFIX}{name.upper()}={raw!r} is not a valid {kind.__name__}") from None


def _global_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    for name, (kind, default) in GLOBAL_FLAGS.items():
        flag = "--" + name.replace("_", "-")
        g.add_argument(flag, dest=name, type=kind, default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_parser()
    parser = argparse.ArgumentParser(
        prog="extremal-weight",
        description="Build and verify the extremal A2 weight and its norm estimates.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("params", parents=[common], help="print derived parameters")
    sub.add_parser("build", parents=[common], help="write the weight as JSON")
    v = sub.add_parser("verify", parents=[common], help="run every named check")
    v.add_argument("--weight", help="weight JSON produced by build")
    v.add_argument("--sawyer-instances", type=int, default=100)
    sub.add_parser("norms", parents=[common], help="testing bracket, Hilbert norm and tail bounds")
    s = sub.add_parser("scaling", parents=[common], help="CSV sweep over k and nu")
    s.add_argument("--ks", default="2,3", help="comma separated k values")
    s.add_argument("--nus", default=None, help="comma separated nu values (default: full depth)")
    h = sub.add_parser("hilbert-profile", parents=[common], help="CSV of H(w chi_[0,1)) on a grid")
    h.add_argument("--points", type=int, default=486)
    d = sub.add_parser("sawyer-demo", parents=[common], help="stopping-time checks on random instances")
    d.add_argument("--instances", type=int, default=100)
    d.add_argument("--a", type=int, default=2)
    d.add_argument("--depth", type=int, default=3)
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    values = {}
    for name, (kind, default) in GLOBAL_FLAGS.items():
        values[name] = getattr(ns, name) if hasattr(ns, name) else _env_default(name, kind, default)
    if values["k"] is None and values["t"] is None:
        values["k"] = 2
    if values["k"] is not None and values["t"] is not None:
        raise ConfigError("give either --k or --t, not both")
    try:
        if values["k"] is not None:
            check_k(values["k"])
        check_nu(values["nu"], values["k"])
        check_digits(values["precision"])
        check_positive("tol", values["tol"])
        check_window(values["window"])
        if values["scale_floor"] is not None and not 1 <= values["scale_floor"] <= MAX_SCALE_FLOOR:
            raise ValueError(f"scale-floor must lie in [1, {MAX_SCALE_FLOOR}]")
        if values["threads"] < 1:
            raise ValueError("threads must be >= 1")
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return RunConfig(**values)


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _weight(cfg: RunConfig) -> ConstructedWeight:
    try:
        params = cfg.params()
        if piece_count(params.k, params.nu) > MAX_PIECES:
            raise ValueError(f"nu={params.nu} is infeasible for k={params.k}: more than {MAX_PIECES} pieces")
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return build_weight(params)


def _params_json(cw_or_params) -> dict:
    params = getattr(cw_or_params, "params", cw_or_params)
    out = params.to_json()
    out["pieces"] = piece_count(params.k, params.nu)
    out["truncation_factor"] = str(params.truncation_factor())
    return out


def cmd_params(cfg: RunConfig, ns) -> int:
    try:
        params = cfg.params()
    except ValueError as err:
        raise ConfigError(str(err)) from None
    _emit(cfg, _dump(_params_json(params)))
    return EXIT_PASS


def cmd_build(cfg: RunConfig, ns) -> int:
    cw = _weight(cfg)
    _emit(cfg, json.dumps(cw.to_json(), sort_keys=True) + "\n")
    return EXIT_PASS


def cmd_verify(cfg: RunConfig, ns) -> int:
    if ns.weight:
        try:
            with open(ns.weight) as fh:
                cw = ConstructedWeight.from_json(json.load(fh))
        except (OSError, ValueError, KeyError) as err:
            raise ConfigError(f"cannot load weight: {err}") from None
    else:
        cw = _weight(cfg)
    report = run_checks(
        cw,
        window=cfg.window,
        digits=cfg.precision,
        seed=cfg.seed,
        scale_floor=cfg.scale_floor,
        sawyer_instances=ns.sawyer_instances,
    )
    _emit(cfg, _dump(report.to_json()))
    for c in report.checks:
        log.info("%-20s %s (%.2fs)", c.name, "pass" if c.status else "FAIL", c.seconds)
    return EXIT_PASS if report.passes else EXIT_FAIL


def _hilbert_norm(cw, tol):
    try:
        return hilbert_l2sigma(cw, tol)
    except QuadratureError as err:
        log.warning("quadrature: %s", err)
        return None


def cmd_norms(cfg: RunConfig, ns) -> int:
    cw = _weight(cfg)
    testing = testing_constant(cw, scale_floor=cfg.scale_floor, window=cfg.window)
    quad = _hilbert_norm(cw, cfg.tol)
    hil = hilbest_report(cw, digits=cfg.precision)
    out = {
        "params": _params_json(cw),
        "testing": testing.to_json(),
        "m_bracket": [testing.m_lower, testing.m_upper],
        "h_l2sigma": None if quad is None else quad.to_json(),
        "hilbest": hil.to_json(),
    }
    _emit(cfg, _dump(out))
    ok = testing.passes and hil.passes and quad is not None
    return EXIT_PASS if ok else EXIT_FAIL


def _int_list(text: str, name: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--{name} must be comma separated integers") from None


SCALING_COLUMNS = (
    "k",
    "nu",
    "p",
    "testing_sup",
    "m_upper",
    "h_l2sigma",
    "ratio_h_over_m",
    "min_abs_H_over_2l",
    "truncation_factor",
)


def scaling_row(k: int, nu: int, cfg: RunConfig) -> dict:
    params = derive_params(k=k, nu=nu)
    cw = build_weight(params)
    testing = testing_constant(cw, scale_floor=cfg.scale_floor, window=cfg.window)
    row = {
        "k": k,
        "nu": nu,
        "p": str(params.p),
        "testing_sup": repr(float(testing.sup)),
        "m_upper": repr(testing.m_upper),
        "h_l2sigma": "",
        "ratio_h_over_m": "",
        "min_abs_H_over_2l": "",
        "truncation_factor": str(params.truncation_factor()),
    }
    if nu >= 1:
        quad = _hilbert_norm(cw, cfg.tol)
        hil = hilbest_report(cw, digits=cfg.precision)
        if quad is not None:
            row["h_l2sigma"] = repr(quad.value)
            row["ratio_h_over_m"] = repr(quad.value / testing.m_upper)
        row["min_abs_H_over_2l"] = ";".join(f"{lv.min_abs_H / lv.scale:.6g}" for lv in hil.levels)
    return row


def cmd_scaling(cfg: RunConfig, ns) -> int:
    ks = _int_list(ns.ks, "ks")
    nus = None if ns.nus is None else _int_list(ns.nus, "nus")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SCALING_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for k in ks:
        for nu in nus if nus is not None else [3 ** (k - 1)]:
            if k < 2 or nu < 0:
                log.warning("skipping k=%d nu=%d: invalid parameters", k, nu)
                continue
            if piece_count(k, nu) > MAX_PIECES:
                log.warning("skipping k=%d nu=%d: more than %d pieces", k, nu, MAX_PIECES)
                continue
            if nu > 3 ** (k - 1):
                log.warning("skipping k=%d nu=%d: depth beyond n", k, nu)
                continue
            writer.writerow(scaling_row(k, nu, cfg))
    _emit(cfg, buf.getvalue())
    return EXIT_PASS


def cmd_hilbert_profile(cfg: RunConfig, ns) -> int:
    if ns.points < 2 or ns.points % 2:
        raise ConfigError("--points must be even so that grid midpoints avoid every breakpoint")
    cw = _weight(cfg)
    ev = HilbertEvaluator(cw.w, cfg.precision)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "value", "error_bound", "region_tag", "level"])
    # midpoints of an even grid never meet a breakpoint
    for i in range(ns.points):
        x = mpq(2 * i + 1, 2 * ns.points)
        v = ev.at(x)
        tag = cw.tags[cw.w.piece_index(x)]
        writer.writerow([repr(float(x)), repr(v.value), repr(v.error), tag.kind, tag.level])
    _emit(cfg, buf.getvalue())
    return EXIT_PASS


def cmd_sawyer_demo(cfg: RunConfig, ns) -> int:
    if ns.a < 2:
        raise ConfigError("--a must exceed 1")
    if ns.instances < 1 or ns.depth < 1:
        raise ConfigError("--instances and --depth must be >= 1")
    rng = random.Random(cfg.seed)
    runs = []
    for _ in range(ns.instances):
        f, w = random_triadic_pair(rng, depth=ns.depth)
        runs.append(sawyer_verify(f, w, ns.a).to_json())
    out = {
        "seed": cfg.seed,
        "a": ns.a,
        "instances": ns.instances,
        "passes": all(r["passes"] for r in runs),
        "max_packing_ratio": max((r["worst_packing_ratio"] or 0.0) for r in runs),
        "first": runs[0],
    }
    _emit(cfg, _dump(out))
    return EXIT_PASS if out["passes"] else EXIT_FAIL


COMMANDS = {
    "params": cmd_params,
    "build": cmd_build,
    "verify": cmd_verify,
    "norms": cmd_norms,
    "scaling": cmd_scaling,
    "hilbert-profile": cmd_hilbert_profile,
    "sawyer-demo": cmd_sawyer_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(ns)
        return COMMANDS[ns.command](cfg, ns)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
