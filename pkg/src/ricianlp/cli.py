"""Command-line entry point ``ricianlp``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 verification failure.
"""
import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .asymptotics import SCHEMES, mi_derivatives, scheme_closed_form, scheme_input, summarize
from .capacity import (
    STATUS_OK,
    CurvePoint,
    find_min_bit_energy,
    sweep_curve,
    sweep_scheme,
    two_mass_threshold,
)
from .config import RunConfig
from .errors import ConfigError, InsufficientDataError, InvalidParameterError, RicianError
from .mutual_info import mutual_information
from .signaling import Regime
from .verify import FAULTS, run_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

log = logging.getLogger("ricianlp")


class VerificationFailed(Exception):
    pass


# --- formatting and output ----------------------------------------------


def fmt(x) -> str:
    """Locale-independent rendering with 12 significant digits."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "nan"
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.12g" % x


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def atomic_write(path: str, text: str):
    """Write to a temporary file in the target directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    def clean(v):
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        if isinstance(v, (float, np.floating)):
            return fmt(v) if not math.isfinite(v) else float(v)
        if isinstance(v, np.integer):
            return int(v)
        return v

    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def _stem(cfg: RunConfig, kind: str) -> str:
    ch = cfg.channel
    chan = f"m{fmt(ch.m_real)}{fmt(ch.m_imag)}j" if ch.m_real is not None else f"K{fmt(ch.rician_k)}"
    regime = cfg.regime()
    if kind == "signal" or cfg.signal_mode:
        p, nu = _scheme_args(cfg)
        tail = f"nu{fmt(nu)}" if p is None else f"p{fmt(p)}"
        return f"{kind}-{cfg.signal.scheme}-{chan}-{tail}"
    if regime in (Regime.FOURTH_MOMENT, Regime.PEAK_TO_AVERAGE):
        return f"{kind}-{regime.value}-{chan}-kappa{fmt(cfg.constraint.kappa)}"
    if regime is Regime.FIXED_PEAK:
        return f"{kind}-{regime.value}-{chan}-nu{fmt(cfg.constraint.nu)}"
    return f"{kind}-{regime.value}-{chan}"


def _scheme_args(cfg: RunConfig):
    """``(p, nu)`` for the configured scheme; ``p`` defaults to ``1/kappa``."""
    s = cfg.signal
    if s.scheme not in SCHEMES:
        raise ConfigError(f"[signal] scheme must be one of {', '.join(SCHEMES)}, got {s.scheme!r}")
    if s.scheme == "ook-fixed-peak":
        return None, cfg.constraint.nu
    p = s.p if s.p is not None else 1.0 / cfg.constraint.kappa
    if not 0 < p <= 1:
        raise ConfigError(f"[signal] p must lie in (0, 1], got {p}")
    return p, None


# --- subcommands ----------------------------------------------------------


def cmd_asymptotics(cfg: RunConfig, out=None) -> dict:
    out = out or sys.stdout
    ch = cfg.channel_params()
    s = summarize(ch, cfg.regime(), kappa=cfg.constraint.kappa, nu=cfg.constraint.nu)
    row = s.as_row()
    width = max(len(k) for k in row)
    for k, v in row.items():
        print(f"{k:<{width}}  {fmt(v)}", file=out)
    if s.note:
        print(f"note: {s.note}", file=out)
    path = os.path.join(cfg.run.out, _stem(cfg, "asymptotics") + ".csv")
    atomic_write(path, render_csv(list(row), [list(row.values())]))
    log.info("wrote %s", path)
    return row


def cmd_curve(cfg: RunConfig, out=None):
    out = out or sys.stdout
    ch = cfg.channel_params()
    grid = cfg.snr_grid()
    meta = {
        "version": __version__,
        "config_sha256": cfg.digest(),
        "seed": cfg.run.seed,
        "config": cfg.as_dict(),
    }
    # the output directory is not part of the experiment
    del meta["config"]["run"]["out"]
    if cfg.signal_mode:
        p, nu = _scheme_args(cfg)
        spec = cfg.quadrature_spec()
        curve = sweep_scheme(ch, lambda p_av: scheme_input(cfg.signal.scheme, p_av, p, nu), grid, spec)
        meta.update(scheme=cfg.signal.scheme, p=p, nu=nu)
    else:
        c = cfg.constraint_set()
        opt = cfg.optimizer_config()

        def progress(k, snr):
            log.info("point %d/%d snr=%s", k + 1, len(grid), fmt(snr))

        curve = sweep_curve(ch, c, grid, opt, progress)
        kappa = cfg.constraint.kappa if c.regime in (Regime.FOURTH_MOMENT, Regime.PEAK_TO_AVERAGE) else None
        meta["two_mass_threshold_snr"] = two_mass_threshold(curve, kappa)
        meta["certified_fraction"] = sum(p.status == STATUS_OK for p in curve) / len(curve)
        meta["kt_max_violation"] = [p.kt.max_violation if p.kt else math.nan for p in curve]
        meta["distributions"] = [p.distribution.to_text() if p.distribution else "" for p in curve]
    try:
        mb = find_min_bit_energy(curve)
        meta["min_bit_energy"] = {"ebn0_rx_db": mb.ebn0_min_db, "spectral_eff_bits": mb.c_star_bits, "interior": mb.interior}
    except InsufficientDataError:
        meta["min_bit_energy"] = None
    rows = [[getattr(p, f) for f in CurvePoint.CSV_FIELDS] for p in curve]
    text = render_csv(CurvePoint.CSV_FIELDS, rows)
    stem = _stem(cfg, "curve")
    path = os.path.join(cfg.run.out, stem + ".csv")
    atomic_write(path, text)
    atomic_write(os.path.join(cfg.run.out, stem + ".json"), _json(meta))
    print(f"wrote {path} ({len(curve)} points)", file=out)
    if all(not math.isfinite(p.capacity_nats) for p in curve):
        raise RicianError("every grid point failed")
    return curve


def cmd_signal_eval(cfg: RunConfig, out=None):
    out = out or sys.stdout
    ch = cfg.channel_params()
    spec = cfg.quadrature_spec()
    scheme = cfg.signal.scheme
    p, nu = _scheme_args(cfg)
    grid = cfg.snr_grid()
    rows = []
    for snr in grid:
        mi = mutual_information(scheme_input(scheme, snr * ch.n0, p, nu), ch, spec).value
        rows.append([snr, mi, mi / snr])
    est = mi_derivatives(scheme, ch, p=p, nu=nu, h=cfg.signal.step, spec=spec)
    exact = scheme_closed_form(scheme, ch, p=p, nu=nu)

    def rel(num, ref):
        if not math.isfinite(ref):
            return math.nan
        return abs(num - ref) / abs(ref) if ref != 0 else abs(num)

    table = [
        ("I'(0)", est.d1, exact[0], rel(est.d1, exact[0])),
        ("I''(0)", est.d2, exact[1], rel(est.d2, exact[1])),
    ]
    print(f"scheme={scheme} p={fmt(p)} nu={fmt(nu)}", file=out)
    print(f"{'quantity':<8} {'numeric':>20} {'closed_form':>20} {'rel_error':>12}", file=out)
    for name, a, b, r in table:
        print(f"{name:<8} {fmt(a):>20} {fmt(b):>20} {fmt(r):>12}", file=out)
    stem = _stem(cfg, "signal")
    atomic_write(os.path.join(cfg.run.out, stem + ".csv"), render_csv(("snr", "mi_nats", "mi_per_snr"), rows))
    atomic_write(
        os.path.join(cfg.run.out, stem + "-derivatives.csv"),
        render_csv(("quantity", "numeric", "closed_form", "rel_error"), table),
    )
    return table


def cmd_verify(cfg: RunConfig, tolerance_scale=1.0, fault=None, out=None):
    out = out or sys.stdout
    def show(r):
        mark = "PASS" if r.passed else ("FAIL (tolerance-induced)" if r.tolerance_induced else "FAIL")
        print(f"{mark:<25} {r.name:<16} error={fmt(r.error)} tol={fmt(r.tolerance)}  {r.detail}", file=out)

    report = run_suite(tolerance_scale=tolerance_scale, fault=fault, progress=show)
    path = os.path.join(cfg.run.out, "verify.json")
    atomic_write(path, _json(report.as_dict()))
    print(f"{'all checks passed' if report.passed else 'verification FAILED'}; report in {path}", file=out)
    if not report.passed:
        raise VerificationFailed()
    return report


# --- argument handling --------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--snr-min", type=float)
    common.add_argument("--snr-max", type=float)
    common.add_argument("--points-per-decade", type=int)
    common.add_argument("--regime", choices=[r.value for r in Regime])
    common.add_argument("--kappa", type=float)
    common.add_argument("--nu", type=float, help="fixed peak power")
    common.add_argument("--rician-k", type=float, help="Rician factor (normalized channel)")
    common.add_argument("--scheme", choices=SCHEMES)
    common.add_argument("--p", type=float, help="on-probability of the scheme")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ricianlp", description="Capacity and low-SNR figures of merit for Rician fading without channel state information.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("asymptotics", parents=[common], help="closed-form low-SNR figures of merit")
    sub.add_parser("curve", parents=[common], help="capacity (or --scheme) curve as CSV")
    sub.add_parser("signal-eval", parents=[common], help="scheme MI and derivative check")
    v = sub.add_parser("verify", parents=[common], help="identity suite")
    v.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    v.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    return parser


_FLAG_KEYS = {
    "out": ("run", "out"),
    "seed": ("run", "seed"),
    "snr_min": ("grid", "snr_min"),
    "snr_max": ("grid", "snr_max"),
    "points_per_decade": ("grid", "points_per_decade"),
    "regime": ("constraint", "regime"),
    "kappa": ("constraint", "kappa"),
    "nu": ("constraint", "nu"),
    "rician_k": ("channel", "rician_k"),
    "scheme": ("signal", "scheme"),
    "p": ("signal", "p"),
}


def config_from_args(args, env=None) -> RunConfig:
    cfg = RunConfig.load(args.config, env)
    for attr, (section, key) in _FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            cfg.set_value(section, key, str(value), where=f"--{attr.replace('_', '-')}")
    if args.rician_k is not None:
        cfg.channel.m_real = None
    # a scheme on the command line turns ``curve`` into a scheme sweep
    cfg.signal_mode = args.scheme is not None
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "asymptotics":
            cmd_asymptotics(cfg)
        elif args.command == "curve":
            cmd_curve(cfg)
        elif args.command == "signal-eval":
            cmd_signal_eval(cfg)
        else:
            cmd_verify(cfg, args.tolerance_scale, args.inject_fault)
    except (ConfigError, InvalidParameterError) as exc:
        # a parameter rejected downstream still came from the configuration
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationFailed:
        return EXIT_VERIFY
    except (RicianError, ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
