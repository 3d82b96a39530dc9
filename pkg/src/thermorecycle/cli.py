"""Command-line front end.

    thermorecycle <command> [--config FILE] [--out FILE] [--format csv|json]
                            [--seed N] [--parallel N]

Commands: bounds, sweep-theta, sweep-px, fidelity, latency-fit, bath-sweep.
The config file holds flat ``key = value`` lines; ``#`` starts a comment.
Exit status is 0 on success, 2 on a config error and 3 when every result row
is infeasible.
"""
import argparse
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__, latency, protocol, units
from .bath import INFEASIBLE, AthermalSummary, erasure_bounds
from .errors import ConfigError, InfeasibleError, InsufficientDataError, ThermoRecycleError
from .hhl import HhlParams

COMMANDS = ("bounds", "sweep-theta", "sweep-px", "fidelity", "latency-fit", "bath-sweep")
EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 2, 3

COLUMNS = (
    "theta_b", "p_x", "trial", "p_fail", "dS_nats", "dQ_kBT0", "qL_kBT0",
    "qtight_kBT0_or_INF", "qath_kBT0", "gain_kBT0_or_INF", "fidelity", "flags",
)
LATENCY_COLUMNS = ("slope_s", "intercept_s", "per_op_s", "r_squared", "n_points", "unphysical")


def _floats(text):
    return [_float(v) for v in text.split(",") if v.strip()]


_PI_RE = re.compile(r"^(?P<num>[+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?$")


def _float(text):
    """A float, or a multiple of pi such as ``pi/4`` or ``3*pi/16``."""
    text = text.strip()
    m = _PI_RE.match(text)
    if m:
        num = m.group("num")
        num = float(num) if num not in (None, "", "+", "-") else (-1.0 if num == "-" else 1.0)
        return num * math.pi / float(m.group("den") or 1)
    return float(text)


def _switch(text):
    v = text.strip().lower()
    if v not in ("on", "off"):
        raise ValueError(f"expected on or off, got {text!r}")
    return v == "on"


def _choice(*options):
    def parse(text):
        v = text.strip().lower()
        if v not in options:
            raise ValueError(f"expected one of {'|'.join(options)}, got {text!r}")
        return v
    return parse


def _units(text):
    v = text.strip()
    if v not in ("kBT0", "zJ"):
        raise ValueError(f"expected kBT0 or zJ, got {text!r}")
    return v


def _natural(text):
    v = int(text)
    if v < 0:
        raise ValueError("must be non-negative")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise ValueError("must be at least 1")
    return v


# key -> (parser, default)
CONFIG_KEYS = {
    "theta_b_list": (_floats, [i * math.pi / 32 for i in range(9)]),
    "px_list": (_floats, [0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5]),
    "px": (_float, 0.4),
    "bath_freq_ghz": (_float, 5.0),
    "bath_t0_mk": (_float, 43.0),
    "t1_us": (_float, 397.0),
    "latency_us": (_float, 3.3),
    "algo_us": (_float, 4.0),
    "p1": (_float, 1e-4),
    "p2": (_float, 5e-3),
    "angle_mode": (_choice("exact", "simplified"), "simplified"),
    "rotation_c": (_float, 1.0),
    "noise": (_switch, True),
    "shots": (_natural, 8000),
    "trials": (_positive, 5),
    "success_outcome": (lambda t: int(t), 1),
    # bounds
    "delta_s": (_floats, [0.5]),
    "e_ath": (_float, None),
    "s_ath": (_float, None),
    # bath-sweep
    "bath_freq_list": (_floats, [3.0, 4.0, 5.0, 6.0, 7.0]),
    # latency-fit
    "latency_csv": (str.strip, None),
    "n_shots": (_positive, 10_000),
    "n_circ": (_positive, 10),
    "n_min": (_natural, latency.GATE_N_MIN),
    "units": (_units, "kBT0"),
}


def parse_config(text):
    """Parse ``key = value`` lines into a dict of typed values with defaults filled."""
    cfg = {k: default for k, (_, default) in CONFIG_KEYS.items()}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value", line=lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: missing key", line=lineno)
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", line=lineno, key=key)
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", line=lineno, key=key)
        seen.add(key)
        try:
            cfg[key] = CONFIG_KEYS[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}", line=lineno, key=key) from None
    if (cfg["e_ath"] is None) != (cfg["s_ath"] is None):
        raise ConfigError("e_ath and s_ath must be given together", key="e_ath")
    return cfg


def load_config(path):
    if path is None:
        return parse_config("")
    with open(path) as fh:
        return parse_config(fh.read())


def protocol_template(cfg, seed):
    try:
        noise = protocol.NoiseModel(
            enabled=cfg["noise"],
            t1=cfg["t1_us"],
            latency_ff=cfg["latency_us"],
            duration_algo=cfg["algo_us"],
            p1=cfg["p1"],
            p2=cfg["p2"],
        )
        return protocol.ProtocolConfig(
            theta_b=cfg["theta_b_list"][0] if cfg["theta_b_list"] else 0.0,
            p_x=cfg["px"],
            bath=protocol.default_bath(cfg["bath_freq_ghz"], cfg["bath_t0_mk"]),
            hhl=HhlParams(
                C=cfg["rotation_c"],
                angle_mode=cfg["angle_mode"],
                success_outcome=cfg["success_outcome"],
            ),
            noise=noise,
            seed=seed,
            shots_per_basis=cfg["shots"],
            trials=cfg["trials"],
        )
    except ThermoRecycleError as exc:
        raise ConfigError(str(exc)) from None


# --- formatting ---


def fmt(value):
    if value is None:
        return ""
    if value is INFEASIBLE or (isinstance(value, float) and math.isinf(value)):
        return "INF"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    text = f"{float(value):.9g}"
    return "0" if text == "-0" else text


def json_value(value):
    text = fmt(value)
    if value is None:
        return None
    if text == "INF" or isinstance(value, str):
        return text
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(text)


class HeatScale:
    """Converts energies in gap units to the output unit."""

    def __init__(self, spec, freq_ghz, unit):
        self.unit = unit
        self.factor = units.to_zeptojoules(1.0, freq_ghz) if unit == "zJ" else 1.0 / spec.T0

    def __call__(self, v):
        if v is None or v is INFEASIBLE:
            return v
        return v * self.factor

    def rename(self, column):
        return column.replace("kBT0", "zJ") if self.unit == "zJ" else column


def result_record(res, scale, trial):
    b = res.bounds
    return {
        "theta_b": res.theta_b,
        "p_x": res.p_x,
        "trial": trial,
        "p_fail": res.p_fail,
        "dS_nats": res.delta_S,
        "dQ_kBT0": scale(res.delta_Q),
        "qL_kBT0": None if b is None else scale(b.q_landauer),
        "qtight_kBT0_or_INF": None if b is None else scale(b.q_tight),
        "qath_kBT0": None if b is None else scale(b.q_ath),
        "gain_kBT0_or_INF": None if b is None else scale(b.gain),
        "fidelity": res.fidelity_success,
        "flags": ";".join(sorted(res.flags)),
    }


def median_record(med, scale):
    m = med.metrics

    def heat(name):
        v = m.get(name)
        if v is not None and math.isinf(v):
            return INFEASIBLE
        return scale(v)

    return {
        "theta_b": med.theta_b,
        "p_x": med.p_x,
        "trial": "median",
        "p_fail": m["p_fail"],
        "dS_nats": m["delta_S"],
        "dQ_kBT0": heat("delta_Q"),
        "qL_kBT0": heat("q_landauer"),
        "qtight_kBT0_or_INF": heat("q_tight"),
        "qath_kBT0": heat("q_ath"),
        "gain_kBT0_or_INF": heat("gain"),
        "fidelity": m["fidelity_success"],
        "flags": "",
    }


def row_infeasible(rec):
    bound_keys = ("qtight_kBT0_or_INF", "qath_kBT0")
    return all(rec.get(k) is None or rec.get(k) is INFEASIBLE for k in bound_keys)


# --- commands ---


def cmd_bounds(cfg, args):
    spec = protocol.default_bath(cfg["bath_freq_ghz"], cfg["bath_t0_mk"])
    scale = HeatScale(spec, cfg["bath_freq_ghz"], cfg["units"])
    athermal = None
    if cfg["e_ath"] is not None:
        try:
            athermal = AthermalSummary(cfg["e_ath"], cfg["s_ath"]).validate(spec)
        except ThermoRecycleError as exc:
            raise ConfigError(str(exc), key="e_ath") from None
    records = []
    for ds in cfg["delta_s"]:
        rec = dict.fromkeys(COLUMNS)
        rec.update(trial=None, dS_nats=ds, flags="")
        try:
            b = erasure_bounds(spec, ds, athermal)
        except InfeasibleError:
            rec.update(qL_kBT0=scale(spec.T0 * ds), qtight_kBT0_or_INF=INFEASIBLE,
                       qath_kBT0=INFEASIBLE, gain_kBT0_or_INF=INFEASIBLE, flags="bound_infeasible")
        else:
            rec.update(qL_kBT0=scale(b.q_landauer), qtight_kBT0_or_INF=scale(b.q_tight),
                       qath_kBT0=scale(b.q_ath), gain_kBT0_or_INF=scale(b.gain))
            if b.q_tight is INFEASIBLE:
                rec["flags"] = "tight_infeasible"
        records.append(rec)
    return list(COLUMNS), records, scale


def _sweep_records(table, scale, extra=None):
    records = []
    for med in table.medians:
        for row in (r for r in table.rows if r.value_index == med.value_index):
            rec = result_record(row.result, scale, row.trial)
            if extra:
                rec[extra] = row.value
            records.append(rec)
        rec = median_record(med, scale)
        if extra:
            rec[extra] = med.value
        records.append(rec)
    return records


def _run_sweep(cfg, args, axis, values, runner=None, extra=None):
    template = protocol_template(cfg, args.seed)
    try:
        table = protocol.sweep(template, axis, values, runner=runner, workers=args.parallel,
                               t0_mk=cfg["bath_t0_mk"])
    except ThermoRecycleError as exc:
        raise ConfigError(str(exc)) from None
    scale = HeatScale(template.bath, cfg["bath_freq_ghz"], cfg["units"])
    columns = list(COLUMNS) + ([extra] if extra else [])
    return columns, _sweep_records(table, scale, extra), scale


def cmd_sweep_theta(cfg, args):
    return _run_sweep(cfg, args, protocol.Axis.THETA_B, cfg["theta_b_list"])


def cmd_sweep_px(cfg, args):
    return _run_sweep(cfg, args, protocol.Axis.P_X, cfg["px_list"])


def cmd_fidelity(cfg, args):
    return _run_sweep(cfg, args, protocol.Axis.THETA_B, cfg["theta_b_list"], runner=protocol.run_reference)


def cmd_bath_sweep(cfg, args):
    return _run_sweep(cfg, args, protocol.Axis.BATH_FREQ, cfg["bath_freq_list"], extra="bath_freq_ghz")


def cmd_latency_fit(cfg, args):
    path = cfg["latency_csv"]
    if not path:
        raise ConfigError("latency-fit needs latency_csv", key="latency_csv")
    if not os.path.isabs(path) and args.config:
        path = os.path.join(os.path.dirname(os.path.abspath(args.config)), path)
    try:
        data = latency.read_csv(path, cfg["n_shots"], cfg["n_circ"], cfg["n_min"])
        fit = latency.fit_gate_time(data)
    except (ThermoRecycleError, OSError) as exc:
        raise ConfigError(str(exc), key="latency_csv") from None
    rec = {
        "slope_s": fit.slope,
        "intercept_s": fit.intercept,
        "per_op_s": fit.per_op,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
        "unphysical": fit.unphysical,
    }
    return list(LATENCY_COLUMNS), [rec], None


HANDLERS = {
    "bounds": cmd_bounds,
    "sweep-theta": cmd_sweep_theta,
    "sweep-px": cmd_sweep_px,
    "fidelity": cmd_fidelity,
    "latency-fit": cmd_latency_fit,
    "bath-sweep": cmd_bath_sweep,
}


def render_csv(columns, records, scale):
    header = [scale.rename(c) if scale else c for c in columns]
    lines = [",".join(header)]
    for rec in records:
        lines.append(",".join(fmt(rec.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def render_json(command, cfg, seed, columns, records, scale):
    doc = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": {k: cfg[k] for k in sorted(cfg)},
        "columns": [scale.rename(c) if scale else c for c in columns],
        "rows": [
            {(scale.rename(c) if scale else c): json_value(rec.get(c)) for c in columns}
            for rec in records
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def build_parser():
    p = argparse.ArgumentParser(prog="thermorecycle", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--parallel", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    if args.parallel < 1:
        print("error: --parallel must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        columns, records, scale = HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.format == "csv":
        text = render_csv(columns, records, scale)
    else:
        text = render_json(args.command, cfg, args.seed, columns, records, scale)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.command != "latency-fit" and records and all(row_infeasible(r) for r in records):
        print("all results infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
