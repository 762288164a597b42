"""Command-line front end.

Every command resolves a single JSON run configuration (``--config`` file,
overridden by flags), writes it back as ``run_config.json`` next to its
outputs, and stamps each output with the tool version and a hash of that
configuration. Exit codes: 0 success, 2 invalid config, 3 infeasible
steering, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from typing import Any

import numpy as np

from . import __version__
from .analysis import (DEFAULT_GRID_STEP_DEG, array_factor, comb_harmonics, compare_waveforms,
                       gain_report, theta_grid)
from .architecture import (ArchitectureConfig, ChannelControls, Kind, beam_map, phase_profile,
                           required_bandwidths, to_db, validate_bandwidth)
from .dof import SteeringProblem, solve_steering, verify_steering
from .errors import InvalidParameter, SteeringInfeasible
from .sim import SimParams, Source, measure_gains, simulate_rx
from .waveform import (HarmonicWaveform, eval_time, make_comb, make_square, normalize_power,
                       total_power)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

TOOL = "sharray"

DEFAULT_ARCH = {
    "kind": "hma",
    "n_channels": 4,
    "spacing_d": 0.5,
    "f_rf_hz": 28e9,
    "f_bw_hz": 0.0,
    "f_tr_hz": 0.0,
}
DEFAULT_F_HM = 1e9

# options whose values may legitimately start with "-" (e.g. "-2..2")
_DASH_VALUE_OPTS = {"--harmonics", "--select", "--used", "--targets", "--k-range", "--sources"}


class ConfigError(InvalidParameter):
    pass


# ---------------------------------------------------------------- parsing

def parse_int_set(text: str) -> list[int]:
    """Parse ``"-2..2"``, ``"0,1,3"`` or a mix such as ``"-3..-1,5"``."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo_i, hi_i = int(lo), int(hi)
                if hi_i < lo_i:
                    raise ConfigError(f"empty range {part!r}")
                out.extend(range(lo_i, hi_i + 1))
            else:
                out.append(int(part))
        except ValueError as exc:
            raise ConfigError(f"cannot parse integer set {text!r}") from exc
    if not out:
        raise ConfigError(f"empty integer set {text!r}")
    return out


def parse_targets(text: str) -> list[dict]:
    targets = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            m, th = part.split(":")
            targets.append({"m": int(m), "theta_deg": float(th)})
        except ValueError as exc:
            raise ConfigError(f"target {part!r} is not of the form m:theta_deg") from exc
    return targets


def parse_sources(text: str) -> list[dict]:
    sources = []
    for part in str(text).split(";"):
        part = part.strip()
        if not part:
            continue
        fields = part.split(":")
        try:
            vals = [float(f) for f in fields]
        except ValueError as exc:
            raise ConfigError(f"source {part!r} is not theta[:offset_hz[:amplitude]]") from exc
        if not 1 <= len(vals) <= 3:
            raise ConfigError(f"source {part!r} is not theta[:offset_hz[:amplitude]]")
        vals += [0.0, 1.0][len(vals) - 1:]
        sources.append({"theta_deg": vals[0], "offset_hz": vals[1], "amplitude": vals[2]})
    return sources


def _fix_dash_values(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _DASH_VALUE_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and len(argv[i + 1]) > 1 and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


# ---------------------------------------------------------------- config

def _waveform_section(ns) -> dict:
    wf: dict[str, Any] = {}
    kind = getattr(ns, "wave_kind", None)
    if kind:
        wf["kind"] = kind
    for attr, key in (("duty", "duty"), ("amplitude", "amplitude"), ("m_max", "m_max"),
                      ("f_hm", "f_hm_hz"), ("power", "power"), ("phase", "phase"),
                      ("wave_seed", "seed"), ("normalize", "normalize_power")):
        v = getattr(ns, attr, None)
        if v is not None:
            wf[key] = v
    if getattr(ns, "harmonics", None) is not None:
        wf["harmonics"] = parse_int_set(ns.harmonics)
    if getattr(ns, "real", False):
        wf["real_valued"] = True
    if getattr(ns, "bipolar", False):
        wf["bipolar"] = True
    if getattr(ns, "coeffs", None):
        wf["kind"] = "explicit"
        wf["coeffs_file"] = ns.coeffs
    return wf


def build_waveform(spec: dict, n_channels: int | None = None) -> HarmonicWaveform:
    """Construct a waveform from its config section."""
    spec = dict(spec)
    kind = spec.get("kind", "square")
    f_hm = float(spec.get("f_hm_hz", DEFAULT_F_HM))
    if kind == "square":
        duty = spec.get("duty")
        if duty is None:
            if not n_channels:
                raise ConfigError("square waveform needs a duty cycle")
            duty = 1.0 / n_channels
        w = make_square(float(duty), amplitude=float(spec.get("amplitude", 1.0)),
                        m_max=spec.get("m_max"), f_hm=f_hm, bipolar=bool(spec.get("bipolar", False)))
    elif kind == "comb":
        hs = spec.get("harmonics")
        if hs is None:
            if not n_channels:
                raise ConfigError("comb waveform needs harmonics")
            hs = comb_harmonics(n_channels + 1)
        w = make_comb(hs, total_power=float(spec.get("power", 1.0)),
                      phase_scheme=spec.get("phase", "zero"), f_hm=f_hm, seed=spec.get("seed"))
    elif kind == "explicit":
        data = spec.get("coeffs_data")
        if data is None:
            if "coeffs_file" not in spec:
                raise ConfigError("explicit waveform needs a coefficient file")
            with open(spec["coeffs_file"]) as fh:
                data = json.load(fh)
        data = dict(data)
        if spec.get("real_valued"):
            data["real_valued"] = True
        if "f_hm_hz" in spec:
            data["f_hm_hz"] = spec["f_hm_hz"]
        w = HarmonicWaveform.from_dict(data)
    else:
        raise ConfigError(f"unknown waveform kind {kind!r}")
    if spec.get("normalize_power") is not None:
        w = normalize_power(w, float(spec["normalize_power"]))
    return w


def resolve_config(ns, command: str) -> dict:
    cfg: dict[str, Any] = {}
    if getattr(ns, "config", None):
        with open(ns.config) as fh:
            try:
                cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{ns.config}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError(f"{ns.config}: top level must be a JSON object")
    cfg = copy.deepcopy(cfg)
    cfg["command"] = command
    arch = {**DEFAULT_ARCH, **cfg.get("architecture", {})}
    for attr, key in (("arch", "kind"), ("n", "n_channels"), ("d", "spacing_d"),
                      ("f_rf", "f_rf_hz"), ("f_bw", "f_bw_hz"), ("f_tr", "f_tr_hz")):
        v = getattr(ns, attr, None)
        if v is not None:
            arch[key] = v
    wf = {**arch.get("waveform", {}), **_waveform_section(ns)}
    if wf.get("kind") == "explicit" and "coeffs_file" in wf and "coeffs_data" not in wf:
        # inline the coefficients so the written config is self-contained
        try:
            with open(wf["coeffs_file"]) as fh:
                wf["coeffs_data"] = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{wf['coeffs_file']}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        wf.pop("coeffs_file")
    arch["waveform"] = wf
    cfg["architecture"] = arch
    ctl = dict(cfg.get("controls", {}))
    for attr, key in (("d_tau", "d_tau_s"), ("d_phi_rf", "d_phi_rf_rad"), ("d_phi_lo", "d_phi_lo_rad")):
        v = getattr(ns, attr, None)
        if v is not None:
            ctl[key] = v
    cfg["controls"] = ctl
    task = dict(cfg.get("task", {}))
    task.update(_task_overrides(ns, command))
    cfg["task"] = task
    if getattr(ns, "out", None):
        cfg["output_dir"] = ns.out
    cfg.setdefault("output_dir", "out")
    return cfg


def _task_overrides(ns, command: str) -> dict:
    t: dict[str, Any] = {}
    g = lambda a: getattr(ns, a, None)  # noqa: E731
    if command == "waveform" and g("samples") is not None:
        t["samples_per_period"] = g("samples")
    if command == "pattern":
        if g("m") is not None:
            t["m"] = g("m")
        if g("grid_step") is not None:
            t["grid_step_deg"] = g("grid_step")
    if command in ("beams", "simulate") and g("select") is not None:
        t["harmonics"] = parse_int_set(g("select"))
    if command == "gains":
        if g("used") is not None:
            t["used_harmonics"] = parse_int_set(g("used"))
        if g("combining_loss_db") is not None:
            t["combining_loss_db"] = g("combining_loss_db")
    if command == "steer":
        if g("targets") is not None:
            t["targets"] = parse_targets(g("targets"))
        if g("tolerance") is not None:
            t["tolerance_deg"] = g("tolerance")
    if command == "simulate":
        for attr, key in (("sample_rate", "sample_rate_hz"), ("noise_psd", "noise_psd"),
                          ("seed", "seed"), ("trials", "trials"), ("probe_offset", "probe_offset_hz")):
            if g(attr) is not None:
                t[key] = g(attr)
        if g("periods") is not None:
            t["periods"] = g("periods")
        if g("sources") is not None:
            t["sources"] = parse_sources(g("sources"))
    if command == "compare":
        if g("k_range") is not None:
            t["k_values"] = parse_int_set(g("k_range"))
        if g("power") is not None:
            t["fixed_power"] = g("power")
        if g("n") is not None:
            t["n"] = g("n")
    return t


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def architecture_from(cfg: dict) -> ArchitectureConfig:
    arch = cfg["architecture"]
    try:
        n = int(arch["n_channels"])
        kind = Kind.parse(arch["kind"])
        wf_spec = dict(arch.get("waveform", {}))
        if kind is Kind.TMA:
            wf_spec.setdefault("kind", "square")
        w = build_waveform(wf_spec, n_channels=n)
        return ArchitectureConfig(kind=kind, n_channels=n, waveform=w,
                                  f_rf=float(arch["f_rf_hz"]), spacing_d=float(arch["spacing_d"]),
                                  f_bw=float(arch["f_bw_hz"]), f_tr=float(arch["f_tr_hz"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidParameter):
            raise ConfigError(f"architecture: {exc}") from exc
        raise ConfigError(f"architecture: invalid field ({exc})") from exc


def controls_from(cfg: dict, arch: ArchitectureConfig) -> ChannelControls | None:
    ctl = cfg.get("controls") or {}
    if arch.kind is Kind.TMA and not ctl:
        return None
    return ChannelControls.from_dict(ctl)


# ---------------------------------------------------------------- output

class Writer:
    """Collects outputs for one run and writes each file atomically."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.hash = config_hash(cfg)
        self.out_dir = cfg["output_dir"]
        self.files: list[str] = []
        os.makedirs(self.out_dir, exist_ok=True)

    def _atomic(self, name: str, text: str):
        path = os.path.join(self.out_dir, name)
        fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.files.append(name)
        return path

    @property
    def meta(self) -> dict:
        return {"tool": TOOL, "version": __version__, "config_hash": self.hash}

    def csv(self, name: str, header: list[str], rows) -> str:
        buf = io.StringIO()
        buf.write(f"# {TOOL} {__version__} config={self.hash}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return self._atomic(name, buf.getvalue())

    def json(self, name: str, data: dict) -> str:
        data = {"_meta": self.meta, **data}
        return self._atomic(name, json.dumps(data, indent=2, sort_keys=False, default=_json_default) + "\n")

    def finish(self):
        self._atomic("run_config.json", json.dumps(self.cfg, indent=2, sort_keys=True) + "\n")
        meta = {**self.meta, "command": self.cfg["command"], "outputs": sorted(self.files),
                "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat()}
        self._atomic("run.meta.json", json.dumps(meta, indent=2) + "\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "-inf" if v < 0 else "inf"
        return repr(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _finite_or_none(x: float):
    return None if not math.isfinite(x) else x


# ---------------------------------------------------------------- commands

def cmd_waveform(cfg: dict, out: Writer) -> int:
    w = build_waveform(cfg["architecture"]["waveform"])
    samples = int(cfg["task"].get("samples_per_period", 256))
    if samples < 2:
        raise ConfigError("samples_per_period must be >= 2")
    out.json("waveform.json", {**w.to_dict(), "total_power": total_power(w),
                               "required_bandwidths": required_bandwidths(w)._asdict()})
    t = np.arange(samples) / (samples * w.f_hm)
    a = eval_time(w, t)
    out.csv("waveform_time.csv", ["t_s", "re", "im"], zip(t, a.real, a.imag))
    return EXIT_OK


def cmd_pattern(cfg: dict, out: Writer) -> int:
    arch = architecture_from(cfg)
    ctl = controls_from(cfg, arch)
    task = cfg["task"]
    m = int(task.get("m", 0))
    step = float(task.get("grid_step_deg", DEFAULT_GRID_STEP_DEG))
    pat = array_factor(arch, ctl, m, theta_grid(step))
    mag = pat.magnitude
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(mag)
    out.csv(f"pattern_m{m}.csv", ["theta_deg", "af_linear", "af_db"], zip(pat.theta_deg, mag, db))
    out.json(f"pattern_m{m}.json", {"m": m, "peak_theta_deg": pat.peak_theta,
                                    "peak_theta_refined_deg": pat.peak_theta_refined})
    return EXIT_OK


def cmd_beams(cfg: dict, out: Writer) -> int:
    arch = architecture_from(cfg)
    ctl = controls_from(cfg, arch)
    hs = cfg["task"].get("harmonics")
    bm = beam_map(arch, ctl, hs if hs is not None else arch.waveform.nonzero_harmonics())
    prof = phase_profile(arch, ctl, bm.harmonics)
    rows = []
    for i, m in enumerate(bm.harmonics):
        rows.append((int(m), bm.f_m[i], prof.d_phi[i], prof.d_phi_wrapped[i],
                     bm.theta_deg[i] if bm.visible[i] else "invisible", bm.g_sig_db[i]))
    out.csv("beams.csv", ["m", "f_m_hz", "d_phi_rad", "d_phi_wrapped_rad", "theta_deg", "g_sig_db"], rows)
    bw = validate_bandwidth(arch.f_hm, arch.f_bw, arch.f_tr)
    req = required_bandwidths(arch.waveform, arch.f_rf)
    out.json("bandwidth.json", {"passed": bw.passed, "margin_hz": bw.margin, **req._asdict()})
    return EXIT_OK


def cmd_gains(cfg: dict, out: Writer) -> int:
    arch = architecture_from(cfg)
    ctl = controls_from(cfg, arch)
    task = cfg["task"]
    rep = gain_report(arch, ctl, task.get("used_harmonics"),
                      combining_loss_db=float(task.get("combining_loss_db", 0.0)))
    out.csv("gains.csv", ["m", "f_m_hz", "g_sig_db", "g_noise_db", "ag_db"], rep.rows_db())
    out.json("gains_summary.json", {"harmonic_loss": rep.harmonic_loss, "flagged": list(rep.flagged),
                                    "n_channels": arch.n_channels})
    return EXIT_OK


def cmd_steer(cfg: dict, out: Writer) -> int:
    arch = architecture_from(cfg)
    task = cfg["task"]
    problem = SteeringProblem.from_dict({"targets": task.get("targets", [])})
    try:
        sol = solve_steering(arch, problem)
    except SteeringInfeasible as exc:
        err = {"error": "infeasible", "message": str(exc), "rank": exc.rank,
               "residual_rad": exc.residual, **problem.to_dict()}
        out.json("error.json", err)
        print(json.dumps(err), file=sys.stdout)
        return EXIT_INFEASIBLE
    rep = verify_steering(arch, sol, problem, tolerance_deg=float(task.get("tolerance_deg", 0.5)))
    data = sol.to_dict(problem)
    data["rank"] = sol.rank
    data["achieved_profile_rad"] = {str(k): v for k, v in sol.achieved_profile.items()}
    data["verification"] = {"passed": rep.passed, "max_error_deg": rep.max_error,
                            "peaks": [{"m": m, "target_deg": t, "peak_deg": p, "error_deg": e}
                                      for m, t, p, e in rep.entries]}
    out.json("steering.json", data)
    return EXIT_OK


def cmd_simulate(cfg: dict, out: Writer) -> int:
    arch = architecture_from(cfg)
    ctl = controls_from(cfg, arch)
    task = dict(cfg["task"])
    if "periods" in task and "duration_s" not in task:
        task["duration_s"] = int(task["periods"]) / arch.f_hm
    params = SimParams.from_dict(task)
    res = simulate_rx(arch, ctl, params, task.get("harmonics"))
    out.csv("spectrum.csv", ["m", "f_offset_hz", "re", "im", "signal_power", "noise_power"], res.rows())
    g = res.grid
    sidecar = {"params": params.to_dict(), "seed": params.seed,
               "grid": {"n_periods": g.n_periods, "n_samples": g.n_samples,
                        "sample_rate_hz": g.sample_rate, "duration_s": g.duration,
                        "probe_offset_hz": g.probe_bin / g.duration},
               "snaps": list(g.snaps),
               "interchannel_phase_rad": [_finite_or_none(float(p)) for p in res.interchannel_phase]}
    trials = int(task.get("trials", 0))
    if trials > 0:
        emp = measure_gains(arch, ctl, params, trials, task.get("harmonics"))
        out.csv("gains_empirical.csv", ["m", "g_sig_db", "g_noise_db", "ag_db"],
                zip(emp.harmonics, to_db(emp.g_sig), to_db(emp.g_noise), to_db(emp.ag)))
        sidecar["trials"] = trials
    out.json("spectrum.meta.json", sidecar)
    return EXIT_OK


def cmd_compare(cfg: dict, out: Writer) -> int:
    task = cfg["task"]
    n = int(task.get("n", cfg["architecture"].get("n_channels", 16)))
    ks = task.get("k_values") or list(range(1, 2 * n + 1))
    rows = compare_waveforms(n, ks, fixed_power=float(task.get("fixed_power", 1.0)),
                             m_max=task.get("m_max"))
    out.csv("compare.csv", ["K", "g_square_db", "g_comb_db"],
            ((r.k, to_db(r.g_square_0), to_db(r.g_comb_0)) for r in rows))
    curves = []
    for r in rows:
        for m, gs, gc in zip(r.harmonics, r.g_square, r.g_comb):
            curves.append((r.k, m, to_db(gs), to_db(gc)))
    out.csv("compare_curves.csv", ["K", "m", "g_square_db", "g_comb_db"], curves)
    return EXIT_OK


COMMANDS = {
    "waveform": cmd_waveform,
    "pattern": cmd_pattern,
    "beams": cmd_beams,
    "gains": cmd_gains,
    "steer": cmd_steer,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


# ---------------------------------------------------------------- argparse

def _add_common(p: argparse.ArgumentParser, kind_flag: str = "--waveform"):
    p.add_argument("--config", help="JSON run configuration; flags override its fields")
    p.add_argument("--out", help="output directory (default: out)")
    g = p.add_argument_group("waveform")
    g.add_argument(kind_flag, dest="wave_kind", choices=["square", "comb", "explicit"])
    g.add_argument("--duty", type=float)
    g.add_argument("--amplitude", type=float)
    g.add_argument("--m-max", dest="m_max", type=int)
    g.add_argument("--f-hm", dest="f_hm", type=float, help="HM-LO fundamental, Hz")
    g.add_argument("--harmonics", help="comb harmonics, e.g. -2..2 or 0,1,2")
    g.add_argument("--power", type=float, help="comb total power / compare fixed power")
    g.add_argument("--phase", choices=["zero", "random"])
    g.add_argument("--wave-seed", dest="wave_seed", type=int)
    g.add_argument("--coeffs", help="explicit coefficient JSON file")
    g.add_argument("--real", action="store_true", help="require a real-valued waveform")
    g.add_argument("--bipolar", action="store_true")
    g.add_argument("--normalize", type=float, help="rescale to this total power")


def _add_arch(p: argparse.ArgumentParser):
    g = p.add_argument_group("architecture")
    g.add_argument("--arch", choices=[k.value for k in Kind])
    g.add_argument("--n", type=int, help="number of channels")
    g.add_argument("--d", type=float, help="element spacing in wavelengths")
    g.add_argument("--f-rf", dest="f_rf", type=float)
    g.add_argument("--f-bw", dest="f_bw", type=float)
    g.add_argument("--f-tr", dest="f_tr", type=float)
    g.add_argument("--d-tau", dest="d_tau", type=float, help="progressive delay, s")
    g.add_argument("--d-phi-rf", dest="d_phi_rf", type=float, help="progressive RF phase, rad")
    g.add_argument("--d-phi-lo", dest="d_phi_lo", type=float, help="progressive LO phase, rad")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("waveform", help="build a waveform, write coefficients and one period")
    _add_common(p, "--kind")
    p.add_argument("--samples", type=int, help="time samples per period (default 256)")

    p = sub.add_parser("pattern", help="array factor of one harmonic")
    _add_common(p)
    _add_arch(p)
    p.add_argument("--m", type=int)
    p.add_argument("--grid-step", dest="grid_step", type=float)

    p = sub.add_parser("beams", help="beam angle and gain per harmonic")
    _add_common(p)
    _add_arch(p)
    p.add_argument("--select", help="harmonics to report")

    p = sub.add_parser("gains", help="closed-form signal/noise/array gain")
    _add_common(p)
    _add_arch(p)
    p.add_argument("--used", help="harmonics mapped to beams")
    p.add_argument("--combining-loss-db", dest="combining_loss_db", type=float)

    p = sub.add_parser("steer", help="solve controls for beam targets")
    _add_common(p)
    _add_arch(p)
    p.add_argument("--targets", help="m:theta_deg pairs, e.g. 0:0,1:30,2:-30")
    p.add_argument("--tolerance", type=float, help="verification tolerance, degrees")

    p = sub.add_parser("simulate", help="time-domain oracle run")
    _add_common(p)
    _add_arch(p)
    p.add_argument("--sources", help="theta[:offset_hz[:amplitude]] separated by ';'")
    p.add_argument("--noise-psd", dest="noise_psd", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--periods", type=int)
    p.add_argument("--sample-rate", dest="sample_rate", type=float)
    p.add_argument("--probe-offset", dest="probe_offset", type=float)
    p.add_argument("--trials", type=int, help="also run Monte-Carlo gain estimation")
    p.add_argument("--select", help="harmonics to report")

    p = sub.add_parser("compare", help="square vs comb gain over the number of beams")
    _add_common(p)
    p.add_argument("--n", type=int, help="number of channels")
    p.add_argument("--k-range", dest="k_range", help="beam counts, e.g. 2..20")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(_fix_dash_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INVALID
    try:
        cfg = resolve_config(ns, ns.command)
        writer = Writer(cfg)
        code = COMMANDS[ns.command](cfg, writer)
        writer.finish()
        return code
    except InvalidParameter as exc:
        print(json.dumps({"error": "invalid_config", "message": str(exc)}), file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
