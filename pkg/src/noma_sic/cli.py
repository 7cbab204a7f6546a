"""Config-driven experiment runner.

Subcommands: ``run <config>``, ``fit``, ``pdf``, ``pep``, ``ber-theory``,
``ber-sim``, ``reproduce <fig3|fig4|fig5|fig6|fig7>``.  Configs are flat
``key = value`` text; powers and average channel gains are given in dB and
converted once at this boundary (power coefficients are renormalized to sum
to one, matching the rounded dB values quoted for the reference
experiments).  Every run writes a CSV with the fixed header
``param,ue,mode,source,value,ci95,trials``, a run manifest, and a
gnuplot-compatible plot script; curves are re-ingestable through
:meth:`noma_sic.analytic.BerCurve.from_csv`.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .analytic import (BerCurve, BerRow, PepContext, TwoUserScenario,
                       fixed_order_theory_curve, pdf_z_first, pdf_z_second,
                       pep_first, pep_second_correct, pep_second_incorrect,
                       theory_curve, unconditional_real_part_mixture)
from .channel import ChannelParams, conditional_gain_pdf
from .errors import ConfigError, NomaSicError
from .gaussfit import GaussianMixture
from .numerics import histogram_pdf, integrate_semi_infinite, q_chiani
from .simcore import SimConfig, collect_statistics, run_curve

EXPERIMENTS = ("ber-vs-snr", "power-ratio-sweep", "channel-gap-sweep",
               "sic-compare", "hetero", "fit-report", "pdf-report")

_MODS = {"2": 2, "4": 4, "16": 16, "64": 64,
         "bpsk": 2, "4qam": 4, "16qam": 16, "64qam": 64}


def _parse_grid(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be start:step:stop or a comma list, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"bad grid bounds in {text!r}")
        n = int(round((stop - start) / step))
        grid = tuple(round(start + i * step, 10) for i in range(n + 1))
        return grid
    return tuple(float(p) for p in text.split(","))


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_mod(text: str) -> int:
    t = text.strip().lower()
    if t not in _MODS:
        raise ConfigError(f"unknown modulation {text!r} (use 2/4/16/64 or bpsk/4qam/16qam/64qam)")
    return _MODS[t]


@dataclass(frozen=True)
class ExperimentSpec:
    """Resolved experiment configuration (linear units internally)."""

    experiment: str = "ber-vs-snr"
    mod_ue1: int = 2
    mod_ue2: int = 2
    p1_db: float = -2.22
    p2_db: float = -3.98
    sigma1_sq_db: float = 20.0
    sigma2_sq_db: float = 7.96
    ebn0_db: tuple[float, ...] = tuple(float(v) for v in range(0, 31, 5))
    ebn0_point: float = 20.0
    ratio_db: tuple[float, ...] = tuple(round(0.5 * i, 10) for i in range(1, 41))
    gap_db: tuple[float, ...] = tuple(float(v) for v in range(0, 41, 4))
    trials: int = 200_000
    mode: str = "dynamic"
    seed: int = 12345
    threads: int = 1
    out: str = ""
    emit_theory: bool = True
    emit_sim: bool = True
    fit_samples: int = 400_000
    fit_bins: int = 0
    mixtures: str = ""
    eb: float = 1.0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.mode not in ("dynamic", "fixed", "both"):
            raise ConfigError(f"mode must be dynamic, fixed, or both, got {self.mode!r}")
        if not (self.emit_theory or self.emit_sim):
            raise ConfigError("at least one of emit_theory/emit_sim must be set")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        p1, p2 = self.powers()
        if p1 <= p2:
            raise ConfigError(
                "power policy violation: the first-decoded (instantaneously stronger) "
                "user must get the larger coefficient, so p1_db must exceed p2_db")

    def powers(self) -> tuple[float, float]:
        """Linear power coefficients, renormalized to sum to one."""
        p1 = 10.0 ** (self.p1_db / 10.0)
        p2 = 10.0 ** (self.p2_db / 10.0)
        return p1 / (p1 + p2), p2 / (p1 + p2)

    def sigmas(self) -> tuple[float, float]:
        """Linear Rayleigh scales (sqrt of the dB-quoted average powers)."""
        return (10.0 ** (self.sigma1_sq_db / 20.0), 10.0 ** (self.sigma2_sq_db / 20.0))

    def out_dir(self) -> str:
        return self.out or os.path.join("runs", self.experiment)


_PARSERS = {
    "experiment": str,
    "mod_ue1": _parse_mod,
    "mod_ue2": _parse_mod,
    "p1_db": float,
    "p2_db": float,
    "sigma1_sq_db": float,
    "sigma2_sq_db": float,
    "ebn0_db": _parse_grid,
    "ebn0_point": float,
    "ratio_db": _parse_grid,
    "gap_db": _parse_grid,
    "trials": int,
    "mode": str,
    "seed": int,
    "threads": int,
    "out": str,
    "emit_theory": _parse_bool,
    "emit_sim": _parse_bool,
    "fit_samples": int,
    "fit_bins": int,
    "mixtures": str,
    "eb": float,
}


def _format_value(value) -> str:
    """Render a spec field so validate_spec can parse it back (manifests
    double as configs)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    return str(value)


def validate_spec(text: str, **overrides) -> ExperimentSpec:
    """Parse flat key = value config text into an ExperimentSpec.

    Unknown keys and malformed values are rejected with the offending key
    and line number; omitted keys take documented defaults (echoed later in
    the run manifest).
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](val)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    values.update({k: v for k, v in overrides.items() if v is not None})
    env_threads = os.environ.get("NOMA_SIC_THREADS")
    if env_threads:
        try:
            values["threads"] = int(env_threads)
        except ValueError as exc:
            raise ConfigError(f"NOMA_SIC_THREADS must be an integer: {exc}") from exc
    return ExperimentSpec(**values)


# --------------------------------------------------------------------------
# experiment execution


def _scenario(spec: ExperimentSpec, rng: np.random.Generator,
              fitted: bool) -> TwoUserScenario:
    p1, p2 = spec.powers()
    s1, s2 = spec.sigmas()
    scn = TwoUserScenario(sigma1=s1, sigma2=s2, p_first=p1, p_second=p2,
                          m1=spec.mod_ue1, m2=spec.mod_ue2, eb=spec.eb)
    if fitted and spec.mixtures:
        loaded = {}
        for ue in (1, 2):
            for order in (1, 2):
                path = os.path.join(spec.mixtures, f"fit_re_h{ue}_order{order}.txt")
                try:
                    with open(path, "r", encoding="ascii") as fh:
                        loaded[(ue, order)] = GaussianMixture.from_text(fh.read())
                except OSError as exc:
                    raise ConfigError(f"cannot load cached mixture {path}: {exc}") from exc
        return replace(scn, mixtures=loaded)
    if fitted:
        scn = scn.with_fitted_mixtures(rng, n_samples=spec.fit_samples,
                                       bin_count=spec.fit_bins or None)
    return scn


def _sim_config(spec: ExperimentSpec, grid, mode: str) -> SimConfig:
    p1, p2 = spec.powers()
    return SimConfig(channel=ChannelParams(spec.sigmas()), p_first=p1, p_second=p2,
                     m1=spec.mod_ue1, m2=spec.mod_ue2, ebn0_db=tuple(grid),
                     trials=spec.trials, sic_mode=mode, seed=spec.seed, eb=spec.eb)


def _write_mixtures(scn: TwoUserScenario, out_dir: str) -> list[str]:
    paths = []
    os.makedirs(out_dir, exist_ok=True)
    for (ue, order), mix in sorted(scn.mixtures.items()):
        path = os.path.join(out_dir, f"fit_re_h{ue}_order{order}.txt")
        with open(path, "w", encoding="ascii") as fh:
            fh.write(mix.to_text())
        paths.append(path)
    return paths


def _relabel(rows, param: float):
    return [BerRow(param, r.ue, r.mode, r.source, r.value, r.ci95, r.trials) for r in rows]


def _ber_vs_snr(spec: ExperimentSpec) -> BerCurve:
    rows: list[BerRow] = []
    grid = spec.ebn0_db
    modes = ("dynamic", "fixed") if spec.mode == "both" else (spec.mode,)
    if spec.emit_theory:
        scn = _scenario(spec, np.random.default_rng(spec.seed), fitted=True)
        _write_mixtures(scn, os.path.join(spec.out_dir(), "mixtures"))
        if "dynamic" in modes:
            rows.extend(theory_curve(scn, grid).rows)
        if "fixed" in modes:
            rows.extend(fixed_order_theory_curve(scn, grid).rows)
    if spec.emit_sim:
        for mode in modes:
            rows.extend(run_curve(_sim_config(spec, grid, mode), threads=spec.threads).rows)
    return BerCurve(grid=tuple(grid), rows=tuple(rows))


def _power_ratio_sweep(spec: ExperimentSpec) -> BerCurve:
    rows: list[BerRow] = []
    scn0 = None
    if spec.emit_theory:
        scn0 = _scenario(spec, np.random.default_rng(spec.seed), fitted=True)
        _write_mixtures(scn0, os.path.join(spec.out_dir(), "mixtures"))
    for ratio in spec.ratio_db:
        p2 = 1.0 / (1.0 + 10.0 ** (ratio / 10.0))
        p1 = 1.0 - p2
        if spec.emit_theory:
            scn = replace(scn0, p_first=p1, p_second=p2)
            point = theory_curve(scn, (spec.ebn0_point,))
            rows.extend(_relabel([r for r in point.rows if "|" not in r.ue], ratio))
        if spec.emit_sim:
            cfg = replace(_sim_config(spec, (spec.ebn0_point,), "dynamic"),
                          p_first=p1, p_second=p2)
            sim = run_curve(cfg, threads=spec.threads)
            rows.extend(_relabel([r for r in sim.rows if "|" not in r.ue], ratio))
    return BerCurve(grid=tuple(spec.ratio_db), rows=tuple(rows))


def _channel_gap_sweep(spec: ExperimentSpec) -> BerCurve:
    rows: list[BerRow] = []
    for gap in spec.gap_db:
        sub = replace(spec, sigma1_sq_db=spec.sigma2_sq_db + gap)
        if spec.emit_theory:
            scn = _scenario(sub, np.random.default_rng(spec.seed), fitted=True)
            point = theory_curve(scn, (spec.ebn0_point,))
            rows.extend(_relabel([r for r in point.rows if "|" not in r.ue], gap))
        if spec.emit_sim:
            sim = run_curve(_sim_config(sub, (spec.ebn0_point,), "dynamic"),
                            threads=spec.threads)
            rows.extend(_relabel([r for r in sim.rows if "|" not in r.ue], gap))
    return BerCurve(grid=tuple(spec.gap_db), rows=tuple(rows))


def _fit_report(spec: ExperimentSpec) -> list[str]:
    out_dir = spec.out_dir()
    os.makedirs(out_dir, exist_ok=True)
    scn = _scenario(spec, np.random.default_rng(spec.seed), fitted=True)
    paths = _write_mixtures(scn, out_dir)
    table = os.path.join(out_dir, "fit_coefficients.csv")
    with open(table, "w", encoding="ascii") as fh:
        fh.write("ue,order,term,a,b,c\n")
        for (ue, order), mix in sorted(scn.mixtures.items()):
            for i, (a, b, c) in enumerate(mix.terms, start=1):
                fh.write(f"{ue},{order},{i},{a!r},{b!r},{c!r}\n")
    return paths + [table]


def _pdf_report(spec: ExperimentSpec) -> list[str]:
    out_dir = spec.out_dir()
    os.makedirs(out_dir, exist_ok=True)
    params = ChannelParams(spec.sigmas())
    cfg = _sim_config(spec, (spec.ebn0_point,), "dynamic")
    written = []
    for ue in (1, 2):
        for order in (1, 2):
            pdf_fn = conditional_gain_pdf(params, ue, order)
            samples = collect_statistics(cfg, "gain", ue, order, 200_000)
            hist = histogram_pdf(samples, 120)
            path = os.path.join(out_dir, f"pdf_gain_ue{ue}_order{order}.csv")
            with open(path, "w", encoding="ascii") as fh:
                fh.write("x,analytic,empirical\n")
                for x, d in zip(hist.centers, hist.densities):
                    fh.write(f"{x!r},{pdf_fn(x)!r},{d!r}\n")
            written.append(path)
    return written


def _plot_script(csv_path: str, out_path: str, xlabel: str) -> None:
    name = os.path.basename(csv_path)
    with open(out_path, "w", encoding="ascii") as fh:
        fh.write(
            "set datafile separator ','\n"
            "set logscale y\n"
            f"set xlabel '{xlabel}'\n"
            "set ylabel 'BER'\n"
            "set key outside\n"
            f"# series are filtered by ue/mode/source columns of {name}\n"
            f"plot '{name}' every ::1 using 1:($5) with points title 'all series'\n"
        )


def run_experiment(spec: ExperimentSpec) -> list[str]:
    """Execute one experiment; returns the list of written files."""
    t0 = time.monotonic()
    out_dir = spec.out_dir()
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    if spec.experiment in ("ber-vs-snr", "hetero", "sic-compare"):
        eff = replace(spec, mode="both") if spec.experiment == "sic-compare" else spec
        curve = _ber_vs_snr(eff)
        csv_path = os.path.join(out_dir, f"{spec.experiment}.csv")
        curve.to_csv(csv_path)
        written.append(csv_path)
        xlabel = "Eb/N0 (dB)"
    elif spec.experiment == "power-ratio-sweep":
        curve = _power_ratio_sweep(spec)
        csv_path = os.path.join(out_dir, "power-ratio-sweep.csv")
        curve.to_csv(csv_path)
        written.append(csv_path)
        xlabel = "p1/p2 (dB)"
    elif spec.experiment == "channel-gap-sweep":
        curve = _channel_gap_sweep(spec)
        csv_path = os.path.join(out_dir, "channel-gap-sweep.csv")
        curve.to_csv(csv_path)
        written.append(csv_path)
        xlabel = "sigma1^2/sigma2^2 (dB)"
    elif spec.experiment == "fit-report":
        written.extend(_fit_report(spec))
        xlabel = ""
    else:
        written.extend(_pdf_report(spec))
        xlabel = "x"
    if written and written[0].endswith(".csv") and xlabel:
        gp = os.path.join(out_dir, "plot.gp")
        _plot_script(written[0], gp, xlabel)
        written.append(gp)
    # the manifest doubles as a config: `noma-sic run run_manifest.txt`
    # reproduces the CSVs byte for byte
    manifest = os.path.join(out_dir, "run_manifest.txt")
    with open(manifest, "w", encoding="ascii") as fh:
        fh.write(f"# noma-sic {__version__}\n")
        for f in sorted(fields(ExperimentSpec), key=lambda f: f.name):
            fh.write(f"{f.name} = {_format_value(getattr(spec, f.name))}\n")
        fh.write(f"# wall_seconds = {time.monotonic() - t0:.3f}\n")
        for path in written:
            fh.write(f"# output = {path}\n")
    written.append(manifest)
    return written


# --------------------------------------------------------------------------
# canned reference experiments


def _reproduce_specs(which: str, base: ExperimentSpec) -> list[tuple[str, ExperimentSpec]]:
    fig6 = [
        (2, 2, -2.22, -3.98, 20.0, 7.96),
        (4, 4, -0.46, -10.0, 20.0, 7.96),
        (16, 16, -0.04, -20.0, 38.06, 26.02),
        (64, 64, -0.04, -20.0, 38.06, 26.02),
    ]
    hetero = [
        (4, 2, -0.46, -10.0, 20.0, 7.96),
        (16, 4, -0.46, -10.0, 20.0, 7.96),
        (64, 2, -0.04, -20.0, 38.06, 26.02),
    ]
    out: list[tuple[str, ExperimentSpec]] = []
    if which == "fig3":
        out.append(("fig3", replace(
            base, experiment="ber-vs-snr", mod_ue1=2, mod_ue2=2,
            p1_db=-2.22, p2_db=-3.98, sigma1_sq_db=20.0, sigma2_sq_db=7.96,
            ebn0_db=tuple(float(v) for v in range(0, 31, 2)))))
    elif which == "fig4":
        for m in (2, 4, 16, 64):
            out.append((f"fig4_m{m}", replace(
                base, experiment="power-ratio-sweep", mod_ue1=m, mod_ue2=m,
                sigma1_sq_db=10.0, sigma2_sq_db=0.0, ebn0_point=20.0)))
    elif which == "fig5":
        for m in (2, 4):
            out.append((f"fig5_m{m}", replace(
                base, experiment="channel-gap-sweep", mod_ue1=m, mod_ue2=m,
                p1_db=-0.04, p2_db=-20.0, sigma2_sq_db=10.0, ebn0_point=20.0)))
    elif which == "fig6":
        for (m1, m2, p1, p2, s1, s2) in fig6:
            out.append((f"fig6_m{m1}", replace(
                base, experiment="sic-compare", mod_ue1=m1, mod_ue2=m2,
                p1_db=p1, p2_db=p2, sigma1_sq_db=s1, sigma2_sq_db=s2,
                ebn0_db=tuple(float(v) for v in range(0, 46, 5)))))
    elif which == "fig7":
        for i, (m1, m2, p1, p2, s1, s2) in enumerate(hetero, start=1):
            out.append((f"fig7_config{i}", replace(
                base, experiment="hetero", mod_ue1=m1, mod_ue2=m2,
                p1_db=p1, p2_db=p2, sigma1_sq_db=s1, sigma2_sq_db=s2,
                ebn0_db=tuple(float(v) for v in range(0, 41, 5)))))
    else:
        raise ConfigError(f"unknown figure {which!r} (use fig3..fig7)")
    return out


# --------------------------------------------------------------------------
# entry point


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--out", type=str, default=None)
    parser.add_argument("--threads", type=int, default=None)


def _add_scenario(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mod-ue1", type=_parse_mod, default=None)
    parser.add_argument("--mod-ue2", type=_parse_mod, default=None)
    parser.add_argument("--p1-db", type=float, default=None)
    parser.add_argument("--p2-db", type=float, default=None)
    parser.add_argument("--sigma1-sq-db", type=float, default=None)
    parser.add_argument("--sigma2-sq-db", type=float, default=None)
    parser.add_argument("--ebn0-db", type=_parse_grid, default=None)
    parser.add_argument("--ebn0-point", type=float, default=None)
    parser.add_argument("--mode", type=str, default=None)
    parser.add_argument("--fit-samples", type=int, default=None)
    parser.add_argument("--eb", type=float, default=None)


def _overrides(args: argparse.Namespace) -> dict:
    keys = ("seed", "trials", "out", "threads", "mod_ue1", "mod_ue2", "p1_db",
            "p2_db", "sigma1_sq_db", "sigma2_sq_db", "ebn0_db", "ebn0_point",
            "mode", "fit_samples", "eb", "emit_theory", "emit_sim", "experiment")
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _cmd_pep(args: argparse.Namespace) -> int:
    spec = validate_spec("", **_overrides(args))
    p1, p2 = spec.powers()
    s1, s2 = spec.sigmas()
    n0 = spec.eb / 10.0 ** (spec.ebn0_point / 10.0)
    scn = TwoUserScenario(sigma1=s1, sigma2=s2, p_first=p1, p_second=p2,
                          m1=spec.mod_ue1, m2=spec.mod_ue2, eb=spec.eb)
    d = spec.eb ** 0.5
    sc = scn.effective_weak_scale
    if args.order == "2-correct":
        closed = pep_second_correct(2 * d, sc, p2, n0)
        ctx = PepContext(p_first=p1, p_second=p2, n0=n0, sigma_n=sc, sigma_m=s2,
                         delta_n=2 * d)
        quad = integrate_semi_infinite(lambda z: q_chiani(z) * pdf_z_second(z, ctx, True))
    else:
        mix = unconditional_real_part_mixture(sc)
        if args.order == "1":
            ctx = PepContext(p_first=p1, p_second=p2, n0=n0, sigma_n=s1, sigma_m=sc,
                             delta_n=2 * d, interferer=d, mixture=mix)
            closed = pep_first(ctx)
            quad = integrate_semi_infinite(lambda z: q_chiani(z) * pdf_z_first(z, ctx))
        else:
            ctx = PepContext(p_first=p1, p_second=p2, n0=n0, sigma_n=sc, sigma_m=s1,
                             delta_n=2 * d, residual=2 * d, mixture=mix)
            closed = pep_second_incorrect(ctx)
            quad = integrate_semi_infinite(
                lambda z: q_chiani(z) * pdf_z_second(z, ctx, False))
    rel = abs(closed - quad) / max(abs(quad), 1e-300)
    print(f"closed-form = {closed!r}")
    print(f"quadrature  = {quad!r}")
    print(f"relative gap = {rel:.3e}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="noma-sic",
        description="Two-user uplink NOMA error analysis: closed forms and link simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment described by a config file")
    p_run.add_argument("config", type=str)
    _add_common(p_run)

    p_fit = sub.add_parser("fit", help="fit conditioned real-part mixtures (fit-report)")
    _add_common(p_fit)
    _add_scenario(p_fit)

    p_pdf = sub.add_parser("pdf", help="tabulate analytic vs empirical densities")
    _add_common(p_pdf)
    _add_scenario(p_pdf)

    p_pep = sub.add_parser("pep", help="evaluate one closed-form PEP against quadrature")
    p_pep.add_argument("--order", choices=("1", "2-correct", "2-incorrect"), default="1")
    _add_common(p_pep)
    _add_scenario(p_pep)

    p_bt = sub.add_parser("ber-theory", help="theory-only BER curve")
    _add_common(p_bt)
    _add_scenario(p_bt)

    p_bs = sub.add_parser("ber-sim", help="simulation-only BER curve")
    _add_common(p_bs)
    _add_scenario(p_bs)

    p_rep = sub.add_parser("reproduce", help="rerun a reference experiment at desk scale")
    p_rep.add_argument("figure", choices=("fig3", "fig4", "fig5", "fig6", "fig7"))
    _add_common(p_rep)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
            spec = validate_spec(text, **_overrides(args))
            written = run_experiment(spec)
        elif args.command == "fit":
            spec = validate_spec("experiment = fit-report", **_overrides(args))
            written = run_experiment(spec)
        elif args.command == "pdf":
            spec = validate_spec("experiment = pdf-report", **_overrides(args))
            written = run_experiment(spec)
        elif args.command == "pep":
            return _cmd_pep(args)
        elif args.command == "ber-theory":
            spec = validate_spec("emit_sim = false", **_overrides(args))
            written = run_experiment(spec)
        elif args.command == "ber-sim":
            spec = validate_spec("emit_theory = false", **_overrides(args))
            written = run_experiment(spec)
        else:
            base = validate_spec("", **_overrides(args))
            written = []
            for name, spec in _reproduce_specs(args.figure, base):
                sub_spec = replace(spec, out=os.path.join(base.out or "runs", name))
                written.extend(run_experiment(sub_spec))
        for path in written:
            print(path)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NomaSicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
