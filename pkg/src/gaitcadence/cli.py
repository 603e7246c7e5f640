"""Command-line interface: run, synth, tfr, and compare subcommands."""

from __future__ import annotations

import logging
import sys
import traceback
from pathlib import Path

import click
import numpy as np

from . import __version__
from .analysis import bland_altman
from .config import load_config
from .errors import CadenceError, ConfigError, DataFormatError, ParameterError
from .io import (export_tfr, load_labels_csv, load_trace_csv, load_triaxial_csv,
                 write_bland_altman_csv, write_labels_csv, write_triaxial_csv,
                 TFR_FORMATS)
from .pipeline import analyze_signal, analysis_grid, preprocess, run_pipeline
from .signal import TriaxialRecord, VALID_LOCATIONS
from .synth import (BoutModel, ConstantProfile, LinearProfile, WalkingModelSpec,
                    WaveShape, ar1_sd_for_snr, synthesize_walk)
from .tfr import KIND_DSSST, KIND_DSSTFT, KIND_ISTCT, KIND_SST, KIND_STCT, KIND_STFT

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

_TFR_KINDS = (KIND_STFT, KIND_STCT, KIND_ISTCT, KIND_DSSTFT, KIND_SST, KIND_DSSST)


def _config_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="Flat key=value config file."),
        click.option("--window-span-s", type=float, default=None,
                     help="Analysis window span in seconds."),
        click.option("--sigma", type=float, default=None,
                     help="Gaussian shape parameter on the normalized support."),
        click.option("--gamma", type=float, default=None,
                     help="Soft-log power for the cepstral transform."),
        click.option("--upsilon", type=float, default=None,
                     help="Magnitude threshold for the reassignment rule."),
        click.option("--lambda", "ridge_lambda", type=float, default=None,
                     help="Ridge smoothness penalty."),
        click.option("--band", type=str, default=None, metavar="LO:HI",
                     help="Fundamental search band in Hz (e.g. 0.3:2.5)."),
        click.option("--hop", type=int, default=None,
                     help="Frame hop in samples."),
        click.option("--fft-pad", type=str, default=None,
                     help="DFT length 2M: 'auto' or an even integer."),
        click.option("--fs", type=float, default=None,
                     help="Sampling rate when the CSV lacks a time column."),
        click.option("--location", type=click.Choice(VALID_LOCATIONS),
                     default=None, help="Sensor location tag."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_config(config_path, band, **kw):
    if band is not None:
        try:
            lo, hi = band.split(":")
            kw["band_lo_hz"], kw["band_hi_hz"] = float(lo), float(hi)
        except ValueError:
            raise ConfigError(f"--band expects LO:HI in Hz, got {band!r}") from None
    return load_config(config_path, **kw)


@click.group()
@click.version_option(version=__version__, prog_name="gaitcadence")
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def cli(verbose):
    """Gait cadence estimation from single-sensor accelerometry."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.argument("input_csv", type=click.Path())
@click.argument("labels_csv", type=click.Path())
@click.option("-o", "--outdir", type=click.Path(), default="cadence_out",
              show_default=True, help="Output directory.")
@click.option("--export-tfr", "export_kinds", multiple=True,
              type=click.Choice(_TFR_KINDS),
              help="Also export these per-bout TFR grids (repeatable).")
@click.option("--export-format", type=click.Choice(TFR_FORMATS), default="csv",
              show_default=True, help="Format for TFR exports.")
@_config_options
def run(input_csv, labels_csv, outdir, export_kinds, export_format,
        config_path, band, **kw):
    """Estimate per-bout cadence traces and summaries for a recording."""
    cfg = _build_config(config_path, band, **kw)
    report = run_pipeline(cfg, input_csv, labels_csv, outdir,
                          export_kinds=export_kinds,
                          export_format=export_format)
    for i, b in enumerate(report.bouts, start=1):
        mean = ("-" if b.mean_cadence_hz is None
                else f"{b.mean_cadence_hz:.3f} Hz")
        click.echo(f"bout {i:2d} [{b.start_s:8.2f}, {b.end_s:8.2f}] "
                   f"label={b.label} {b.status:7s} mean={mean} {b.message}")
    click.echo(f"{len(report.bouts)} bout(s) processed in "
               f"{report.elapsed_s:.1f} s; outputs in {outdir}")
    if any(b.status == "error" for b in report.bouts):
        raise DataFormatError("one or more bouts failed; see report.json")


@cli.command()
@click.option("--duration", type=float, default=60.0, show_default=True,
              help="Total recording length in seconds.")
@click.option("--fs", type=float, default=100.0, show_default=True,
              help="Sampling rate in Hz.")
@click.option("--bout", "bout_specs", multiple=True, metavar="START:END[:LABEL]",
              help="Walking bout in seconds (repeatable); default spans "
                   "the whole recording.")
@click.option("--if-hz", type=float, default=1.0, show_default=True,
              help="Constant instantaneous frequency in Hz.")
@click.option("--if-ramp", type=str, default=None, metavar="LO:HI",
              help="Linear IF ramp across each bout (overrides --if-hz).")
@click.option("--alphas", type=str, default="0.5,1.0", show_default=True,
              help="Comma-separated harmonic coefficients (fundamental first); "
                   "rescaled to unit shape power.")
@click.option("--betas", type=str, default=None,
              help="Comma-separated harmonic phases in radians.")
@click.option("--alpha0", type=float, default=0.4, show_default=True,
              help="Shape mean level before normalization.")
@click.option("--amp", type=float, default=1.0, show_default=True,
              help="Amplitude modulation level.")
@click.option("--snr-db", type=float, default=10.0, show_default=True,
              help="AR(1) noise level as SNR against the in-bout signal.")
@click.option("--rho", type=float, default=0.3, show_default=True,
              help="AR(1) coefficient.")
@click.option("--baseline", type=float, default=1.5, show_default=True,
              help="Constant x-axis offset standing in for gravity.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-csv", type=click.Path(), default="synthetic.csv",
              show_default=True, help="Triaxial CSV output path.")
@click.option("--out-labels", type=click.Path(), default="synthetic_labels.csv",
              show_default=True, help="Bout label CSV output path.")
@click.option("--out-truth", type=click.Path(), default=None,
              help="Optional ground-truth cadence CSV.")
def synth(duration, fs, bout_specs, if_hz, if_ramp, alphas, betas, alpha0,
          amp, snr_db, rho, baseline, seed, out_csv, out_labels, out_truth):
    """Generate a synthetic walking recording with known cadence."""
    try:
        alpha_vals = [float(a) for a in alphas.split(",") if a.strip()]
    except ValueError:
        raise ConfigError(f"--alphas expects comma-separated floats, got {alphas!r}") \
            from None
    if betas is None:
        beta_vals = [0.8 * (j + 1) for j in range(len(alpha_vals))]
    else:
        try:
            beta_vals = [float(b) for b in betas.split(",") if b.strip()]
        except ValueError:
            raise ConfigError(f"--betas expects comma-separated floats, got {betas!r}") \
                from None
    if len(beta_vals) != len(alpha_vals):
        raise ConfigError("--betas must match --alphas in length")
    shape = WaveShape(alpha_vals, beta_vals, alpha0).normalized()

    if if_ramp is not None:
        try:
            lo, hi = (float(v) for v in if_ramp.split(":"))
        except ValueError:
            raise ConfigError(f"--if-ramp expects LO:HI, got {if_ramp!r}") from None
        profile = LinearProfile(lo, hi)
    else:
        profile = ConstantProfile(if_hz)

    intervals = []
    if not bout_specs:
        intervals.append((0.0, duration, 1))
    for spec_str in bout_specs:
        parts = spec_str.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(
                f"--bout expects START:END[:LABEL], got {spec_str!r}")
        try:
            start, end = float(parts[0]), float(parts[1])
            label = int(parts[2]) if len(parts) == 3 else 1
        except ValueError:
            raise ConfigError(
                f"--bout expects numeric START:END[:LABEL], got {spec_str!r}") \
                from None
        intervals.append((start, end, label))

    bouts = [BoutModel(start_s=s, end_s=e, if_profile=profile, shape=shape,
                       amp_profile=ConstantProfile(amp), label=lab)
             for s, e, lab in intervals]

    spec = WalkingModelSpec(fs=fs, duration_s=duration, bouts=bouts,
                            noise_sd=0.0, noise_rho=rho)
    clean = synthesize_walk(spec, seed=seed)
    spec.noise_sd = ar1_sd_for_snr(clean.clean.samples,
                                   ~np.isnan(clean.truth_if), snr_db)
    result = synthesize_walk(spec, seed=seed)

    n = len(result.signal)
    rec = TriaxialRecord(x=baseline + result.signal.samples, y=np.zeros(n),
                         z=np.zeros(n), fs=fs)
    write_triaxial_csv(out_csv, rec)
    write_labels_csv(out_labels, result.bouts)
    click.echo(f"wrote {out_csv} ({n} samples at {fs:g} Hz, "
               f"noise sd {spec.noise_sd:.4f}) and {out_labels}")
    if out_truth is not None:
        t = result.signal.times
        with Path(out_truth).open("w", newline="") as fh:
            fh.write("time_s,truth_if_hz,truth_cadence_hz\n")
            for ti, fi in zip(t, result.truth_if):
                if np.isnan(fi):
                    fh.write(f"{ti:.12g},,\n")
                else:
                    fh.write(f"{ti:.12g},{fi:.12g},{2 * fi:.12g}\n")
        click.echo(f"wrote {out_truth}")


@cli.command("tfr")
@click.argument("input_csv", type=click.Path())
@click.option("--kind", type=click.Choice(_TFR_KINDS), default=KIND_DSSST,
              show_default=True, help="Which grid of the chain to export.")
@click.option("--format", "fmt", type=click.Choice(TFR_FORMATS), default="csv",
              show_default=True)
@click.option("-o", "--out", type=click.Path(), required=True,
              help="Output file path.")
@click.option("--start", type=float, default=None,
              help="Analyze from this time (seconds).")
@click.option("--end", type=float, default=None,
              help="Analyze up to this time (seconds).")
@_config_options
def tfr_cmd(input_csv, kind, fmt, out, start, end, config_path, band, **kw):
    """Compute one time-frequency grid of a recording and export it.

    Grids are materialized in full, so prefer a hop of several samples for
    long recordings.
    """
    cfg = _build_config(config_path, band, **kw)
    rec = load_triaxial_csv(input_csv, fs_hint=cfg.fs, location=cfg.location)
    i0 = 0 if start is None else max(0, int(round(start * rec.fs)))
    i1 = len(rec) if end is None else min(len(rec), int(round(end * rec.fs)))
    if i1 <= i0:
        raise DataFormatError("requested time range contains no samples")
    sliced = TriaxialRecord(x=rec.x[i0:i1], y=rec.y[i0:i1], z=rec.z[i0:i1],
                            fs=rec.fs, location=rec.location)
    sig = preprocess(sliced, t0=i0 / rec.fs)
    analysis = analyze_signal(sig, cfg, collect=(kind,))
    export_tfr(analysis_grid(analysis, kind), out, fmt)
    click.echo(f"wrote {out} ({analysis.n_frames} frames x "
               f"{analysis.fft_half + 1} bins, kind={kind})")


@cli.command()
@click.argument("trace_a", type=click.Path())
@click.argument("trace_b", type=click.Path())
@click.option("-o", "--out", type=click.Path(), default=None,
              help="Write the agreement statistics to this CSV.")
@click.option("--ci", is_flag=True,
              help="Append normal-theory 95% confidence-interval columns.")
def compare(trace_a, trace_b, out, ci):
    """Bland-Altman agreement between two cadence trace files."""
    a, _ = load_trace_csv(trace_a)
    b, _ = load_trace_csv(trace_b)
    stats = bland_altman(a, b)
    click.echo(f"n={stats.n} mean_diff={stats.mean_diff:.4f} "
               f"sd_diff={stats.sd_diff:.4f} "
               f"LoA=[{stats.loa_low:.4f}, {stats.loa_high:.4f}]")
    if ci:
        lo, hi = stats.mean_ci()
        click.echo(f"mean 95% CI=[{lo:.4f}, {hi:.4f}] "
                   f"LoA CI margin={stats.loa_ci_margin():.4f}")
    if out is not None:
        write_bland_altman_csv(out, stats, with_ci=ci)
        click.echo(f"wrote {out}")


def main(argv=None) -> int:
    """Entry point with the documented exit codes.

    0 success, 1 usage/config error, 2 data error, 3 internal error.
    """
    try:
        cli(args=argv, standalone_mode=False)
        return EXIT_OK
    except (ConfigError, ParameterError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_CONFIG
    except click.UsageError as exc:
        exc.show()
        return EXIT_CONFIG
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_INTERNAL
    except (DataFormatError, FileNotFoundError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except CadenceError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INTERNAL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
