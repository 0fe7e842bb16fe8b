# Command line front-end
#
# impulsivenoise simulate --config paper_vi.cfg --out-dir out
# impulsivenoise analyze --trace out/trace.csv
# impulsivenoise psd --trace out/trace.csv --config paper_vi.cfg
# impulsivenoise fit --trace out/trace.csv
#
import os
import sys
import math
import logging
import argparse

import numpy as np

from impulsivenoise import __NAME__, __version__, __COPYRIGHT__, FORMAT, LOGFILE, set_logging_level
from impulsivenoise.constant import (
    Config,
    FlatConfig,
    flatten,
    flat_value,
    yaml,
    CONFIG_KW,
    FIELD_KW,
    IMPULSE_KW,
    SHOT_KW,
    ANALYSIS_KW,
    OUTPUT_KW,
    METADATA_KW,
    AR_METHOD,
    DEFAULT_VALUES,
    ROOT_DEBUG,
    IMPULSIVENOISE_HOME,
    RESOURCES_FOLDER,
    REFERENCE_CONFIG_FILE,
    TRACE_FILE,
    SIDECAR_EXT,
    STATS_FILE,
    PDF_FILE,
    CCDF_FILE,
    PSD_WELCH_FILE,
    PSD_BURG_FILE,
    PSD_CARSON_FILE,
    FIT_FILE,
    FLOAT_FORMAT,
    UNIT_LENGTH,
)
from impulsivenoise.error import ImpulsiveNoiseError, ConfigError, InvalidArgument, EXIT_OK, EXIT_IO
from impulsivenoise.trace import Trace
from impulsivenoise.waveform import ArCoefficients, EnvelopeParams, ImpulseConfig
from impulsivenoise.field import FieldConfig, simulate
from impulsivenoise.stats import ShotParams, empirical_cumulants, moments_from_cumulants, skewness_kurtosis, empirical_pdf, empirical_ccdf
from impulsivenoise.spectral import periodogram, burg_estimate, carson_psd
from impulsivenoise.fit import compare_fits

logger = logging.getLogger(__name__)
# logger.setLevel(logging.DEBUG)

REFERENCE_CONFIG = os.path.join(IMPULSIVENOISE_HOME, RESOURCES_FOLDER, REFERENCE_CONFIG_FILE)


# ##############################################################
# Run configuration
#
class RunConfig:
    """Validated content of a configuration file.

    field and shot are optional; commands that need them say so.
    """

    def __init__(self, field: FieldConfig | None, shot: ShotParams | None, analysis: dict, output_directory: str, seed: int, filename: str | None = None):
        self.field = field
        self.shot = shot
        self.analysis = analysis
        self.output_directory = output_directory
        self.seed = seed
        self.filename = filename

    def analysis_value(self, kw: ANALYSIS_KW):
        return self.analysis.get(kw.value, DEFAULT_VALUES[kw.value])

    @staticmethod
    def from_file(filename: str, kind: type = Config) -> "RunConfig":
        """Reads a YAML configuration, or a flat sidecar with kind=FlatConfig."""
        if not os.path.exists(filename):
            raise ConfigError("file not found", filename=filename)
        try:
            config = kind(filename)
        except Exception as e:  # ruamel raises many parser error types
            raise ConfigError(f"cannot parse: {e}", filename=filename)
        if not config.is_valid():
            raise ConfigError("not a mapping", filename=filename)
        return RunConfig.from_config(config)

    @staticmethod
    def from_config(config: Config) -> "RunConfig":
        reader = _Reader(config)
        seed = reader.integer(None, CONFIG_KW.SEED, minimum=0, default=DEFAULT_VALUES[CONFIG_KW.SEED.value])
        if seed >= 2**64:
            raise reader.error(None, CONFIG_KW.SEED, "must fit in 64 bits")

        field = None
        if CONFIG_KW.FIELD.value in config:
            if CONFIG_KW.IMPULSE.value not in config:
                raise reader.error(None, CONFIG_KW.IMPULSE, "section is required with a field section")
            impulse = reader.impulse()
            field = reader.field(impulse, seed)

        shot = reader.shot() if CONFIG_KW.SHOT.value in config else None

        analysis = {}
        s = CONFIG_KW.ANALYSIS
        if s.value in config:
            reader.section(s)
            analysis[ANALYSIS_KW.BINS.value] = reader.integer(s, ANALYSIS_KW.BINS, minimum=16, default=DEFAULT_VALUES[ANALYSIS_KW.BINS.value])
            analysis[ANALYSIS_KW.SEGMENT.value] = reader.integer(s, ANALYSIS_KW.SEGMENT, minimum=2, default=DEFAULT_VALUES[ANALYSIS_KW.SEGMENT.value])
            analysis[ANALYSIS_KW.OVERLAP.value] = reader.real(s, ANALYSIS_KW.OVERLAP, low=0.0, high=1.0, high_open=True, default=DEFAULT_VALUES[ANALYSIS_KW.OVERLAP.value])
            analysis[ANALYSIS_KW.ORDER.value] = reader.integer(s, ANALYSIS_KW.ORDER, minimum=1, default=DEFAULT_VALUES[ANALYSIS_KW.ORDER.value])
            analysis[ANALYSIS_KW.METHOD.value] = reader.choice(s, ANALYSIS_KW.METHOD, [m.value for m in AR_METHOD], default=DEFAULT_VALUES[ANALYSIS_KW.METHOD.value])
            analysis[ANALYSIS_KW.FIT_STABLE.value] = reader.boolean(s, ANALYSIS_KW.FIT_STABLE, default=DEFAULT_VALUES[ANALYSIS_KW.FIT_STABLE.value])
            analysis[ANALYSIS_KW.FIT_CLASS_A.value] = reader.boolean(s, ANALYSIS_KW.FIT_CLASS_A, default=DEFAULT_VALUES[ANALYSIS_KW.FIT_CLASS_A.value])
            analysis[ANALYSIS_KW.TAIL_POINTS.value] = reader.integer(s, ANALYSIS_KW.TAIL_POINTS, minimum=2, default=DEFAULT_VALUES[ANALYSIS_KW.TAIL_POINTS.value])

        output_directory = DEFAULT_VALUES[OUTPUT_KW.DIRECTORY.value]
        if CONFIG_KW.OUTPUT.value in config:
            reader.section(CONFIG_KW.OUTPUT)
            output_directory = str(reader.value(CONFIG_KW.OUTPUT, OUTPUT_KW.DIRECTORY, default=output_directory))

        return RunConfig(field=field, shot=shot, analysis=analysis, output_directory=output_directory, seed=seed, filename=config.filename)

    def to_dict(self) -> dict:
        """Plain document with the same sections as the configuration file."""
        d = {CONFIG_KW.SEED.value: self.seed}
        if self.field is not None:
            f = self.field
            im = f.impulse
            d[CONFIG_KW.FIELD.value] = {
                FIELD_KW.LAMBDA_R.value: f.lambda_r,
                FIELD_KW.LAMBDA_T.value: f.lambda_t,
                FIELD_KW.MEAN_ENERGY.value: f.mean_energy,
                FIELD_KW.GAMMA_RATIO.value: f.gamma_ratio,
                FIELD_KW.TRACE_LENGTH.value: f.trace_length,
                FIELD_KW.UNIT_LENGTH.value: f.unit_length,
                FIELD_KW.SAMPLE_RATE.value: f.sample_rate,
            }
            d[CONFIG_KW.IMPULSE.value] = {
                IMPULSE_KW.PHI1.value: im.ar.phi1,
                IMPULSE_KW.PHI2.value: im.ar.phi2,
                IMPULSE_KW.THETA0.value: im.envelope.theta0,
                IMPULSE_KW.MU_T.value: im.envelope.mu_t,
                IMPULSE_KW.SIGMA_T.value: im.envelope.sigma_t,
                IMPULSE_KW.LENGTH.value: im.length,
            }
        if self.shot is not None:
            s = self.shot
            d[CONFIG_KW.SHOT.value] = {
                SHOT_KW.LAMBDA.value: s.lam,
                SHOT_KW.FALL_A.value: s.fall_a,
                SHOT_KW.RISE_B.value: s.rise_b,
                SHOT_KW.K_MOMENTS.value: list(s.k_moments),
                SHOT_KW.SIGMA_N_SQ.value: s.sigma_n_sq,
            }
        if len(self.analysis) > 0:
            d[CONFIG_KW.ANALYSIS.value] = dict(self.analysis)
        d[CONFIG_KW.OUTPUT.value] = {OUTPUT_KW.DIRECTORY.value: self.output_directory}
        return d

    def shot_params(self, sigma_n_sq: float | None = None) -> ShotParams | None:
        """Explicit shot section first, else the closed-form view of the field, else None."""
        if self.shot is not None:
            return self.shot
        if self.field is not None:
            try:
                return self.field.shot_params(sigma_n_sq=sigma_n_sq)
            except InvalidArgument as e:
                logger.warning(f"no closed-form spectrum for this field: {e}")
        return None


class _Reader:
    """Reads typed fields from a Config and reports errors with file, line and field path."""

    def __init__(self, config: Config):
        self.config = config

    def error(self, section, key, message: str) -> ConfigError:
        s = section.value if section is not None else None
        k = key.value if key is not None else None
        path = k if s is None else (s if k is None else f"{s}.{k}")
        line = self.config.line_of(s, k) if s is not None else self.config.line_of(k)
        if line is None and s is not None:
            line = self.config.line_of(s)
        return ConfigError(message, filename=self.config.filename, line=line, field=path)

    def section(self, section):
        node = self.config.get(section.value)
        if not isinstance(node, dict):
            raise self.error(section, None, "section must be a mapping")
        return node

    def value(self, section, key, default=None, required: bool = False):
        node = self.config.store if section is None else self.section(section)
        if key.value not in node:
            if required:
                raise self.error(section, key, f"missing required field '{key.value}'")
            return default
        return node[key.value]

    def real(self, section, key, low=None, high=None, low_open=False, high_open=False, default=None, required=False) -> float | None:
        v = self.value(section, key, default=default, required=required)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise self.error(section, key, f"expected a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            raise self.error(section, key, f"must be finite, got {v}")
        if low is not None and (v < low or (low_open and v == low)):
            raise self.error(section, key, f"must be {'>' if low_open else '>='} {low}, got {v}")
        if high is not None and (v > high or (high_open and v == high)):
            raise self.error(section, key, f"must be {'<' if high_open else '<='} {high}, got {v}")
        return v

    def integer(self, section, key, minimum=None, default=None, required=False) -> int | None:
        v = self.value(section, key, default=default, required=required)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.error(section, key, f"expected an integer, got {v!r}")
        if minimum is not None and v < minimum:
            raise self.error(section, key, f"must be >= {minimum}, got {v}")
        return int(v)

    def boolean(self, section, key, default=None) -> bool:
        v = self.value(section, key, default=default)
        if not isinstance(v, bool):
            raise self.error(section, key, f"expected true or false, got {v!r}")
        return v

    def choice(self, section, key, choices: list, default=None) -> str:
        v = self.value(section, key, default=default)
        if v not in choices:
            raise self.error(section, key, f"must be one of {', '.join(choices)}, got {v!r}")
        return v

    def impulse(self) -> ImpulseConfig:
        s = CONFIG_KW.IMPULSE
        self.section(s)
        phi1 = self.real(s, IMPULSE_KW.PHI1, required=True)
        phi2 = self.real(s, IMPULSE_KW.PHI2, required=True)
        try:
            ar = ArCoefficients(phi1, phi2)
        except InvalidArgument as e:
            raise self.error(s, IMPULSE_KW.PHI2, str(e))
        envelope = EnvelopeParams(
            theta0=self.real(s, IMPULSE_KW.THETA0, low=0.0, default=DEFAULT_VALUES[IMPULSE_KW.THETA0.value]),
            mu_t=self.real(s, IMPULSE_KW.MU_T, required=True),
            sigma_t=self.real(s, IMPULSE_KW.SIGMA_T, low=0.0, low_open=True, required=True),
        )
        length = self.integer(s, IMPULSE_KW.LENGTH, minimum=3, required=True)
        return ImpulseConfig(ar=ar, envelope=envelope, length=length)

    def field(self, impulse: ImpulseConfig, seed: int) -> FieldConfig:
        s = CONFIG_KW.FIELD
        self.section(s)
        trace_length = self.integer(s, FIELD_KW.TRACE_LENGTH, minimum=1, required=True)
        if trace_length < 10 * impulse.length:
            raise self.error(s, FIELD_KW.TRACE_LENGTH, f"must be at least 10 × impulse length ({10 * impulse.length}), got {trace_length}")
        return FieldConfig(
            lambda_r=self.real(s, FIELD_KW.LAMBDA_R, low=0.0, low_open=True, required=True),
            lambda_t=self.real(s, FIELD_KW.LAMBDA_T, low=0.0, low_open=True, required=True),
            mean_energy=self.real(s, FIELD_KW.MEAN_ENERGY, low=0.0, low_open=True, required=True),
            gamma_ratio=self.real(s, FIELD_KW.GAMMA_RATIO, low=0.0, high=1.0, low_open=True, high_open=True, required=True),
            trace_length=trace_length,
            impulse=impulse,
            seed=seed,
            unit_length=self.integer(s, FIELD_KW.UNIT_LENGTH, minimum=1, default=UNIT_LENGTH),
            sample_rate=self.real(s, FIELD_KW.SAMPLE_RATE, low=0.0, low_open=True, default=DEFAULT_VALUES[FIELD_KW.SAMPLE_RATE.value]),
        )

    def shot(self) -> ShotParams:
        s = CONFIG_KW.SHOT
        self.section(s)
        moments = self.value(s, SHOT_KW.K_MOMENTS, required=True)
        if not isinstance(moments, list) or len(moments) < 2 or not all(isinstance(m, (int, float)) and not isinstance(m, bool) for m in moments):
            raise self.error(s, SHOT_KW.K_MOMENTS, "expected a list of at least 2 numbers")
        try:
            return ShotParams(
                lam=self.real(s, SHOT_KW.LAMBDA, low=0.0, required=True),
                fall_a=self.real(s, SHOT_KW.FALL_A, low=0.0, low_open=True, required=True),
                rise_b=self.real(s, SHOT_KW.RISE_B, low=0.0, low_open=True, required=True),
                k_moments=moments,
                sigma_n_sq=self.real(s, SHOT_KW.SIGMA_N_SQ, low=0.0, default=0.0),
            )
        except InvalidArgument as e:
            raise self.error(s, None, str(e))


# ##############################################################
# Output helpers
#
def _plain(value):
    # numpy scalars and tuples into YAML friendly values
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def write_yaml(data: dict, filename: str):
    with open(filename, "w") as fp:
        yaml.dump(_plain(data), fp)
    logger.info(f"wrote {filename}")


def write_flat(data: dict, filename: str):
    with open(filename, "w") as fp:
        for key, value in flatten(_plain(data)).items():
            fp.write(f"{key} = {flat_value(value)}\n")
    logger.info(f"wrote {filename}")


def write_curve(grid, values, header: str, filename: str):
    with open(filename, "w", newline="") as fp:
        fp.write(header + "\n")
        for x, y in zip(grid, values):
            fp.write(f"{format(float(x), FLOAT_FORMAT)},{format(float(y), FLOAT_FORMAT)}\n")
    logger.info(f"wrote {filename}")


def sidecar_name(trace_file: str) -> str:
    return os.path.splitext(trace_file)[0] + SIDECAR_EXT


def read_trace(filename: str) -> tuple:
    """Trace and the RunConfig of its sidecar, if there is one."""
    run = None
    sidecar = sidecar_name(filename)
    if os.path.exists(sidecar):
        run = RunConfig.from_file(sidecar, kind=FlatConfig)
    sample_rate = run.field.sample_rate if run is not None and run.field is not None else 1.0
    seed = run.seed if run is not None else None
    return Trace.from_csv(filename, sample_rate=sample_rate, seed=seed), run


def _output_directory(args, run: RunConfig | None) -> str:
    d = args.out_dir if args.out_dir is not None else (run.output_directory if run is not None else DEFAULT_VALUES[OUTPUT_KW.DIRECTORY.value])
    os.makedirs(d, exist_ok=True)
    return d


def _load_config(args, filename: str | None = None) -> RunConfig | None:
    filename = args.config if args.config is not None else filename
    if filename is None:
        return None
    run = RunConfig.from_file(filename)
    if getattr(args, "seed", None) is not None:
        run.seed = args.seed
        if run.field is not None:
            run.field = run.field.with_seed(args.seed)
    return run


def _option(args, name: str, run: RunConfig | None, kw: ANALYSIS_KW):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return run.analysis_value(kw) if run is not None else DEFAULT_VALUES[kw.value]


# ##############################################################
# Commands
#
def cmd_simulate(args) -> int:
    run = _load_config(args, REFERENCE_CONFIG)
    if run.field is None:
        raise ConfigError("a field and an impulse section are required to simulate", filename=run.filename)
    out = _output_directory(args, run)
    logger.info(f"simulating {run.field}")
    trace = simulate(run.field)
    trace_file = os.path.join(out, TRACE_FILE)
    trace.to_csv(trace_file)
    metadata = run.to_dict()
    metadata[CONFIG_KW.METADATA.value] = {
        METADATA_KW.NAME.value: __NAME__,
        METADATA_KW.VERSION.value: __version__,
        METADATA_KW.SAMPLES.value: len(trace),
        METADATA_KW.TRACE.value: TRACE_FILE,
        "impulses": len(trace.meta.get("arrivals", [])),
        "sigma-n-sq": trace.meta.get("sigma_n_sq"),
    }
    write_flat(metadata, sidecar_name(trace_file))
    return EXIT_OK


def cmd_analyze(args) -> int:
    trace, sidecar = read_trace(args.trace)
    run = _load_config(args) or sidecar
    out = _output_directory(args, run)
    bins = _option(args, "bins", run, ANALYSIS_KW.BINS)
    x = trace.samples
    variance = float(np.var(x))
    stats = {
        "trace": os.path.basename(args.trace),
        "sample-count": len(trace),
        "mean": float(np.mean(x)),
        "variance": variance,
        "degenerate": variance == 0,
    }
    if variance > 0 and len(trace) >= 4:
        k = empirical_cumulants(trace, 4)
        skewness, excess = skewness_kurtosis(k)
        stats["cumulants"] = k.kappa
        stats["moments"] = moments_from_cumulants(k).tolist()
        stats["skewness"] = skewness
        stats["kurtosis"] = excess + 3.0
        stats["excess-kurtosis"] = excess
    else:
        logger.warning("trace has zero variance, skewness and kurtosis are undefined")
        stats["skewness"] = None
        stats["kurtosis"] = None
    pdf = empirical_pdf(trace, bins)
    ccdf = empirical_ccdf(trace)
    stats["pdf"] = {"file": PDF_FILE, "bins": bins, "low": float(pdf.edges[0]), "high": float(pdf.edges[-1])}
    stats["ccdf"] = {"file": CCDF_FILE, "points": len(ccdf)}
    write_curve(pdf.grid, pdf.values, "x,density", os.path.join(out, PDF_FILE))
    write_curve(ccdf.grid, ccdf.values, "x,ccdf", os.path.join(out, CCDF_FILE))
    write_yaml(stats, os.path.join(out, STATS_FILE))
    return EXIT_OK


def cmd_psd(args) -> int:
    trace, sidecar = read_trace(args.trace)
    run = _load_config(args) or sidecar
    out = _output_directory(args, run)
    segment = _option(args, "segment", run, ANALYSIS_KW.SEGMENT)
    order = _option(args, "order", run, ANALYSIS_KW.ORDER)
    overlap = run.analysis_value(ANALYSIS_KW.OVERLAP) if run is not None else DEFAULT_VALUES[ANALYSIS_KW.OVERLAP.value]
    method = run.analysis_value(ANALYSIS_KW.METHOD) if run is not None else DEFAULT_VALUES[ANALYSIS_KW.METHOD.value]

    welch = periodogram(trace, segment=segment, overlap=overlap)
    welch.to_csv(os.path.join(out, PSD_WELCH_FILE))
    ar = burg_estimate(trace, order, frequencies=welch.frequencies, method=method)
    ar.psd.to_csv(os.path.join(out, PSD_BURG_FILE))
    logger.info(f"{ar}, peak at f={ar.psd.peak_frequency():.6g}")
    if run is not None:
        sigma_n_sq = None
        if sidecar is not None and run is sidecar:
            sigma_n_sq = _sidecar_sigma_n_sq(args.trace)
        shot = run.shot_params(sigma_n_sq=sigma_n_sq)
        if shot is not None:
            # sampled transform, aliasing included, to overlay the Welch estimate
            carson_psd(welch.frequencies, shot, sampled=True).to_csv(os.path.join(out, PSD_CARSON_FILE))
    return EXIT_OK


def _sidecar_sigma_n_sq(trace_file: str) -> float | None:
    config = FlatConfig(sidecar_name(trace_file))
    metadata = config.get(CONFIG_KW.METADATA.value)
    v = metadata.get("sigma-n-sq") if isinstance(metadata, dict) else None
    return float(v) if isinstance(v, (int, float)) else None


def cmd_fit(args) -> int:
    trace, sidecar = read_trace(args.trace)
    run = _load_config(args) or sidecar
    out = _output_directory(args, run)
    bins = _option(args, "bins", run, ANALYSIS_KW.BINS)
    tail_points = run.analysis_value(ANALYSIS_KW.TAIL_POINTS) if run is not None else DEFAULT_VALUES[ANALYSIS_KW.TAIL_POINTS.value]
    families = ["stable", "class-a"]
    if run is not None:
        families = [f for f, kw in zip(families, [ANALYSIS_KW.FIT_STABLE, ANALYSIS_KW.FIT_CLASS_A]) if run.analysis_value(kw)]
    report = compare_fits(trace, bins=bins, tail_points=tail_points, families=families)
    d = report.to_dict()
    d["trace"] = os.path.basename(args.trace)
    write_yaml(d, os.path.join(out, FIT_FILE))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "psd": cmd_psd,
    "fit": cmd_fit,
}


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=__NAME__, description="Impulsive noise simulation and analysis")
    p.add_argument("--version", action="version", version=f"{__NAME__} {__version__}")
    p.add_argument("--debug", default=ROOT_DEBUG, help="comma-separated logger names to set to debug")
    p.add_argument("--log-file", default=LOGFILE, help="also append log to this file")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate a trace (bundled configuration by default)")
    s.add_argument("--config", help="YAML configuration file")
    s.add_argument("--seed", type=int, help="overrides the configuration seed")
    s.add_argument("--out-dir", help="output directory")

    for name, text in (("analyze", "amplitude statistics of a trace"), ("psd", "power spectra of a trace"), ("fit", "compare stable and Class A fits")):
        c = sub.add_parser(name, help=text)
        c.add_argument("--trace", required=True, help="CSV trace with header index,value")
        c.add_argument("--config", help="YAML configuration file (defaults to the trace sidecar)")
        c.add_argument("--seed", type=int, help="overrides the configuration seed")
        c.add_argument("--out-dir", help="output directory")
        if name in ("analyze", "fit"):
            c.add_argument("--bins", type=int, help="histogram bins")
        if name == "psd":
            c.add_argument("--segment", type=int, help="Welch segment length")
            c.add_argument("--order", type=int, help="AR model order")
    return p


def main(argv: list | None = None) -> int:
    args = parser().parse_args(argv)

    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(level=logging.INFO, format=FORMAT)
    if args.debug:
        set_logging_level(args.debug)

    handler = None
    try:
        if args.log_file is not None:
            handler = logging.FileHandler(args.log_file, mode="a")
            handler.setFormatter(logging.Formatter(FORMAT))
            root.addHandler(handler)
        logger.info(f"{__NAME__.title()} {__version__} {__COPYRIGHT__}")
        return COMMANDS[args.command](args)
    except ImpulsiveNoiseError as e:
        logger.error(f"{args.command}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_IO
    finally:
        if handler is not None:
            root.removeHandler(handler)
            handler.close()


if __name__ == "__main__":
    sys.exit(main())
