# Second order statistics
#
# Every Psd handed out is one-sided by default: densities on f in [0, 0.5]
# whose grid integral is the process variance, the same normalization as the
# Welch periodogram. Closed forms accept sides=TWO_SIDED for the textbook
# density, half as large, whose integral over [-0.5, 0.5] is the variance.
#
import math
import logging

import numpy as np
from scipy.signal import welch
from statsmodels.regression.linear_model import burg, yule_walker
from statsmodels.tsa.stattools import acf

from impulsivenoise.constant import DC_MASS_COMMENT, PSD_HEADER, FLOAT_FORMAT, AR_METHOD
from impulsivenoise.error import InvalidArgument, NumericalFailure, DegenerateVariance, IngestionError
from impulsivenoise.trace import Trace
from impulsivenoise.stats import ShotParams
from impulsivenoise.waveform import ar_psd

logger = logging.getLogger(__name__)
# logger.setLevel(logging.DEBUG)

DEFAULT_SEGMENT = 4096
DEFAULT_OVERLAP = 0.5
DEFAULT_WINDOW = "hann"

TWO_SIDED = "two"
ONE_SIDED = "one"


class Psd:
    """Power spectral density on a grid of normalized frequencies.

    dc_impulse_mass is the weight of the δ(f) term at f = 0, kept out of values.
    """

    def __init__(self, frequencies, values, dc_impulse_mass: float = 0.0, sides: str = ONE_SIDED):
        self.frequencies = np.asarray(frequencies, dtype=np.float64).reshape(-1)
        self.values = np.asarray(values, dtype=np.float64).reshape(-1)
        if self.frequencies.shape != self.values.shape:
            raise InvalidArgument("frequencies and values differ in length")
        if len(self.frequencies) > 1 and not np.all(np.diff(self.frequencies) > 0):
            raise InvalidArgument("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise InvalidArgument("power densities must be finite and non negative")
        if dc_impulse_mass < 0:
            raise InvalidArgument(f"DC mass must be non negative, got {dc_impulse_mass}")
        if sides not in (TWO_SIDED, ONE_SIDED):
            raise InvalidArgument(f"sides must be '{TWO_SIDED}' or '{ONE_SIDED}', got {sides}")
        self.dc_impulse_mass = float(dc_impulse_mass)
        self.sides = sides

    def __len__(self) -> int:
        return len(self.frequencies)

    def one_sided(self) -> "Psd":
        if self.sides == ONE_SIDED:
            return self
        return Psd(self.frequencies, 2.0 * self.values, dc_impulse_mass=self.dc_impulse_mass, sides=ONE_SIDED)

    def total_power(self) -> float:
        """Rectangle-rule integral over the grid, bin width taken from the grid spacing."""
        if len(self.frequencies) < 2:
            return 0.0
        return float(np.sum(self.values) * (self.frequencies[1] - self.frequencies[0]))

    def peak_frequency(self) -> float:
        return float(self.frequencies[int(np.argmax(self.values))])

    def to_csv(self, filename: str):
        with open(filename, "w", newline="") as fp:
            fp.write(f"{DC_MASS_COMMENT}{format(self.dc_impulse_mass, FLOAT_FORMAT)}\n")
            fp.write(f"# sides = {self.sides}\n")
            fp.write(",".join(PSD_HEADER) + "\n")
            for f, v in zip(self.frequencies, self.values):
                fp.write(f"{format(float(f), FLOAT_FORMAT)},{format(float(v), FLOAT_FORMAT)}\n")
        logger.info(f"wrote {len(self)} frequencies to {filename}")

    @staticmethod
    def from_csv(filename: str) -> "Psd":
        dc, sides, freqs, vals = 0.0, ONE_SIDED, [], []
        with open(filename, "r") as fp:
            for row_number, line in enumerate(fp, start=1):
                line = line.strip()
                if line.startswith(DC_MASS_COMMENT):
                    dc = float(line[len(DC_MASS_COMMENT) :])
                elif line.startswith("# sides = "):
                    sides = line.split("=", 1)[1].strip()
                elif line == ",".join(PSD_HEADER) or line.startswith("#"):
                    continue
                else:
                    try:
                        f, v = line.split(",")
                        freqs.append(float(f))
                        vals.append(float(v))
                    except ValueError:
                        raise IngestionError(f"invalid line {line!r}", filename=filename, row=row_number)
        return Psd(freqs, vals, dc_impulse_mass=dc, sides=sides)


def welch_grid(segment: int = DEFAULT_SEGMENT) -> np.ndarray:
    return np.fft.rfftfreq(segment)


# ##############################################################
# Closed forms
#
def dc_impulse_mass(p: ShotParams) -> float:
    """Weight of the δ(f) line: the squared mean (λ⟨K⟩(b-a)/(ab))².

    Reading the line as the full second moment E[I²] instead would count the
    continuous part twice; this is the only place where the choice is made.
    """
    a, b = p.fall_a, p.rise_b
    return (p.lam * p.k_moment(1) * (b - a) / (a * b)) ** 2


def _lorentzian_product(f, fall_a: float, rise_b: float) -> np.ndarray:
    w2 = (2.0 * math.pi * np.asarray(f, dtype=np.float64)) ** 2
    return (rise_b - fall_a) ** 2 / ((fall_a**2 + w2) * (rise_b**2 + w2))


def _sampled_product(f, fall_a: float, rise_b: float) -> np.ndarray:
    # |Σ_n (e^{-an} - e^{-bn}) e^{-iωn}|², the waveform sampled at n = 0, 1, 2...
    c = np.cos(2.0 * math.pi * np.asarray(f, dtype=np.float64))
    g_slow, g_fast = math.exp(-fall_a), math.exp(-rise_b)
    return (g_slow - g_fast) ** 2 / ((1.0 - 2.0 * g_slow * c + g_slow**2) * (1.0 - 2.0 * g_fast * c + g_fast**2))


def gamma_psd(f, k2: float, fall_a: float, rise_b: float, sides: str = ONE_SIDED) -> Psd:
    """|Γ(ω)|² of the equivalent waveform, ⟨K²⟩(b-a)²/((a²+ω²)(b²+ω²)) two-sided, twice that one-sided."""
    if not (fall_a > 0 and rise_b > 0):
        raise InvalidArgument(f"rates must be positive, got a={fall_a}, b={rise_b}")
    return _sided(Psd(f, k2 * _lorentzian_product(f, fall_a, rise_b), sides=TWO_SIDED), sides)


def carson_psd(f, p: ShotParams, sampled: bool = False, sides: str = ONE_SIDED) -> Psd:
    """Carson's theorem: λ⟨K²⟩(b-a)²/((a²+ω²)(b²+ω²)) + σ_n² two-sided, with the DC line carried separately.

    The one-sided default doubles the whole continuous part, background included.
    With sampled=True the waveform transform is the one of its samples γ(0), γ(1)...,
    which is periodic in f and is the spectrum of a simulated trace, aliasing included.
    """
    shape = _sampled_product(f, p.fall_a, p.rise_b) if sampled else _lorentzian_product(f, p.fall_a, p.rise_b)
    values = p.lam * p.k_moment(2) * shape + p.sigma_n_sq
    return _sided(Psd(f, values, dc_impulse_mass=dc_impulse_mass(p), sides=TWO_SIDED), sides)


def _sided(psd: Psd, sides: str) -> Psd:
    if sides not in (TWO_SIDED, ONE_SIDED):
        raise InvalidArgument(f"sides must be '{TWO_SIDED}' or '{ONE_SIDED}', got {sides}")
    return psd.one_sided() if sides == ONE_SIDED else psd


# ##############################################################
# Estimators
#
def periodogram(trace: Trace, segment: int = DEFAULT_SEGMENT, overlap: float = DEFAULT_OVERLAP, window: str = DEFAULT_WINDOW) -> Psd:
    """One-sided Welch estimate, rescaled so that its grid integral is the trace mean power."""
    if segment < 2 or segment > len(trace):
        raise InvalidArgument(f"segment {segment} must lie in [2, {len(trace)}]")
    if not (0 <= overlap < 1):
        raise InvalidArgument(f"overlap must lie in [0, 1), got {overlap}")
    if segment & (segment - 1) != 0:
        logger.debug(f"segment {segment} is not a power of two")
    freqs, values = welch(
        trace.samples,
        fs=1.0,
        window=window,
        nperseg=segment,
        noverlap=int(overlap * segment),
        detrend=False,
        return_onesided=True,
        scaling="density",
    )
    psd = Psd(freqs, values, sides=ONE_SIDED)
    total = psd.total_power()
    if total > 0:
        psd.values = psd.values * (trace.mean_power() / total)
    return psd


class ArEstimate:
    """Parametric AR fit: coefficients φ_1..φ_p, innovation variance and the implied one-sided PSD."""

    def __init__(self, coefficients, innovation_variance: float, psd: Psd, method: str):
        self.coefficients = np.asarray(coefficients, dtype=np.float64)
        self.innovation_variance = float(innovation_variance)
        self.psd = psd
        self.method = method

    def __str__(self) -> str:
        return f"{self.method} AR({len(self.coefficients)}) {np.round(self.coefficients, 6).tolist()}, σ²={self.innovation_variance:.6g}"

    def roots(self) -> np.ndarray:
        # roots of 1 - Σ φ_k z^k
        return np.polynomial.polynomial.polyroots(np.concatenate(([1.0], -self.coefficients)))

    def is_minimum_phase(self) -> bool:
        return bool(np.all(np.abs(self.roots()) > 1.0))


def burg_estimate(trace: Trace, order: int, frequencies=None, method: str = AR_METHOD.BURG.value) -> ArEstimate:
    """AR(order) fit by Burg's recursion (or Yule-Walker) and its spectrum."""
    if order < 1:
        raise InvalidArgument(f"order must be at least 1, got {order}")
    if len(trace) < 10 * order:
        raise InvalidArgument(f"AR({order}) needs at least {10 * order} samples, got {len(trace)}")
    x = trace.samples
    if np.ptp(x) == 0:
        raise NumericalFailure("constant trace has no AR spectrum", diagnostics={"samples": len(x), "value": float(x[0])})
    if method == AR_METHOD.BURG.value:
        coefficients, sigma2 = burg(x, order=order, demean=True)
    elif method == AR_METHOD.YULE_WALKER.value:
        coefficients, sigma = yule_walker(x, order=order, method="mle", demean=True)
        sigma2 = sigma**2
    else:
        raise InvalidArgument(f"unknown AR method {method}")
    if not np.all(np.isfinite(coefficients)) or not sigma2 > 0:
        raise NumericalFailure("AR estimation failed", diagnostics={"method": method, "order": order})
    frequencies = welch_grid() if frequencies is None else frequencies
    estimate = ArEstimate(coefficients, sigma2, Psd(frequencies, ar_psd(coefficients, float(sigma2), frequencies), sides=TWO_SIDED).one_sided(), method)
    if not estimate.is_minimum_phase():
        raise NumericalFailure("estimated AR polynomial is not minimum phase", diagnostics={"method": method, "roots": np.abs(estimate.roots()).min()})
    logger.debug(f"{estimate}")
    return estimate


def empirical_acf(trace: Trace, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelation ρ̂_0..ρ̂_max_lag, ρ̂_0 = 1."""
    if max_lag < 0 or max_lag >= len(trace):
        raise InvalidArgument(f"max lag must lie in [0, {len(trace) - 1}], got {max_lag}")
    if np.ptp(trace.samples) == 0:
        raise DegenerateVariance("constant trace has no autocorrelation")
    return acf(trace.samples, nlags=max_lag, adjusted=False, fft=True)
