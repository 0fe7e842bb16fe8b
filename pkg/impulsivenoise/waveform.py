# Single random transient impulses
#
# An impulse is an AR(2) process driven by heteroscedastic white noise:
#
#   U_t = phi1 U_{t-1} + phi2 U_{t-2} + ϑ_t W_t,  U_{-1} = U_{-2} = 0,
#
# where ϑ_t is a log-normal shaped envelope. Time is a dimensionless sample index
# and all frequencies are normalized to [0, 0.5] cycles/sample.
#
import math
import cmath
import logging
from enum import Enum

import numpy as np
from scipy.signal import lfilter, freqz
from scipy.stats import lognorm

from impulsivenoise.constant import REPEATED_ROOT_TOL, NEGATIVE_DISCRIMINANT_TOL, ENVELOPE_DECAY_RATIO
from impulsivenoise.error import InvalidArgument
from impulsivenoise.trace import Trace

logger = logging.getLogger(__name__)
# logger.setLevel(logging.DEBUG)


# ##############################################################
# Stationarity
#
class STATIONARITY(Enum):
    STATIONARY = "stationary"
    UPPER_LEFT = "phi2 - phi1 < 1"
    UPPER_RIGHT = "phi2 + phi1 < 1"
    BOTTOM = "|phi2| < 1"


class Stationarity:
    """Verdict of the stationarity triangle test.

    margin is the Euclidean distance to the nearest side of the triangle,
    positive inside, negative (or zero on a side) when a condition is violated.
    """

    def __init__(self, violated: list, margin: float):
        self.violated = violated
        self.margin = margin

    @property
    def stationary(self) -> bool:
        return len(self.violated) == 0

    @property
    def verdict(self) -> STATIONARITY:
        return STATIONARITY.STATIONARY if self.stationary else self.violated[0]

    def __bool__(self) -> bool:
        return self.stationary

    def __str__(self) -> str:
        if self.stationary:
            return f"stationary (margin {self.margin:.6g})"
        return "violated: " + ", ".join(v.value for v in self.violated) + f" (margin {self.margin:.6g})"


def check_stationarity(phi1: float, phi2: float) -> Stationarity:
    if not (math.isfinite(phi1) and math.isfinite(phi2)):
        raise InvalidArgument(f"AR coefficients must be finite, got ({phi1}, {phi2})")
    slacks = [
        (STATIONARITY.UPPER_LEFT, (1.0 - (phi2 - phi1)) / math.sqrt(2.0)),
        (STATIONARITY.UPPER_RIGHT, (1.0 - (phi2 + phi1)) / math.sqrt(2.0)),
        (STATIONARITY.BOTTOM, 1.0 - abs(phi2)),
    ]
    violated = [c for c, s in slacks if s <= 0]
    margin = min(s for c, s in slacks)
    return Stationarity(violated=violated, margin=margin)


def _roots(phi1: float, phi2: float) -> tuple:
    # Roots of 1 - phi1 r - phi2 r^2 = 0, largest modulus first.
    if phi2 == 0:
        if phi1 == 0:
            return tuple()
        return (complex(1.0 / phi1),)
    a, b, c = -phi2, -phi1, 1.0
    s = cmath.sqrt(b * b - 4.0 * a * c)
    # pick the sign that avoids cancellation
    if b * s.real >= 0:
        q = -(b + s) / 2.0
    else:
        q = -(b - s) / 2.0
    r = [q / a, c / q] if q != 0 else [s / (2.0 * a), -s / (2.0 * a)]
    return tuple(sorted(r, key=lambda z: (-abs(z), -z.imag)))


def roots_outside_unit_circle(phi1: float, phi2: float) -> bool:
    """Root-magnitude stationarity test, equivalent to the triangle test."""
    return all(abs(r) > 1.0 for r in _roots(phi1, phi2))


class ArCoefficients:
    """The pair (phi1, phi2) of a stationary AR(2) process."""

    def __init__(self, phi1: float, phi2: float):
        verdict = check_stationarity(phi1, phi2)
        if not verdict:
            raise InvalidArgument(f"AR coefficients ({phi1}, {phi2}) are not stationary: {verdict}")
        self.phi1 = float(phi1)
        self.phi2 = float(phi2)

    def __str__(self) -> str:
        return f"AR(2) phi1={self.phi1}, phi2={self.phi2}"

    @property
    def discriminant(self) -> float:
        return self.phi1 * self.phi1 + 4.0 * self.phi2

    def has_complex_roots(self) -> bool:
        return self.discriminant < -NEGATIVE_DISCRIMINANT_TOL

    def has_repeated_root(self) -> bool:
        r = _roots(self.phi1, self.phi2)
        if len(r) != 2:
            return False
        return abs(r[0] - r[1]) <= REPEATED_ROOT_TOL * max(abs(r[0]), abs(r[1]))

    def polynomial(self) -> list:
        # denominator of the transfer function, for scipy.signal
        return [1.0, -self.phi1, -self.phi2]


def characteristic_roots(ar: ArCoefficients) -> tuple:
    """Roots of 1 - phi1 r - phi2 r^2.

    Returns two roots, largest modulus first (positive imaginary part first for a conjugate pair),
    a single root 1/phi1 when phi2 = 0, and no root at all for white noise (0, 0).
    """
    return _roots(ar.phi1, ar.phi2)


def resonant_frequency(ar: ArCoefficients) -> float | None:
    if not ar.has_complex_roots():
        return None
    return math.acos(ar.phi1 / (2.0 * math.sqrt(-ar.phi2))) / (2.0 * math.pi)


# ##############################################################
# Envelope
#
class EnvelopeParams:
    """Log-normal shaped standard deviation of the innovations.

    theta0 = 0 is accepted and gives a silent impulse.
    """

    def __init__(self, theta0: float, mu_t: float, sigma_t: float):
        if not all(math.isfinite(v) for v in (theta0, mu_t, sigma_t)):
            raise InvalidArgument("envelope parameters must be finite")
        if theta0 < 0:
            raise InvalidArgument(f"theta0 must be non negative, got {theta0}")
        if sigma_t <= 0:
            raise InvalidArgument(f"sigma_t must be positive, got {sigma_t}")
        self.theta0 = float(theta0)
        self.mu_t = float(mu_t)
        self.sigma_t = float(sigma_t)

    def __str__(self) -> str:
        return f"envelope theta0={self.theta0}, mu_t={self.mu_t}, sigma_t={self.sigma_t}"

    def mode(self) -> float:
        return math.exp(self.mu_t - self.sigma_t**2)


def innovation_std(t, env: EnvelopeParams):
    """ϑ_t = theta0 times the log-normal density at t, with ϑ_0 = 0.

    Accepts an integer or an array of integers.
    """
    t = np.asarray(t)
    if np.any(t < 0):
        raise InvalidArgument("sample index must be non negative")
    theta = env.theta0 * lognorm.pdf(t.astype(np.float64), env.sigma_t, scale=math.exp(env.mu_t))
    theta = np.where(t == 0, 0.0, theta)
    return float(theta) if theta.ndim == 0 else theta


def envelope(env: EnvelopeParams, length: int) -> np.ndarray:
    return innovation_std(np.arange(length), env)


def innovation_variance(env: EnvelopeParams, length: int) -> float:
    """Variance of ε_t = ϑ_t W_t averaged over the impulse, i.e. the mean of ϑ_t²."""
    theta = envelope(env, length)
    return float(np.mean(theta**2))


class ImpulseConfig:
    def __init__(self, ar: ArCoefficients, envelope: EnvelopeParams, length: int):
        if int(length) != length or length < 3:
            raise InvalidArgument(f"impulse length must be an integer >= 3, got {length}")
        self.ar = ar
        self.envelope = envelope
        self.length = int(length)
        if not self.envelope_decayed():
            logger.warning(f"envelope has not decayed after {self.length} samples (ϑ end > {ENVELOPE_DECAY_RATIO} × peak), impulses are truncated")

    def __str__(self) -> str:
        return f"impulse {self.ar}, {self.envelope}, length {self.length}"

    def envelope_decayed(self) -> bool:
        if self.envelope.theta0 == 0:
            return True
        peak = float(np.max(envelope(self.envelope, self.length + 1)))
        return innovation_std(self.length, self.envelope) < ENVELOPE_DECAY_RATIO * peak


def impulse_samples(cfg: ImpulseConfig, rng: np.random.Generator) -> np.ndarray:
    """Raw impulse as an array; draws cfg.length standard normals from rng."""
    w = rng.standard_normal(cfg.length)
    eps = envelope(cfg.envelope, cfg.length) * w
    return lfilter([1.0], cfg.ar.polynomial(), eps)


def generate_impulse(cfg: ImpulseConfig, rng: np.random.Generator, sample_rate: float = 1.0) -> Trace:
    return Trace(impulse_samples(cfg, rng), sample_rate=sample_rate)


def simulate_ar2(ar: ArCoefficients, n: int, rng: np.random.Generator, sigma: float = 1.0, burn_in: int = 1000) -> Trace:
    """Homoscedastic AR(2) run of n samples with innovation standard deviation sigma; the first burn_in samples are dropped."""
    w = rng.standard_normal(n + burn_in) * sigma
    return Trace(lfilter([1.0], ar.polynomial(), w)[burn_in:])


# ##############################################################
# Second order properties
#
def theoretical_acf(ar: ArCoefficients, k):
    """Autocorrelation ρ_k of the stationary AR(2) process, for an integer lag or an array of lags."""
    k = np.asarray(k)
    if np.any(k < 0):
        raise InvalidArgument("lag must be non negative")
    phi1, phi2 = ar.phi1, ar.phi2

    if phi2 == 0:
        rho = np.where(k == 0, 1.0, phi1 ** k.astype(np.float64))
    elif ar.has_complex_roots():
        radius = math.sqrt(-phi2)
        omega = 2.0 * math.pi * resonant_frequency(ar)
        varsigma = math.atan2(((1.0 - phi2) / (1.0 + phi2)) * math.sin(omega), math.cos(omega))
        rho = radius ** k.astype(np.float64) * np.sin(omega * k + varsigma) / math.sin(varsigma)
    elif ar.has_repeated_root():
        g = phi1 / 2.0
        rho = (1.0 + k * (1.0 + phi2) / (1.0 - phi2)) * g ** k.astype(np.float64)
    else:
        r = characteristic_roots(ar)
        g1, g2 = 1.0 / r[0], 1.0 / r[1]
        kk = k.astype(np.complex128)
        num = (1.0 - g2 * g2) * g1 ** (kk + 1) - (1.0 - g1 * g1) * g2 ** (kk + 1)
        rho = (num / ((g1 - g2) * (1.0 + g1 * g2))).real
    rho = np.where(k == 0, 1.0, rho)
    return float(rho) if rho.ndim == 0 else rho


def ar_psd(coefficients, sigma_sq: float, f) -> np.ndarray:
    """σ²/|1 - Σ φ_k e^{-j2πfk}|², two-sided density on normalized frequencies f, any AR order."""
    if sigma_sq < 0:
        raise InvalidArgument(f"innovation variance must be non negative, got {sigma_sq}")
    f = np.atleast_1d(np.asarray(f, dtype=np.float64))
    _, h = freqz([1.0], np.concatenate(([1.0], -np.asarray(coefficients, dtype=np.float64))), worN=f, fs=1.0)
    return sigma_sq * np.abs(h) ** 2


def ar2_psd(ar: ArCoefficients, sigma_theta_sq: float, f) -> np.ndarray:
    return ar_psd([ar.phi1, ar.phi2], sigma_theta_sq, f)


# ##############################################################
# Deterministic equivalent waveform
#
class EquivalentWaveformParams:
    """K (e^{-at} - e^{-bt}), optionally modulated by cos(2π f0 t + phase)."""

    def __init__(self, amplitude_k: float, fall_a: float, rise_b: float, resonant_f0: float | None = None, phase: float = 0.0):
        if not (fall_a > 0 and rise_b > 0):
            raise InvalidArgument(f"rates must be positive, got a={fall_a}, b={rise_b}")
        if not rise_b > fall_a:
            raise InvalidArgument(f"rise rate b={rise_b} must exceed fall rate a={fall_a}")
        if resonant_f0 is not None and not (0 < resonant_f0 < 0.5):
            raise InvalidArgument(f"resonant frequency must lie in (0, 0.5), got {resonant_f0}")
        self.amplitude_k = float(amplitude_k)
        self.fall_a = float(fall_a)
        self.rise_b = float(rise_b)
        self.resonant_f0 = resonant_f0
        self.phase = float(phase)

    def __str__(self) -> str:
        s = f"K={self.amplitude_k}, a={self.fall_a}, b={self.rise_b}"
        return s if self.resonant_f0 is None else s + f", f0={self.resonant_f0}, phase={self.phase}"

    @classmethod
    def from_ar(cls, ar: ArCoefficients, amplitude_k: float | None = None) -> "EquivalentWaveformParams":
        """Baseband waveform whose samples γ(t) equal the AR(2) impulse response delayed by one sample.

        Requires two distinct real roots greater than 1. Default K is 1/(G_slow - G_fast), G = 1/r.
        """
        r = characteristic_roots(ar)
        if len(r) != 2 or ar.has_complex_roots() or ar.has_repeated_root() or any(z.real <= 0 for z in r):
            raise InvalidArgument(f"{ar} has no baseband equivalent waveform (needs two distinct real positive roots)")
        g_slow, g_fast = 1.0 / r[1].real, 1.0 / r[0].real
        if amplitude_k is None:
            amplitude_k = 1.0 / (g_slow - g_fast)
        return cls(amplitude_k=amplitude_k, fall_a=-math.log(g_slow), rise_b=-math.log(g_fast))

    def energy(self) -> float:
        """∫ γ² dt of the baseband waveform."""
        a, b = self.fall_a, self.rise_b
        return self.amplitude_k**2 * (1.0 / (2.0 * a) - 2.0 / (a + b) + 1.0 / (2.0 * b))


def equivalent_waveform(p: EquivalentWaveformParams, t):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise InvalidArgument("time must be non negative")
    g = p.amplitude_k * (np.exp(-p.fall_a * t) - np.exp(-p.rise_b * t))
    if p.resonant_f0 is not None:
        g = g * np.cos(2.0 * math.pi * p.resonant_f0 * t + p.phase)
    return float(g) if g.ndim == 0 else g
