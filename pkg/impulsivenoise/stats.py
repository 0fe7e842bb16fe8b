# First order statistics of the shot-noise process
#
# Cumulants follow Campbell's theorem for the baseband equivalent waveform
# γ(t) = K (e^{-at} - e^{-bt}):
#
#   κ_m = λ ⟨K^m⟩ ∫ γ(t)^m dt  (+ σ_n² for m = 2)
#
# Three density approximations are provided (Edgeworth, Middleton Class A,
# α-stable) with empirical pdf/ccdf estimators and the divergences used to
# compare them.
#
import math
import logging
import warnings

import numpy as np
from scipy.integrate import quad, trapezoid, IntegrationWarning
from scipy.special import betaln, comb, gammaln, kl_div, eval_hermitenorm
from scipy.stats import norm, poisson, kstat
from statsmodels.distributions.empirical_distribution import ECDF

from impulsivenoise.constant import (
    KL_FLOOR,
    QUAD_ABS_TOL,
    PDF_CLAMP_TOL,
    CLASS_A_WEIGHT_TOL,
    CLASS_A_MIN_TRUNCATION,
    PDF_MIN_SAMPLES,
    PDF_MIN_BINS,
)
from impulsivenoise.error import InvalidArgument, DegenerateVariance, NumericalFailure, InsufficientData
from impulsivenoise.trace import Trace

logger = logging.getLogger(__name__)
# logger.setLevel(logging.DEBUG)


# ##############################################################
# Parameter records
#
class ShotParams:
    """Shot-noise parameters in Campbell form.

    Args:
        lam: Poisson density per sample (0 gives pure Gaussian background)
        fall_a: decay rate a of the equivalent waveform
        rise_b: rise rate b > a
        k_moments: ⟨K^m⟩ for m = 1..M
        sigma_n_sq: background variance
    """

    def __init__(self, lam: float, fall_a: float, rise_b: float, k_moments, sigma_n_sq: float = 0.0):
        k_moments = [float(k) for k in k_moments]
        if lam < 0 or not math.isfinite(lam):
            raise InvalidArgument(f"density must be non negative, got {lam}")
        if not (fall_a > 0 and rise_b > fall_a):
            raise InvalidArgument(f"rates must satisfy 0 < a < b, got a={fall_a}, b={rise_b}")
        if sigma_n_sq < 0:
            raise InvalidArgument(f"background variance must be non negative, got {sigma_n_sq}")
        if len(k_moments) >= 2 and k_moments[1] < k_moments[0] ** 2:
            raise InvalidArgument(f"⟨K²⟩={k_moments[1]} is less than ⟨K⟩²={k_moments[0] ** 2}")
        if any(k < 0 for k in k_moments[1::2]):
            raise InvalidArgument("even amplitude moments must be non negative")
        self.lam = float(lam)
        self.fall_a = float(fall_a)
        self.rise_b = float(rise_b)
        self.k_moments = k_moments
        self.sigma_n_sq = float(sigma_n_sq)

    def __str__(self) -> str:
        return f"shot λ={self.lam:.6g}, a={self.fall_a:.6g}, b={self.rise_b:.6g}, σn²={self.sigma_n_sq:.6g}, {len(self.k_moments)} moments"

    def k_moment(self, m: int) -> float:
        if m < 1 or m > len(self.k_moments):
            raise InvalidArgument(f"amplitude moment of order {m} not available (1..{len(self.k_moments)})")
        return self.k_moments[m - 1]


class CumulantSet:
    """κ_1..κ_M. Skewness, kurtosis and Edgeworth expansions require M ≥ 4."""

    def __init__(self, kappa):
        self.kappa = [float(k) for k in kappa]
        if len(self.kappa) < 1:
            raise InvalidArgument("at least one cumulant is required")

    def __len__(self) -> int:
        return len(self.kappa)

    def __getitem__(self, m: int) -> float:
        # 1-based, κ_m
        if m < 1 or m > len(self.kappa):
            raise InvalidArgument(f"cumulant of order {m} not available (1..{len(self.kappa)})")
        return self.kappa[m - 1]

    def __str__(self) -> str:
        return "cumulants " + ", ".join(f"κ{i + 1}={k:.6g}" for i, k in enumerate(self.kappa))


class StableParams:
    """α-stable law with characteristic function exp(jξμ - |σξ|^α (1 - jβ sign(ξ) η))."""

    def __init__(self, alpha: float, beta: float, sigma: float, mu: float, clamped: bool = False):
        if not (0 < alpha <= 2):
            raise InvalidArgument(f"alpha must lie in (0, 2], got {alpha}")
        if not (-1 <= beta <= 1):
            raise InvalidArgument(f"beta must lie in [-1, 1], got {beta}")
        if not (sigma >= 0 and math.isfinite(sigma)):
            raise InvalidArgument(f"sigma must be non negative, got {sigma}")
        if not math.isfinite(mu):
            raise InvalidArgument(f"mu must be finite, got {mu}")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.sigma = float(sigma)
        self.mu = float(mu)
        self.clamped = clamped

    def __str__(self) -> str:
        return f"stable α={self.alpha:.4f}, β={self.beta:.4f}, σ={self.sigma:.6g}, μ={self.mu:.6g}" + (" (clamped)" if self.clamped else "")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "sigma": self.sigma, "mu": self.mu, "clamped": self.clamped}


class ClassAParams:
    """Middleton Class A, canonical normalization σ_m² = σ² (m/A + Γ′)/(1 + Γ′).

    When truncation_m is None the smallest cutoff (at least 10) whose Poisson
    weights sum to 1 within 10⁻⁶ is chosen.
    """

    def __init__(self, overlap_a: float, gamma_prime: float, sigma_sq: float, truncation_m: int | None = None, location: float = 0.0, degenerate: bool = False):
        if not overlap_a > 0:
            raise InvalidArgument(f"impulsive index A must be positive, got {overlap_a}")
        if not gamma_prime > 0:
            raise InvalidArgument(f"Γ′ must be positive, got {gamma_prime}")
        if not sigma_sq > 0:
            raise InvalidArgument(f"variance must be positive, got {sigma_sq}")
        if truncation_m is None:
            truncation_m = max(CLASS_A_MIN_TRUNCATION, int(poisson.ppf(1.0 - CLASS_A_WEIGHT_TOL / 10, overlap_a)) + 1)
        if truncation_m < CLASS_A_MIN_TRUNCATION:
            raise InvalidArgument(f"truncation must be at least {CLASS_A_MIN_TRUNCATION}, got {truncation_m}")
        if poisson.sf(truncation_m, overlap_a) > CLASS_A_WEIGHT_TOL:
            raise InvalidArgument(f"truncation {truncation_m} leaves more than {CLASS_A_WEIGHT_TOL} of the Poisson weights for A={overlap_a}")
        self.overlap_a = float(overlap_a)
        self.gamma_prime = float(gamma_prime)
        self.sigma_sq = float(sigma_sq)
        self.truncation_m = int(truncation_m)
        self.location = float(location)
        self.degenerate = degenerate

    def __str__(self) -> str:
        return f"class A A={self.overlap_a:.6g}, Γ′={self.gamma_prime:.6g}, σ²={self.sigma_sq:.6g}, M={self.truncation_m}" + (" (gaussian limit)" if self.degenerate else "")

    def weights(self) -> np.ndarray:
        return poisson.pmf(np.arange(self.truncation_m + 1), self.overlap_a)

    def variances(self) -> np.ndarray:
        m = np.arange(self.truncation_m + 1)
        return self.sigma_sq * (m / self.overlap_a + self.gamma_prime) / (1.0 + self.gamma_prime)

    def to_dict(self) -> dict:
        return {
            "overlap-a": self.overlap_a,
            "gamma-prime": self.gamma_prime,
            "sigma-sq": self.sigma_sq,
            "truncation-m": self.truncation_m,
            "location": self.location,
            "degenerate": self.degenerate,
        }


class Curve:
    """A function sampled on a grid: (grid, values) with optional histogram edges."""

    def __init__(self, grid, values, edges=None):
        self.grid = np.asarray(grid, dtype=np.float64)
        self.values = np.asarray(values, dtype=np.float64)
        self.edges = None if edges is None else np.asarray(edges, dtype=np.float64)
        if self.grid.shape != self.values.shape:
            raise InvalidArgument(f"grid and values differ in shape {self.grid.shape} != {self.values.shape}")

    def __len__(self) -> int:
        return len(self.grid)

    def widths(self) -> np.ndarray:
        if self.edges is not None:
            return np.diff(self.edges)
        if len(self.grid) < 2:
            return np.ones_like(self.grid)
        return np.gradient(self.grid)

    def integral(self) -> float:
        if self.edges is not None:
            return float(np.sum(self.values * np.diff(self.edges)))
        return float(trapezoid(self.values, self.grid))

    def same_grid(self, other: "Curve") -> bool:
        return self.grid.shape == other.grid.shape and np.array_equal(self.grid, other.grid)


# ##############################################################
# Cumulants
#
def waveform_power_integral(m: int, fall_a: float, rise_b: float) -> float:
    """∫₀^∞ (e^{-at} - e^{-bt})^m dt = B(m a/(b-a), m+1)/(b-a)."""
    d = rise_b - fall_a
    return math.exp(betaln(m * fall_a / d, m + 1) - math.log(d))


def cumulant(m: int, p: ShotParams, method: str = "beta") -> float:
    """κ_m of the shot noise plus background.

    method "binomial" expands (e^{-at} - e^{-bt})^m term by term; "beta" uses the
    equivalent Beta function form, which stays accurate for large m.
    """
    if int(m) != m or m < 1:
        raise InvalidArgument(f"cumulant order must be an integer >= 1, got {m}")
    m = int(m)
    km = p.k_moment(m)
    a, b = p.fall_a, p.rise_b
    if method == "binomial":
        integral = sum(comb(m, k, exact=True) * (-1) ** k / (a * (m - k) + b * k) for k in range(m + 1))
    elif method == "beta":
        integral = waveform_power_integral(m, a, b)
    else:
        raise InvalidArgument(f"unknown method {method}")
    kappa = p.lam * km * integral
    if m == 2:
        kappa = kappa + p.sigma_n_sq
    return kappa


def log_abs_cumulant(m: int, p: ShotParams) -> float:
    """ln|κ_m|, -inf when κ_m = 0."""
    if m == 2 and p.sigma_n_sq > 0:
        return math.log(cumulant(2, p))
    km = p.k_moment(m)
    if p.lam == 0 or km == 0:
        return -math.inf
    d = p.rise_b - p.fall_a
    return math.log(p.lam) + math.log(abs(km)) + betaln(m * p.fall_a / d, m + 1) - math.log(d)


def cumulants(p: ShotParams, order: int | None = None) -> CumulantSet:
    order = len(p.k_moments) if order is None else order
    return CumulantSet([cumulant(m, p) for m in range(1, order + 1)])


def skewness_kurtosis(c: CumulantSet) -> tuple:
    """(κ3/κ2^{3/2}, κ4/κ2²); the second value is the excess kurtosis."""
    if len(c) < 4:
        raise InvalidArgument(f"skewness and kurtosis need 4 cumulants, got {len(c)}")
    k2 = c[2]
    if k2 <= 0:
        raise DegenerateVariance(f"κ2 = {k2}")
    return c[3] / k2**1.5, c[4] / k2**2


def moments_from_cumulants(c: CumulantSet) -> np.ndarray:
    """Raw moments μ_1..μ_M from μ_m = Σ_{i=1}^{m} C(m-1, i-1) κ_i μ_{m-i}."""
    mu = [1.0]
    for m in range(1, len(c) + 1):
        mu.append(sum(comb(m - 1, i - 1, exact=True) * c[i] * mu[m - i] for i in range(1, m + 1)))
    return np.array(mu[1:])


def cumulants_from_moments(moments) -> CumulantSet:
    """Inverse of moments_from_cumulants."""
    mu = [1.0] + [float(v) for v in moments]
    kappa = []
    for m in range(1, len(mu)):
        k = mu[m] - sum(comb(m - 1, i - 1, exact=True) * kappa[i - 1] * mu[m - i] for i in range(1, m))
        kappa.append(k)
    return CumulantSet(kappa)


def empirical_cumulants(trace: Trace, order: int = 4) -> CumulantSet:
    """Unbiased k-statistics k_1..k_order (order ≤ 4)."""
    if trace.is_empty():
        raise InvalidArgument("empty trace")
    if not (1 <= order <= 4):
        raise InvalidArgument(f"k-statistics are available up to order 4, got {order}")
    return CumulantSet([float(kstat(trace.samples, n)) for n in range(1, order + 1)])


# ##############################################################
# Edgeworth
#
def edgeworth_pdf(x, c: CumulantSet, order: int = 3, clamp: bool = True):
    """Edgeworth density around the Gaussian with the mean and variance of c.

    order 1 is the Gaussian term, order 2 adds the κ3 correction, order 3 the κ4 and κ3² terms.
    With clamp, negative values are set to 0 and, on a grid, the result is renormalized.
    """
    if order not in (1, 2, 3):
        raise InvalidArgument(f"order must be 1, 2 or 3, got {order}")
    if len(c) < min(4, order + 1):
        raise InvalidArgument(f"order {order} needs {min(4, order + 1)} cumulants, got {len(c)}")
    if c[2] <= 0:
        raise DegenerateVariance(f"κ2 = {c[2]}")
    sigma = math.sqrt(c[2])
    x = np.asarray(x, dtype=np.float64)
    nu = (x - c[1]) / sigma
    phi = norm.pdf(nu)
    series = np.ones_like(nu)
    if order >= 2:
        g1 = c[3] / sigma**3
        series = series + g1 / 6.0 * eval_hermitenorm(3, nu)
    if order >= 3:
        g2 = c[4] / sigma**4
        series = series + g2 / 24.0 * eval_hermitenorm(4, nu) + g1 * g1 / 72.0 * eval_hermitenorm(6, nu)
    f = phi * series / sigma if order > 1 else phi / sigma
    if clamp and np.any(f < 0):
        f = np.clip(f, 0.0, None)
        if f.ndim == 1 and len(f) > 1:
            total = trapezoid(f, x)
            if total > 0:
                f = f / total
        logger.debug("edgeworth density clamped")
    return float(f) if f.ndim == 0 else f


# ##############################################################
# Middleton Class A
#
def class_a_pdf(x, p: ClassAParams):
    x = np.asarray(x, dtype=np.float64)
    s = np.sqrt(p.variances())
    f = np.sum(p.weights() * norm.pdf(x[..., None] - p.location, scale=s), axis=-1)
    return float(f) if f.ndim == 0 else f


def class_a_ccdf(x, p: ClassAParams):
    x = np.asarray(x, dtype=np.float64)
    s = np.sqrt(p.variances())
    f = np.sum(p.weights() * norm.sf(x[..., None] - p.location, scale=s), axis=-1)
    return float(f) if f.ndim == 0 else f


def class_a_kurtosis(p: ClassAParams) -> float:
    """E[x⁴]/E[x²]² of the truncated mixture."""
    w, v = p.weights(), p.variances()
    return float(3.0 * np.sum(w * v * v) / np.sum(w * v) ** 2)


# ##############################################################
# α-stable
#
def _eta(alpha: float, u):
    # u = |ξ|
    if alpha == 2:
        return np.zeros_like(u)
    if alpha == 1:
        with np.errstate(divide="ignore"):
            return np.where(u > 0, -(2.0 / math.pi) * np.log(np.where(u > 0, u, 1.0)), 0.0)
    return np.full_like(u, math.tan(math.pi * alpha / 2.0))


def stable_cf(xi, p: StableParams):
    xi = np.asarray(xi, dtype=np.float64)
    u = np.abs(xi)
    power = (p.sigma * u) ** p.alpha
    value = np.exp(1j * xi * p.mu - power * (1.0 - 1j * p.beta * np.sign(xi) * _eta(p.alpha, u)))
    return complex(value) if value.ndim == 0 else value


def _phase(u: float, p: StableParams) -> float:
    # phase term β η(ξ) |σξ|^α in the standardized variable u = σξ > 0
    return p.beta * float(_eta(p.alpha, np.asarray(u / p.sigma))) * u**p.alpha


def _fourier_integral(fc, fs, z: float, what: str, diagnostics: dict) -> float:
    """∫₀^∞ fc(u) cos(uz) + fs(u) sin(uz) du, oscillatory tail handled by QUADPACK's Fourier routine."""
    if z < 0:
        z = -z
        fs_pos = fs
        fs = lambda u: -fs_pos(u)  # noqa: E731
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            head, err = quad(lambda u: fc(u) * math.cos(u * z) + fs(u) * math.sin(u * z), 0.0, 1.0, epsabs=QUAD_ABS_TOL / 4, limit=200)
            if z == 0:
                tail, err2 = quad(fc, 1.0, np.inf, epsabs=QUAD_ABS_TOL / 4, limit=200)
            else:
                tail_c, err2 = quad(fc, 1.0, np.inf, weight="cos", wvar=z, epsabs=QUAD_ABS_TOL / 4, limlst=100)
                tail_s, err3 = quad(fs, 1.0, np.inf, weight="sin", wvar=z, epsabs=QUAD_ABS_TOL / 4, limlst=100)
                tail = tail_c + tail_s
        except (IntegrationWarning, ZeroDivisionError) as e:
            diagnostics = dict(diagnostics)
            diagnostics["reason"] = str(e).splitlines()[0] if str(e) else type(e).__name__
            raise NumericalFailure(f"{what} quadrature did not converge", diagnostics=diagnostics)
    return head + tail


def _check_stable_scale(p: StableParams):
    if p.sigma == 0:
        raise InvalidArgument("stable law with σ = 0 is a point mass, it has no density")


def stable_pdf(x, p: StableParams):
    """Density by Fourier inversion of stable_cf, one adaptive quadrature per point."""
    _check_stable_scale(p)
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        z = (xi - p.mu) / p.sigma
        diagnostics = {"x": float(xi), "alpha": p.alpha, "beta": p.beta}
        if p.beta == 0:
            value = _fourier_integral(lambda u: math.exp(-(u**p.alpha)), lambda u: 0.0, z, "stable pdf", diagnostics)
        else:
            value = _fourier_integral(
                lambda u: math.exp(-(u**p.alpha)) * math.cos(_phase(u, p)),
                lambda u: math.exp(-(u**p.alpha)) * math.sin(_phase(u, p)),
                z,
                "stable pdf",
                diagnostics,
            )
        value = value / (math.pi * p.sigma)
        if value < -PDF_CLAMP_TOL:
            raise NumericalFailure("stable pdf is negative", diagnostics=dict(diagnostics, value=value))
        out[i] = max(value, 0.0)
    return float(out[0]) if np.ndim(x) == 0 else out


def stable_ccdf(x, p: StableParams):
    """P(X > x) by Gil-Pelaez inversion of stable_cf."""
    _check_stable_scale(p)
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        z = (xi - p.mu) / p.sigma
        diagnostics = {"x": float(xi), "alpha": p.alpha, "beta": p.beta}
        # Im[e^{-juz} φ] / u = e^{-u^α} (cos(uz) sin B - sin(uz) cos B) / u
        value = _fourier_integral(
            lambda u: math.exp(-(u**p.alpha)) * math.sin(_phase(u, p)) / u,
            lambda u: -math.exp(-(u**p.alpha)) * math.cos(_phase(u, p)) / u,
            z,
            "stable ccdf",
            diagnostics,
        )
        out[i] = min(1.0, max(0.0, 0.5 + value / math.pi))
    return float(out[0]) if np.ndim(x) == 0 else out


# ##############################################################
# Empirical estimators
#
def empirical_pdf(trace: Trace, bins: int, value_range: tuple | None = None) -> Curve:
    """Histogram density, integrating to 1 over its bins."""
    if trace.is_empty():
        raise InvalidArgument("empty trace")
    if len(trace) < PDF_MIN_SAMPLES:
        raise InsufficientData(f"histogram density needs at least {PDF_MIN_SAMPLES} samples, got {len(trace)}")
    if bins < PDF_MIN_BINS:
        raise InvalidArgument(f"at least {PDF_MIN_BINS} bins are required, got {bins}")
    samples = trace.samples
    if value_range is not None:
        samples = samples[(samples >= value_range[0]) & (samples <= value_range[1])]
    values, edges = np.histogram(samples, bins=bins, range=value_range, density=True)
    return Curve(grid=(edges[:-1] + edges[1:]) / 2.0, values=values, edges=edges)


def empirical_ccdf(trace: Trace, grid=None) -> Curve:
    """Tail function P(X > x), on the sorted distinct sample values unless a grid is given."""
    if trace.is_empty():
        raise InvalidArgument("empty trace")
    ecdf = ECDF(trace.samples)
    grid = np.unique(trace.samples) if grid is None else np.asarray(grid, dtype=np.float64)
    return Curve(grid=grid, values=1.0 - ecdf(grid))


def kl_divergence(p: Curve, q: Curve) -> float:
    """Generalized divergence Σ (p ln(p/q) - p + q) Δx, q floored at 10⁻¹².

    Every term is non negative. The sum equals Σ p ln(p/q) Δx when p and q
    carry the same mass on the grid.
    """
    if not p.same_grid(q):
        raise InvalidArgument("densities are not on the same grid")
    qf = np.maximum(q.values, KL_FLOOR)
    return float(np.sum(kl_div(np.maximum(p.values, 0.0), qf) * p.widths()))


def mse_tail(e: Curve, m: Curve) -> float:
    if not e.same_grid(m):
        raise InvalidArgument("tail functions are not on the same grid")
    return float(np.mean((e.values - m.values) ** 2))


# ##############################################################
# Convergence of the cumulant series
#
class ConvergenceReport:
    """Ratio-test diagnostics of the cumulant series.

    z_ratio: |z_{k+1}/z_k|, k = 0..m_max-1, for the binomial terms of κ_{m_max}
    kappa_ratio: |κ_{m+1}/((m+1) κ_m)|, m = 1..m_max-1 (0 when κ_{m+1} = 0, nan when only κ_m = 0)
    log_scaled_kappa: ln|κ_m/m!|, m = 1..m_max
    inverse_radius: root-test estimate |κ_m/m!|^{1/m} at the last non-zero order
    """

    def __init__(self, z_ratio, kappa_ratio, log_scaled_kappa, inverse_radius: float):
        self.z_ratio = np.asarray(z_ratio)
        self.kappa_ratio = np.asarray(kappa_ratio)
        self.log_scaled_kappa = np.asarray(log_scaled_kappa)
        self.inverse_radius = inverse_radius

    def to_dict(self) -> dict:
        return {
            "z-ratio": [float(v) for v in self.z_ratio],
            "kappa-ratio": [float(v) for v in self.kappa_ratio],
            "log-scaled-kappa": [float(v) for v in self.log_scaled_kappa],
            "inverse-radius": float(self.inverse_radius),
        }


def cumulant_convergence_diagnostics(p: ShotParams, m_max: int) -> ConvergenceReport:
    """All quantities are evaluated in log space, any m_max up to the number of amplitude moments."""
    if m_max < 2:
        raise InvalidArgument(f"m_max must be at least 2, got {m_max}")
    if m_max > len(p.k_moments):
        raise InvalidArgument(f"m_max={m_max} exceeds the {len(p.k_moments)} amplitude moments available")
    a, b = p.fall_a, p.rise_b
    m = m_max
    k = np.arange(m)
    z_ratio = (m - k) / (k + 1.0) * (a * m + (b - a) * k) / (a * m + (b - a) * (k + 1))

    log_kappa = np.array([log_abs_cumulant(i, p) for i in range(1, m_max + 1)])
    log_scaled = log_kappa - gammaln(np.arange(1, m_max + 1) + 1.0)

    kappa_ratio = np.empty(m_max - 1)
    for i in range(1, m_max):
        num, den = log_kappa[i], log_kappa[i - 1]  # κ_{i+1}, κ_i
        if num == -math.inf:
            kappa_ratio[i - 1] = 0.0
        elif den == -math.inf:
            kappa_ratio[i - 1] = math.nan
        else:
            kappa_ratio[i - 1] = math.exp(num - math.log(i + 1.0) - den)

    finite = np.nonzero(np.isfinite(log_scaled))[0]
    inverse_radius = math.exp(log_scaled[finite[-1]] / (finite[-1] + 1)) if len(finite) > 0 else 0.0
    return ConvergenceReport(z_ratio=z_ratio, kappa_ratio=kappa_ratio, log_scaled_kappa=log_scaled, inverse_radius=inverse_radius)
