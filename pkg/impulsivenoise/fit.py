# Fitting α-stable and Middleton Class A laws to amplitude samples
#
import math
import logging

import numpy as np
from scipy.optimize import bisect, minimize
from scipy.special import logsumexp
from scipy.stats import linregress, norm

from impulsivenoise import all_subclasses
from impulsivenoise.constant import (
    KOUTROUVELIS_ALPHA_GRID,
    KOUTROUVELIS_ALPHA_STEP,
    KOUTROUVELIS_BETA_GRID,
    KOUTROUVELIS_BETA_STEP,
    KOUTROUVELIS_MAX_ITER,
    KOUTROUVELIS_TOL,
    STABLE_MIN_SAMPLES,
    CLASS_A_MIN_SAMPLES,
    CLASS_A_A_BOUNDS,
    CLASS_A_GAMMA_BOUNDS,
    CLASS_A_ML_SAMPLES,
    CLASS_A_GAUSSIAN_GAMMA,
    FIT_MIN_SAMPLES,
    PDF_RANGE_QUANTILE,
    TAIL_START_QUANTILE,
    TAIL_POINTS,
)
from impulsivenoise.error import InsufficientData, ModelMismatch, DegenerateVariance
from impulsivenoise.trace import Trace
from impulsivenoise.stats import (
    StableParams,
    ClassAParams,
    Curve,
    stable_pdf,
    stable_ccdf,
    class_a_pdf,
    class_a_ccdf,
    empirical_pdf,
    empirical_ccdf,
    kl_divergence,
    mse_tail,
)

logger = logging.getLogger(__name__)
# logger.setLevel(logging.DEBUG)

ALPHA_MIN = 0.1  # lower clamp of the regression estimate


# ##############################################################
# Samplers
#
def sample_stable(p: StableParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Chambers-Mallows-Stuck transform of uniform and exponential variates."""
    if p.alpha == 2:
        return rng.normal(p.mu, math.sqrt(2.0) * p.sigma, size=n)
    v = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=n)
    w = rng.exponential(1.0, size=n)
    if p.alpha == 1:
        half_pi_bv = math.pi / 2.0 + p.beta * v
        x = (2.0 / math.pi) * (half_pi_bv * np.tan(v) - p.beta * np.log((math.pi / 2.0) * w * np.cos(v) / half_pi_bv))
        shift = (2.0 / math.pi) * p.beta * p.sigma * math.log(p.sigma) if p.sigma > 0 else 0.0
        return p.sigma * x + shift + p.mu
    t = p.beta * math.tan(math.pi * p.alpha / 2.0)
    b = math.atan(t) / p.alpha
    s = (1.0 + t * t) ** (1.0 / (2.0 * p.alpha))
    x = s * np.sin(p.alpha * (v + b)) / np.cos(v) ** (1.0 / p.alpha) * (np.cos(v - p.alpha * (v + b)) / w) ** ((1.0 - p.alpha) / p.alpha)
    return p.sigma * x + p.mu


def sample_class_a(p: ClassAParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Poisson number of active interferers, then a Gaussian of the matching variance."""
    m = rng.poisson(p.overlap_a, size=n)
    variance = p.sigma_sq * (m / p.overlap_a + p.gamma_prime) / (1.0 + p.gamma_prime)
    return p.location + rng.standard_normal(n) * np.sqrt(variance)


# ##############################################################
# α-stable, characteristic function regression
#
def _ecf(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.array([complex(np.mean(np.cos(u * z)), np.mean(np.sin(u * z))) for u in t])


def _regress(z: np.ndarray) -> tuple:
    # one pass on standardized samples, returns (alpha, beta, sigma, mu) of z
    t = math.pi * np.arange(1, KOUTROUVELIS_ALPHA_GRID + 1) / KOUTROUVELIS_ALPHA_STEP
    modulus = np.abs(_ecf(z, t))
    ok = (modulus > 0) & (modulus < 1)
    if np.count_nonzero(ok) < 2:
        return 2.0, 0.0, 1.0, 0.0  # no spread detected at these frequencies
    fit = linregress(np.log(t[ok]), np.log(-np.log(modulus[ok] ** 2)))
    alpha = fit.slope
    alpha_c = min(max(alpha, ALPHA_MIN), 2.0)
    sigma = (math.exp(fit.intercept) / 2.0) ** (1.0 / alpha_c)

    u = math.pi * np.arange(1, KOUTROUVELIS_BETA_GRID + 1) / KOUTROUVELIS_BETA_STEP
    phase = np.angle(_ecf(z, u))
    if abs(alpha_c - 1.0) < 1e-6:
        skew_column = -(2.0 / math.pi) * sigma * u * np.log(u)
    else:
        skew_column = sigma**alpha_c * math.tan(math.pi * alpha_c / 2.0) * u**alpha_c
    if alpha_c >= 2.0 - 1e-3:
        beta = 0.0
        mu = float(np.dot(u, phase) / np.dot(u, u))
    else:
        coefficients, *_ = np.linalg.lstsq(np.column_stack([u, skew_column]), phase, rcond=None)
        mu, beta = float(coefficients[0]), float(coefficients[1])
    return alpha, beta, sigma, mu


def estimate_stable(samples) -> StableParams:
    """Koutrouvelis regression on the empirical characteristic function.

    Samples are standardized by median and half inter-quartile range, then
    re-standardized by the current estimate until scale and location settle.
    α comes from log(-log|φ̂(t)|²) = log(2σ^α) + α log t on t_k = πk/25,
    β and μ from the phase of φ̂ on u_l = πl/50.
    """
    x = np.asarray(samples, dtype=np.float64).reshape(-1)
    if len(x) < STABLE_MIN_SAMPLES:
        raise InsufficientData(f"stable estimation needs at least {STABLE_MIN_SAMPLES} samples, got {len(x)}")
    q25, q50, q75 = np.percentile(x, [25, 50, 75])
    scale = (q75 - q25) / 2.0
    if scale <= 0:
        scale = float(np.std(x))
    if scale <= 0:
        logger.warning("constant samples, stable law degenerates to a point mass")
        return StableParams(alpha=2.0, beta=0.0, sigma=0.0, mu=float(q50))
    loc = q50
    alpha, beta = 2.0, 0.0
    for iteration in range(KOUTROUVELIS_MAX_ITER):
        alpha, beta, sigma_z, mu_z = _regress((x - loc) / scale)
        alpha_c = min(max(alpha, ALPHA_MIN), 2.0)
        beta_c = min(max(beta, -1.0), 1.0)
        if abs(alpha_c - 1.0) < 1e-6:
            loc = loc + scale * mu_z - (2.0 / math.pi) * beta_c * scale * sigma_z * math.log(scale)
        else:
            loc = loc + scale * mu_z
        scale = scale * sigma_z
        logger.debug(f"iteration {iteration}: α={alpha:.4f}, β={beta:.4f}, σ={scale:.6g}, μ={loc:.6g}")
        if abs(sigma_z - 1.0) < KOUTROUVELIS_TOL and abs(mu_z) < KOUTROUVELIS_TOL:
            break
    alpha_c = min(max(alpha, ALPHA_MIN), 2.0)
    beta_c = min(max(beta, -1.0), 1.0)
    clamped = alpha_c != alpha or beta_c != beta
    if clamped:
        logger.info(f"stable estimate clamped from α={alpha:.4f}, β={beta:.4f}")
    return StableParams(alpha=alpha_c, beta=beta_c, sigma=scale, mu=loc, clamped=clamped)


# ##############################################################
# Class A, method of moments refined by maximum likelihood
#
def estimate_class_a(samples) -> ClassAParams:
    """Method of moments on the normalized even moments, then maximum likelihood.

    With ε = E[x⁴]/(3σ⁴) - 1 = 1/(A(1+Γ′)²), Γ′ is fixed by A, and
    E[x⁶]/(15σ⁶) = 1 + 3ε + ε^{3/2}/√A is decreasing in A, so A is found by
    bisection on [10⁻³, 20]. The moment estimate is the starting
    point of refine_class_a.
    """
    x = np.asarray(samples, dtype=np.float64).reshape(-1)
    n = len(x)
    if n < CLASS_A_MIN_SAMPLES:
        raise InsufficientData(f"Class A estimation needs at least {CLASS_A_MIN_SAMPLES} samples, got {n}")
    location = float(np.mean(x))
    y = x - location
    m2 = float(np.mean(y**2))
    if m2 <= 0:
        raise ModelMismatch("samples have zero variance")
    m4 = float(np.mean(y**4)) / m2**2
    m6 = float(np.mean(y**6)) / m2**3
    if m4 - 3.0 <= 3.0 * math.sqrt(24.0 / n):
        raise ModelMismatch(f"samples are not leptokurtic (kurtosis {m4:.4f}), Class A does not apply")
    eps = m4 / 3.0 - 1.0
    target = m6 / 15.0

    def residual(a):
        return 1.0 + 3.0 * eps + eps**1.5 / math.sqrt(a) - target

    lo, hi = CLASS_A_A_BOUNDS
    hi = min(hi, (1.0 - 1e-9) / eps)
    if hi <= lo or residual(lo) <= 0:
        overlap_a = lo
        logger.warning(f"sixth moment out of reach, A clamped to {overlap_a}")
    elif residual(hi) >= 0:
        overlap_a = hi
        logger.warning(f"sixth moment out of reach, A clamped to {overlap_a:.6g}")
    else:
        overlap_a = bisect(residual, lo, hi, xtol=1e-12)
    gamma_prime = max(1.0 / math.sqrt(overlap_a * eps) - 1.0, CLASS_A_GAMMA_BOUNDS[0])
    logger.debug(f"class A moments: kurtosis {m4:.4f}, sixth moment {m6:.4f}, A={overlap_a:.6g}, Γ′={gamma_prime:.6g}")
    moments = ClassAParams(overlap_a=overlap_a, gamma_prime=gamma_prime, sigma_sq=m2, location=location)
    return refine_class_a(y[:: max(1, n // CLASS_A_ML_SAMPLES)], moments)


def _class_a_nll(y: np.ndarray, p: ClassAParams) -> float:
    logf = logsumexp(np.log(p.weights()) + norm.logpdf(y[:, None], scale=np.sqrt(p.variances())), axis=1)
    return -float(np.mean(logf))


def refine_class_a(y: np.ndarray, start: ClassAParams) -> ClassAParams:
    """Maximum likelihood over (A, Γ′) from a starting estimate; σ² and location stay fixed.

    y are centered samples. The search runs on (ln A, ln Γ′) within CLASS_A_A_BOUNDS
    and CLASS_A_GAMMA_BOUNDS; the start is kept when the search does not improve on it.
    """

    def params(theta) -> ClassAParams:
        return ClassAParams(overlap_a=math.exp(theta[0]), gamma_prime=math.exp(theta[1]), sigma_sq=start.sigma_sq, location=start.location)

    def nll(theta) -> float:
        return _class_a_nll(y, params(theta))

    bounds = [tuple(math.log(v) for v in CLASS_A_A_BOUNDS), tuple(math.log(v) for v in CLASS_A_GAMMA_BOUNDS)]
    theta0 = np.clip([math.log(start.overlap_a), math.log(start.gamma_prime)], [b[0] for b in bounds], [b[1] for b in bounds])
    result = minimize(nll, theta0, method="L-BFGS-B", bounds=bounds)
    start_nll = nll(theta0)
    if not result.success:
        logger.warning(f"class A likelihood search: {result.message}")
    if not result.fun < start_nll:
        logger.debug(f"class A likelihood search kept the moment estimate ({start_nll:.6g})")
        return start
    refined = params(result.x)
    logger.debug(f"class A likelihood: {refined}, mean log-likelihood {-result.fun:.6g} (moments {-start_nll:.6g})")
    return refined


def class_a_gaussian_limit(samples) -> ClassAParams:
    x = np.asarray(samples, dtype=np.float64)
    return ClassAParams(overlap_a=CLASS_A_A_BOUNDS[1], gamma_prime=CLASS_A_GAUSSIAN_GAMMA, sigma_sq=float(np.var(x)), location=float(np.mean(x)), degenerate=True)


# ##############################################################
# Families
#
class Family:
    """A noise law that can be fitted to samples and evaluated on grids."""

    FAMILY_NAME = "none"

    @classmethod
    def name(cls) -> str:
        return cls.FAMILY_NAME

    @staticmethod
    def fit(samples):
        raise NotImplementedError

    @staticmethod
    def pdf(grid, params):
        raise NotImplementedError

    @staticmethod
    def ccdf(grid, params):
        raise NotImplementedError


class StableFamily(Family):
    FAMILY_NAME = "stable"

    @staticmethod
    def fit(samples):
        return estimate_stable(samples)

    @staticmethod
    def pdf(grid, params):
        return stable_pdf(grid, params)

    @staticmethod
    def ccdf(grid, params):
        return stable_ccdf(grid, params)


class ClassAFamily(Family):
    FAMILY_NAME = "class-a"

    @staticmethod
    def fit(samples):
        try:
            return estimate_class_a(samples)
        except ModelMismatch as e:
            logger.warning(f"{e}, using the Gaussian limit of Class A")
            return class_a_gaussian_limit(samples)

    @staticmethod
    def pdf(grid, params):
        return class_a_pdf(grid, params)

    @staticmethod
    def ccdf(grid, params):
        return class_a_ccdf(grid, params)


FAMILIES = {f.name(): f for f in all_subclasses(Family)}


# ##############################################################
# Comparison
#
class FamilyScore:
    def __init__(self, params, kl: float, mse: float):
        self.params = params
        self.kl = kl
        self.mse = mse

    def __str__(self) -> str:
        return f"{self.params}: KL={self.kl:.6g}, MSE={self.mse:.6g}"


class FitReport:
    """Goodness of fit of each family: divergence of the densities and tail mean square error."""

    def __init__(self, scores: dict, sample_count: int, grid: dict):
        self.scores = scores
        self.sample_count = sample_count
        self.grid = grid

    @property
    def stable(self) -> FamilyScore | None:
        return self.scores.get(StableFamily.name())

    @property
    def class_a(self) -> FamilyScore | None:
        return self.scores.get(ClassAFamily.name())

    def to_dict(self) -> dict:
        """Flat document, one key per family and measure."""
        d = {"sample-count": self.sample_count}
        for k, v in self.grid.items():
            d[f"grid.{k}"] = v
        for family, score in self.scores.items():
            d[f"{family}.kl"] = score.kl
            d[f"{family}.mse"] = score.mse
            for k, v in score.params.to_dict().items():
                d[f"{family}.{k}"] = v
        return d


def tail_grid(samples: np.ndarray, points: int = TAIL_POINTS) -> np.ndarray:
    """points amplitudes from the median to the largest sample.

    The deviation d above the median is spaced logarithmically in 1 + d/s, s the median
    absolute deviation: about linear within s of the median, logarithmic in the tail.
    """
    center = float(np.quantile(samples, TAIL_START_QUANTILE))
    deviation = samples - center
    scale = float(np.median(np.abs(deviation)))
    stop = float(np.max(deviation))
    if scale <= 0 or stop <= 0:
        raise DegenerateVariance("samples have no upper tail to compare")
    grid = center + scale * (np.geomspace(1.0, 1.0 + stop / scale, points) - 1.0)
    grid[0], grid[-1] = center, center + stop
    return grid


def compare_fits(trace: Trace, bins: int = 200, tail_points: int = TAIL_POINTS, families: list | None = None) -> FitReport:
    """Fits each family and scores it against the empirical density and tail function.

    The density grid is a histogram of the central [0.1%, 99.9%] quantile range;
    model densities are renormalized over it. Deterministic for a given trace.
    """
    if len(trace) < FIT_MIN_SAMPLES:
        raise InsufficientData(f"fit comparison needs at least {FIT_MIN_SAMPLES} samples, got {len(trace)}")
    x = trace.samples
    lo, hi = np.quantile(x, [PDF_RANGE_QUANTILE, 1.0 - PDF_RANGE_QUANTILE])
    if not hi > lo:
        raise DegenerateVariance("samples are (almost) constant")
    pdf = empirical_pdf(trace, bins, value_range=(float(lo), float(hi)))
    grid = tail_grid(x, tail_points)
    ccdf = empirical_ccdf(trace, grid)

    scores = {}
    for name in families if families is not None else FAMILIES.keys():
        family = FAMILIES[name]
        params = family.fit(x)
        q = family.pdf(pdf.grid, params)
        mass = float(np.sum(q * pdf.widths()))
        if mass > 0:
            q = q / mass
        model_pdf = Curve(pdf.grid, q, edges=pdf.edges)
        model_ccdf = Curve(grid, family.ccdf(grid, params))
        scores[name] = FamilyScore(params, kl=kl_divergence(pdf, model_pdf), mse=mse_tail(ccdf, model_ccdf))
        logger.info(f"{name}: {scores[name]}")
    grid_description = {
        "bins": bins,
        "pdf-low": float(lo),
        "pdf-high": float(hi),
        "tail-points": tail_points,
        "tail-low": float(grid[0]),
        "tail-high": float(grid[-1]),
    }
    return FitReport(scores, sample_count=len(x), grid=grid_description)
