# Poisson field of interferers
#
# The received noise X_t = I_t + n_t is the superposition I_t of random impulses
# triggered at Poisson arrival times, plus a Gaussian background n_t.
#
import math
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from impulsivenoise import SPAM_LEVEL
from impulsivenoise.constant import ARRIVAL_BLOCK, UNIT_LENGTH, SHAPE_IMPULSES, SHAPE_SEED, STREAM
from impulsivenoise.error import InvalidArgument, DegenerateVariance
from impulsivenoise.trace import Trace
from impulsivenoise.waveform import ImpulseConfig, EquivalentWaveformParams, impulse_samples
from impulsivenoise.stats import ShotParams, waveform_power_integral

logger = logging.getLogger(__name__)
# logger.setLevel(SPAM_LEVEL)  # one line per impulse
# logger.setLevel(logging.DEBUG)


class FieldConfig:
    """Parameters of one simulated trace.

    The effective density λ = lambda_r × lambda_t is expressed per unit time;
    unit_length is the number of samples in one unit of time. It does not follow
    the trace length, so a longer trace is the same field observed for longer.
    """

    def __init__(
        self,
        lambda_r: float,
        lambda_t: float,
        mean_energy: float,
        gamma_ratio: float,
        trace_length: int,
        impulse: ImpulseConfig,
        seed: int = 0,
        unit_length: int = UNIT_LENGTH,
        sample_rate: float = 1.0,
    ):
        if not (lambda_r > 0 and lambda_t > 0):
            raise InvalidArgument(f"densities must be positive, got lambda_r={lambda_r}, lambda_t={lambda_t}")
        if not mean_energy > 0:
            raise InvalidArgument(f"mean energy must be positive, got {mean_energy}")
        if not (0 < gamma_ratio < 1):
            raise InvalidArgument(f"variance ratio must lie in (0, 1), got {gamma_ratio}")
        if int(trace_length) != trace_length or trace_length < 10 * impulse.length:
            raise InvalidArgument(f"trace length {trace_length} must be at least 10 × impulse length {impulse.length}")
        if int(unit_length) != unit_length or not unit_length > 0:
            raise InvalidArgument(f"unit length must be a positive integer, got {unit_length}")
        if not (0 <= int(seed) < 2**64):
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.lambda_r = float(lambda_r)
        self.lambda_t = float(lambda_t)
        self.mean_energy = float(mean_energy)
        self.gamma_ratio = float(gamma_ratio)
        self.trace_length = int(trace_length)
        self.impulse = impulse
        self.seed = int(seed)
        self.unit_length = int(unit_length)
        self.sample_rate = float(sample_rate)

    def __str__(self) -> str:
        return f"field λ={self.lambda_r}×{self.lambda_t}, <E>={self.mean_energy}, Γ={self.gamma_ratio}, N={self.trace_length}, seed={self.seed}"

    @property
    def density(self) -> float:
        """Expected arrivals per sample."""
        return self.lambda_r * self.lambda_t / self.unit_length

    @property
    def sigma_n_sq(self) -> float:
        """Background variance Γ λ ⟨E⟩, Γ times the ensemble variance of the shot noise."""
        return self.gamma_ratio * self.density * self.mean_energy

    def with_seed(self, seed: int) -> "FieldConfig":
        return FieldConfig(
            lambda_r=self.lambda_r,
            lambda_t=self.lambda_t,
            mean_energy=self.mean_energy,
            gamma_ratio=self.gamma_ratio,
            trace_length=self.trace_length,
            impulse=self.impulse,
            seed=seed,
            unit_length=self.unit_length,
            sample_rate=self.sample_rate,
        )

    def shot_params(self, sigma_n_sq: float | None = None, order: int = 8) -> ShotParams:
        """Closed-form view of this field through its deterministic equivalent waveform.

        The amplitude moments are chosen so that every cumulant of the view equals the
        cumulant of the simulated shot noise, λ E[Σ_t u_t^m]. Odd moments vanish (symmetric
        sign). For even m = 2j, E[Σ_t u_t^m] = j! ⟨E⟩^j r_m with r_m the mean of
        Σ_t |U_t|^m / ‖U‖^m over raw impulses (see shape_moments), hence
        ⟨K^m⟩ = j! ⟨E⟩^j r_m / ∫γ^m. r_2 = 1, so ⟨K²⟩ ∫γ² = ⟨E⟩ exactly.
        When sigma_n_sq is None the background variance is the ensemble value Γ λ ⟨E⟩.
        """
        eq = EquivalentWaveformParams.from_ar(self.impulse.ar, amplitude_k=1.0)
        shape = shape_moments(self.impulse, order) if order >= 4 else None
        k_moments = []
        for m in range(1, order + 1):
            if m % 2 == 1:
                k_moments.append(0.0)
            elif m == 2:
                k_moments.append(self.mean_energy / eq.energy())
            else:
                j = m // 2
                k_moments.append(math.factorial(j) * self.mean_energy**j * shape[m - 1] / waveform_power_integral(m, eq.fall_a, eq.rise_b))
        if sigma_n_sq is None:
            sigma_n_sq = self.sigma_n_sq
        return ShotParams(lam=self.density, fall_a=eq.fall_a, rise_b=eq.rise_b, k_moments=k_moments, sigma_n_sq=sigma_n_sq)


def shape_moments(impulse: ImpulseConfig, order: int, count: int = SHAPE_IMPULSES) -> np.ndarray:
    """r_m = mean of Σ_t |U_t|^m / ‖U‖^m over count raw impulses, m = 1..order.

    The impulses come from their own streams under a fixed seed, so the result
    depends on the impulse configuration only.
    """
    sums = np.zeros(order)
    used = 0
    for i in range(count):
        raw = impulse_samples(impulse, stream(SHAPE_SEED, STREAM.SHAPE, i))
        norm = math.sqrt(float(np.dot(raw, raw)))
        if norm == 0:
            continue
        u = np.abs(raw) / norm
        sums += [float(np.sum(u**m)) for m in range(1, order + 1)]
        used += 1
    if used == 0:
        raise DegenerateVariance("every raw impulse is silent, amplitude moments are undefined")
    logger.debug(f"shape moments from {used} impulses: {sums / used}")
    return sums / used


# ##############################################################
# Random streams
#
def stream(seed: int, kind: STREAM, *index) -> np.random.Generator:
    """Independent generator derived from (seed, stream kind, index...)."""
    return np.random.default_rng(np.random.SeedSequence([seed, kind.value, *index]))


# ##############################################################
# Arrivals
#
def sample_arrivals(lam: float, horizon: int, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous Poisson arrivals on the integer grid [0, horizon), sorted."""
    if not lam > 0:
        raise InvalidArgument(f"arrival density must be positive, got {lam}")
    if horizon < 0:
        raise InvalidArgument(f"horizon must be non negative, got {horizon}")
    count = rng.poisson(lam * horizon)
    return np.sort(rng.integers(0, horizon, size=count)) if horizon > 0 else np.zeros(0, dtype=np.int64)


def block_arrivals(lam: float, horizon: int, seed: int) -> np.ndarray:
    """Arrivals drawn block by block, each block from its own stream.

    Arrivals before a given time do not depend on the horizon beyond it.
    """
    blocks = []
    for b in range(0, (horizon + ARRIVAL_BLOCK - 1) // ARRIVAL_BLOCK):
        arrivals = b * ARRIVAL_BLOCK + sample_arrivals(lam, ARRIVAL_BLOCK, stream(seed, STREAM.ARRIVALS, b))
        blocks.append(arrivals[arrivals < horizon])
    return np.concatenate(blocks) if len(blocks) > 0 else np.zeros(0, dtype=np.int64)


# ##############################################################
# Shot noise
#
def scaled_impulse(cfg: FieldConfig, ordinal: int) -> tuple:
    """Impulse number ordinal, scaled to its random energy and sign.

    Returns (samples, energy); samples is None if the raw impulse is silent.
    """
    rng = stream(cfg.seed, STREAM.IMPULSE, ordinal)
    raw = impulse_samples(cfg.impulse, rng)
    energy = rng.exponential(cfg.mean_energy)
    sign = 1.0 if rng.integers(0, 2) == 1 else -1.0
    raw_energy = float(np.dot(raw, raw))
    if raw_energy == 0:
        return None, energy
    return sign * math.sqrt(energy / raw_energy) * raw, energy


def simulate_shot_noise(cfg: FieldConfig, arrivals=None, ordinals=None, workers: int = 1) -> Trace:
    """The shot-noise component I_t.

    Args:
        cfg: field configuration
        arrivals: arrival times; drawn from the configuration seed when None
        ordinals: impulse numbers selecting each impulse's random stream, default 0, 1, 2...
        workers: threads used to synthesize impulses; summation stays in arrival order

    Returns:
        Trace: with meta "arrivals" and "energies" (energy drawn for each impulse, before truncation)
    """
    if arrivals is None:
        arrivals = block_arrivals(cfg.density, cfg.trace_length, cfg.seed)
    arrivals = np.asarray(arrivals, dtype=np.int64)
    if ordinals is None:
        ordinals = np.arange(len(arrivals))
    ordinals = np.asarray(ordinals, dtype=np.int64)
    if len(ordinals) != len(arrivals):
        raise InvalidArgument(f"{len(ordinals)} ordinals for {len(arrivals)} arrivals")
    if np.any(arrivals < 0) or np.any(arrivals >= cfg.trace_length):
        raise InvalidArgument("arrivals must lie in [0, trace length)")

    order = np.argsort(arrivals, kind="stable")
    arrivals, ordinals = arrivals[order], ordinals[order]
    logger.debug(f"{len(arrivals)} impulses over {cfg.trace_length} samples")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            impulses = list(executor.map(lambda o: scaled_impulse(cfg, int(o)), ordinals))
    else:
        impulses = [scaled_impulse(cfg, int(o)) for o in ordinals]

    shot = np.zeros(cfg.trace_length)
    energies = np.zeros(len(arrivals))
    for i, (t0, (u, energy)) in enumerate(zip(arrivals, impulses)):
        energies[i] = energy
        if u is None:
            logger.warning(f"impulse {ordinals[i]} at {t0} is silent, skipped")
            continue
        end = min(cfg.trace_length, t0 + len(u))
        shot[t0:end] += u[: end - t0]
        logger.log(SPAM_LEVEL, f"impulse {ordinals[i]} at {t0}, energy {energy:.4g}")
    return Trace(shot, sample_rate=cfg.sample_rate, seed=cfg.seed, meta={"arrivals": arrivals, "energies": energies})


def block_normal(horizon: int, seed: int) -> np.ndarray:
    """Standard normal background samples, drawn block by block like the arrivals."""
    blocks = [stream(seed, STREAM.BACKGROUND, b).standard_normal(ARRIVAL_BLOCK) for b in range(0, (horizon + ARRIVAL_BLOCK - 1) // ARRIVAL_BLOCK)]
    return np.concatenate(blocks)[:horizon] if len(blocks) > 0 else np.zeros(0)


def add_background(shot: Trace, gamma_ratio: float, rng: np.random.Generator | None = None, sigma_n_sq: float | None = None, noise=None) -> Trace:
    """X_t = I_t + n_t with n_t ~ N(0, σn²).

    Args:
        shot: shot-noise trace I_t
        gamma_ratio: Γ, used when sigma_n_sq is None: σn² = Γ × empirical variance of I_t
        rng: generator of the background, when noise is not given
        sigma_n_sq: background variance, given in closed form by the caller
        noise: standard normal samples to scale, one per shot sample

    Returns:
        Trace: with meta "sigma_n_sq" and "shot_variance" (empirical variance of I_t)
    """
    if shot.is_empty():
        raise InvalidArgument("shot trace is empty")
    if not (0 < gamma_ratio < 1):
        raise InvalidArgument(f"variance ratio must lie in (0, 1), got {gamma_ratio}")
    variance = float(np.var(shot.samples))
    if variance <= 0:
        raise DegenerateVariance("shot trace has zero variance, background level is undefined")
    if sigma_n_sq is None:
        sigma_n_sq = gamma_ratio * variance
    elif not sigma_n_sq > 0:
        raise InvalidArgument(f"background variance must be positive, got {sigma_n_sq}")
    if noise is None:
        if rng is None:
            raise InvalidArgument("either a generator or background samples are required")
        noise = rng.standard_normal(len(shot))
    elif len(noise) != len(shot):
        raise InvalidArgument(f"{len(noise)} background samples for {len(shot)} shot samples")
    logger.debug(f"background variance {sigma_n_sq:.6g} (Γ={gamma_ratio}, realized ratio {sigma_n_sq / variance:.4g})")
    return shot.with_samples(shot.samples + math.sqrt(sigma_n_sq) * np.asarray(noise), sigma_n_sq=sigma_n_sq, shot_variance=variance)


def simulate(cfg: FieldConfig, workers: int = 1) -> Trace:
    """One trace of the field. The background level is the closed-form Γ λ ⟨E⟩,
    so that any prefix of a longer trace is the shorter trace, bit for bit.
    """
    shot = simulate_shot_noise(cfg, workers=workers)
    return add_background(shot, cfg.gamma_ratio, sigma_n_sq=cfg.sigma_n_sq, noise=block_normal(cfg.trace_length, cfg.seed))


def ensemble_seed(seed: int, member: int) -> int:
    return int(np.random.SeedSequence([seed, STREAM.ENSEMBLE.value, member]).generate_state(1, dtype=np.uint64)[0])


def simulate_ensemble(cfg: FieldConfig, count: int, workers: int = 1) -> list:
    """count independent traces, each with its own derived seed; result order is member order."""
    configs = [cfg.with_seed(ensemble_seed(cfg.seed, i)) for i in range(count)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(simulate, configs))
    return [simulate(c) for c in configs]
