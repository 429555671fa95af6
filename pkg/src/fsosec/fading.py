"""Fisher-Snedecor F fading of the optical power gain, and the induced
electrical SNR statistics of an intensity-modulated direct-detection
receiver.

The power gain h_t follows a unit-mean F distribution with small-scale
shape a and large-scale shape b:

    pdf(h) = a^a (b-1)^b h^(a-1) / (B(a,b) (a h + b - 1)^(a+b))

equivalently ((b-1)/a) times a beta-prime(a, b) variate.  The
instantaneous electrical SNR is gamma = 4 * mean_snr * h_t^2, with the
deterministic channel gains folded into mean_snr.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import (MeijerGSpec, log_beta, meijer_g, reg_inc_beta,
                      reg_inc_beta_many)


@dataclass(frozen=True)
class FFadingParams:
    """Shape pair of the F fading distribution.

    a is the small-scale (diffractive) shape, b the large-scale
    (refractive) shape.  b must exceed 1 for the unit-mean scaling to
    exist; the variance additionally needs b > 2.  Infinite shapes are
    the no-fading sentinel produced by vanishing turbulence.
    """

    a: float
    b: float

    def __post_init__(self):
        if not self.a > 0.0:
            raise ValueError(f"shape a must be > 0, got {self.a!r}")
        if not self.b > 1.0:
            raise ValueError(f"shape b must be > 1, got {self.b!r}")

    @property
    def no_fading(self):
        return math.isinf(self.a) or math.isinf(self.b)

    @property
    def power_variance(self):
        """Variance of h_t; infinite for b <= 2."""
        if self.no_fading:
            return 0.0
        if self.b <= 2.0:
            return math.inf
        return (self.a + self.b - 1.0) / (self.a * (self.b - 2.0))


def pdf_ht(params, h):
    """Density of the power gain at h >= 0."""
    a, b = params.a, params.b
    if h < 0.0 or math.isinf(h):
        return 0.0
    if params.no_fading:
        raise ValueError("no-fading sentinel has no density")
    if h == 0.0:
        if a < 1.0:
            return math.inf
        if a == 1.0:
            return math.exp(b * math.log(b - 1.0) - log_beta(a, b)
                            - (a + b) * math.log(b - 1.0))
        return 0.0
    log_p = (a * math.log(a) + b * math.log(b - 1.0) + (a - 1.0) * math.log(h)
             - log_beta(a, b) - (a + b) * math.log(a * h + b - 1.0))
    return math.exp(log_p)


def cdf_ht(params, h):
    """Distribution function of the power gain at h."""
    if h <= 0.0:
        return 0.0
    if params.no_fading:
        return 1.0 if h >= 1.0 else 0.0
    if math.isinf(h):
        return 1.0
    a, b = params.a, params.b
    z = a * h / (a * h + b - 1.0)
    return reg_inc_beta(z, a, b)


def cdf_ht_many(params, h):
    """Vectorized cdf_ht over a numpy array of gains."""
    h = np.asarray(h, dtype=float)
    if params.no_fading:
        return (h >= 1.0).astype(float)
    a, b = params.a, params.b
    finite = np.isfinite(h)
    safe = np.where(finite & (h > 0.0), h, 1.0)
    z = a * safe / (a * safe + b - 1.0)
    z = np.where(h > 0.0, z, 0.0)
    z = np.where(finite, z, 1.0)
    return reg_inc_beta_many(z, a, b)


def pdf_ht_gform(params, h):
    """Density via the Meijer-G representation; returns (value, error).

    Cross-validation route for pdf_ht, not the workhorse.
    """
    a, b = params.a, params.b
    if not h > 0.0:
        raise ValueError("G-form density needs h > 0")
    spec = MeijerGSpec(1, 1, 1, 1, (1.0 - a - b,), (0.0,), a * h / (b - 1.0))
    log_pref = (a * math.log(a) + (a - 1.0) * math.log(h) - log_beta(a, b)
                - a * math.log(b - 1.0) - math.lgamma(a + b))
    return meijer_g(spec, log_scale=log_pref)


def cdf_ht_gform(params, h):
    """Distribution function via the Meijer-G representation; (value, error)."""
    a, b = params.a, params.b
    if not h > 0.0:
        raise ValueError("G-form distribution needs h > 0")
    spec = MeijerGSpec(1, 2, 2, 2, (1.0 - b, 1.0), (a, 0.0), a * h / (b - 1.0))
    log_pref = -log_beta(a, b) - math.lgamma(a + b)
    return meijer_g(spec, log_scale=log_pref)


def sample_ht(params, rng, n):
    """Draw n power gains as a scaled ratio of gamma variates.

    h = ((b-1)/a) * X / Y with X ~ Gamma(a, 1), Y ~ Gamma(b, 1) is
    exactly the unit-mean F power gain.
    """
    if params.no_fading:
        return np.ones(n)
    a, b = params.a, params.b
    x = rng.standard_gamma(a, size=n)
    y = rng.standard_gamma(b, size=n)
    return (b - 1.0) / a * x / y


@dataclass(frozen=True)
class SnrChannel:
    """One receiver branch: fading shapes plus mean electrical SNR."""

    fading: FFadingParams
    mean_snr: float

    def __post_init__(self):
        if not (self.mean_snr > 0.0 and math.isfinite(self.mean_snr)):
            raise ValueError(f"mean SNR must be positive and finite, "
                             f"got {self.mean_snr!r}")


def mean_snr_from_budget(tx_power, noise_std, gain):
    """Mean electrical SNR of a square-law receiver branch.

    gamma_bar = 2 * P^2 * G^2 / sigma_n^2 with G the composite
    deterministic power gain and sigma_n the effective noise standard
    deviation (detector responsivity folded in).
    """
    if tx_power <= 0.0 or noise_std <= 0.0 or gain <= 0.0:
        raise ValueError("power, noise and gain must all be positive")
    return 2.0 * (tx_power * gain / noise_std) ** 2


def h_from_snr(channel, snr):
    """Power gain at which the instantaneous SNR equals snr."""
    if snr < 0.0:
        raise ValueError("SNR must be >= 0")
    return math.sqrt(snr / (4.0 * channel.mean_snr))


def snr_pdf(channel, snr):
    """Density of the instantaneous electrical SNR."""
    if snr <= 0.0:
        return 0.0
    scale = 4.0 * channel.mean_snr * snr
    if scale == 0.0:
        # the change-of-variable product underflowed; this deep in the
        # left tail the gain density is in its h^(a-1) regime, so the
        # SNR density follows snr^(a/2 - 1) with a computable log
        a, b = channel.fading.a, channel.fading.b
        log_f = (a * math.log(a) - log_beta(a, b) - a * math.log(b - 1.0)
                 - math.log(2.0) + (0.5 * a - 1.0) * math.log(snr)
                 - 0.5 * a * math.log(4.0 * channel.mean_snr))
        if log_f > 709.0:
            return math.inf
        return math.exp(log_f)
    h = h_from_snr(channel, snr)
    dh = 1.0 / (2.0 * math.sqrt(scale))
    return pdf_ht(channel.fading, h) * dh


def snr_cdf(channel, snr):
    """Distribution of the instantaneous electrical SNR."""
    if snr <= 0.0:
        return 0.0
    return cdf_ht(channel.fading, h_from_snr(channel, snr))


def snr_pdf_gform(channel, snr):
    """SNR density via the Meijer-G route; returns (value, error)."""
    a, b = channel.fading.a, channel.fading.b
    if not snr > 0.0:
        raise ValueError("G-form SNR density needs snr > 0")
    x = a / (b - 1.0) * math.sqrt(snr / (4.0 * channel.mean_snr))
    spec = MeijerGSpec(1, 1, 1, 1, (1.0 - b,), (a,), x)
    log_pref = -(math.log(2.0) + log_beta(a, b) + math.lgamma(a + b)
                 + math.log(snr))
    return meijer_g(spec, log_scale=log_pref)


def snr_cdf_gform(channel, snr):
    """SNR distribution via the Meijer-G route; returns (value, error)."""
    a, b = channel.fading.a, channel.fading.b
    if not snr > 0.0:
        raise ValueError("G-form SNR distribution needs snr > 0")
    x = a / (b - 1.0) * math.sqrt(snr / (4.0 * channel.mean_snr))
    spec = MeijerGSpec(1, 2, 2, 2, (1.0 - b, 1.0), (a, 0.0), x)
    log_pref = -log_beta(a, b) - math.lgamma(a + b)
    return meijer_g(spec, log_scale=log_pref)


def sample_snr(channel, rng, n):
    """Draw n instantaneous SNR values."""
    h = sample_ht(channel.fading, rng, n)
    return 4.0 * channel.mean_snr * h * h
