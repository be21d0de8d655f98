"""Achievable rates for shaped ASK on the unit-variance AWGN channel.

The channel is Y = X + Z with Z ~ N(0, 1) and X = Delta * A * S, signs
uniform, so SNR = E[X^2] = Delta^2 * E[A^2]. Conditional bit entropies
H(B_j | Y) are computed by adaptive Gauss-Hermite quadrature (one Gaussian
integral per constellation point), from which the bit-metric decoding
rate, its product-distribution form, and the BICM capacity follow. A
Monte Carlo estimator of the same entropies is kept alongside as an
independent cross-check.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .constellation import AskConstellation, Labeling, amplitude_label_table, label_table

LN2 = math.log(2.0)
SQRT2 = math.sqrt(2.0)
DB_PER_BIT = 20.0 * math.log10(2.0)  # small-rate-loss SNR penalty, ~6.02 dB/bit


def entropy(p) -> float:
    """Shannon entropy in bits; 0*log(0) = 0."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("not a probability vector")
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def binary_entropy(p0: float) -> float:
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("probability out of range")
    if p0 in (0.0, 1.0):
        return 0.0
    return -p0 * math.log2(p0) - (1 - p0) * math.log2(1 - p0)


@dataclass
class InputDistribution:
    """Amplitude distribution of a 2^m-ASK input with uniform signs.

    ``level_p0`` records P(B_j = 0) for j = 2..m when the distribution is
    an NBBC bit-level product; it is None for general distributions.
    """

    m: int
    p_amp: np.ndarray
    level_p0: tuple = None

    def __post_init__(self):
        self.p_amp = np.asarray(self.p_amp, dtype=float)
        half = 1 << (self.m - 1)
        if self.p_amp.shape != (half,):
            raise ValueError("expected %d amplitude probabilities" % half)
        if np.any(self.p_amp < -1e-12) or abs(self.p_amp.sum() - 1.0) > 1e-9:
            raise ValueError("amplitude probabilities must sum to 1")
        self.p_amp = np.clip(self.p_amp, 0.0, None)
        self.p_amp /= self.p_amp.sum()

    @classmethod
    def uniform(cls, m: int) -> "InputDistribution":
        half = 1 << (m - 1)
        return cls(m, np.full(half, 1.0 / half), level_p0=tuple([0.5] * (m - 1)))

    @classmethod
    def from_mb(cls, m: int, nu: float) -> "InputDistribution":
        """Maxwell-Boltzmann family P(a) proportional to exp(-nu * a^2)."""
        a = AskConstellation(m).amplitudes.astype(float)
        w = np.exp(-nu * (a**2 - 1.0))
        return cls(m, w / w.sum())

    @classmethod
    def from_levels(cls, level_p0, label_kind: str = "nbbc") -> "InputDistribution":
        """Bit-level product distribution; level_p0 lists P(B_j=0), j = 2..m."""
        level_p0 = tuple(float(p) for p in level_p0)
        m = len(level_p0) + 1
        table = amplitude_label_table(label_kind, m)  # row v -> amplitude 2v+1
        p = np.ones(table.shape[0])
        for col, p0 in enumerate(level_p0):
            p *= np.where(table[:, col] == 0, p0, 1.0 - p0)
        return cls(m, p, level_p0=level_p0 if label_kind == "nbbc" else None)

    @property
    def amplitudes(self) -> np.ndarray:
        return AskConstellation(self.m).amplitudes

    @property
    def e_a2(self) -> float:
        """Mean squared amplitude at unit scaling."""
        return float((self.p_amp * self.amplitudes.astype(float) ** 2).sum())

    @property
    def h_amp(self) -> float:
        return entropy(self.p_amp)

    @property
    def h_x(self) -> float:
        """Entropy of the signed input; the uniform sign adds one bit."""
        return self.h_amp + 1.0

    def point_probabilities(self) -> np.ndarray:
        """Probabilities of the 2^m signed points in ascending order."""
        half = self.p_amp / 2.0
        return np.concatenate([half[::-1], half])

    def bit_marginals(self, labeling: Labeling) -> np.ndarray:
        """P(B_j = 0) for j = 1..m under the given labeling."""
        table = label_table(labeling.kind, labeling.m)
        p = self.point_probabilities()
        return np.array([(p * (table[:, j] == 0)).sum() for j in range(labeling.m)])

    def scale_for_snr(self, snr: float) -> float:
        """Constellation scaling Delta with E[X^2] = snr (linear)."""
        if snr <= 0:
            raise ValueError("snr must be positive (linear)")
        return math.sqrt(snr / self.e_a2)


@lru_cache(maxsize=None)
def _hermgauss(nodes: int):
    z, w = np.polynomial.hermite.hermgauss(nodes)
    return z, w / math.sqrt(math.pi)


def _gh_bit_entropies(dist: InputDistribution, labeling: Labeling, delta: float, nodes: int):
    points = AskConstellation(dist.m).points.astype(float) * delta
    p = dist.point_probabilities()
    table = label_table(labeling.kind, labeling.m)
    live = p > 0
    z, w = _hermgauss(nodes)
    y = points[live, None] + SQRT2 * z[None, :]  # (centers, nodes)
    with np.errstate(divide="ignore"):
        logp = np.log(p)
    # log p(y, X = x_k) on the quadrature grid, up to the common Gaussian constant
    ll = logp[None, None, :] - 0.5 * (y[:, :, None] - points[None, None, :]) ** 2
    log_py = logsumexp(ll, axis=2)
    out = np.empty(labeling.m)
    for j in range(labeling.m):
        coset0 = table[:, j] == 0
        log_b = np.stack(
            [logsumexp(ll[:, :, coset0], axis=2), logsumexp(ll[:, :, ~coset0], axis=2)]
        )
        true_bit = table[live, j].astype(int)
        log_post = log_b[true_bit, np.arange(int(live.sum())), :] - log_py
        out[j] = -(p[live] @ (log_post @ w)) / LN2
    return out


def conditional_bit_entropies(
    dist: InputDistribution,
    labeling: Labeling,
    snr: float,
    tol: float = 1e-7,
    start_nodes: int = 64,
    max_nodes: int = 512,
) -> np.ndarray:
    """H(B_j | Y) in bits for j = 1..m at the given linear SNR.

    Gauss-Hermite node count starts at ``start_nodes`` and doubles until
    successive estimates agree within ``tol`` bits; failure to converge at
    ``max_nodes`` raises ArithmeticError.
    """
    delta = dist.scale_for_snr(snr)
    nodes = start_nodes
    prev = _gh_bit_entropies(dist, labeling, delta, nodes)
    while nodes < max_nodes:
        nodes *= 2
        cur = _gh_bit_entropies(dist, labeling, delta, nodes)
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur
    cur = _gh_bit_entropies(dist, labeling, delta, max_nodes)
    if np.max(np.abs(cur - prev)) >= tol:
        raise ArithmeticError("bit-entropy quadrature did not converge at %d nodes" % max_nodes)
    return cur


def mc_conditional_bit_entropies(
    dist: InputDistribution,
    labeling: Labeling,
    snr: float,
    samples: int,
    rng: np.random.Generator,
    chunk: int = 200_000,
) -> np.ndarray:
    """Monte Carlo estimate of H(B_j | Y); the quadrature's cross-check."""
    delta = dist.scale_for_snr(snr)
    points = AskConstellation(dist.m).points.astype(float) * delta
    p = dist.point_probabilities()
    table = label_table(labeling.kind, labeling.m)
    with np.errstate(divide="ignore"):
        logp = np.log(p)
    totals = np.zeros(labeling.m)
    done = 0
    while done < samples:
        size = min(chunk, samples - done)
        idx = rng.choice(points.size, size=size, p=p)
        y = points[idx] + rng.standard_normal(size)
        ll = logp[None, :] - 0.5 * (y[:, None] - points[None, :]) ** 2
        log_py = logsumexp(ll, axis=1)
        for j in range(labeling.m):
            coset0 = table[:, j] == 0
            log_b = np.where(
                table[idx, j] == 0,
                logsumexp(ll[:, coset0], axis=1),
                logsumexp(ll[:, ~coset0], axis=1),
            )
            totals[j] -= (log_b - log_py).sum() / LN2
        done += size
    return totals / samples


def bmd_rate(dist: InputDistribution, labeling: Labeling, snr: float) -> float:
    """Bit-metric decoding rate [H(X) - sum_j H(B_j|Y)]^+ in bits/channel use."""
    cond = conditional_bit_entropies(dist, labeling, snr)
    return max(0.0, dist.h_x - float(cond.sum()))


def bmd_rate_product(level_p0, snr: float, fec_labeling: Labeling = None) -> float:
    """Product-distribution rate [sum_j H(B_j^dm) - sum_j H(B_j^fec|Y)]^+.

    ``level_p0`` lists the NBBC level distributions P(B_j = 0), j = 2..m;
    the sign level is uniform. The FEC label defaults to the BRGC.
    """
    level_p0 = tuple(float(p) for p in level_p0)
    m = len(level_p0) + 1
    if fec_labeling is None:
        fec_labeling = Labeling("brgc", m)
    dist = InputDistribution.from_levels(level_p0)
    h_dm = 1.0 + sum(binary_entropy(p0) for p0 in level_p0)
    cond = conditional_bit_entropies(dist, fec_labeling, snr)
    return max(0.0, h_dm - float(cond.sum()))


def bicm_rate(dist: InputDistribution, labeling: Labeling, snr: float) -> float:
    """BICM capacity sum_j I(B_j; Y) for the given input distribution."""
    cond = conditional_bit_entropies(dist, labeling, snr)
    marg = dist.bit_marginals(labeling)
    h_bits = np.array([binary_entropy(p0) for p0 in marg])
    return float(np.clip(h_bits - cond, 0.0, None).sum())


def gaussian_capacity(snr: float) -> float:
    """AWGN capacity 0.5*log2(1+snr) of the real channel."""
    return 0.5 * math.log2(1.0 + snr)


def required_snr_db(
    rate_fn,
    target_rate: float,
    bracket_db=(-10.0, 60.0),
    tol_db: float = 1e-3,
    tol_rate: float = 1e-5,
) -> float:
    """Invert a monotone rate-vs-SNR function by bisection; returns dB.

    ``rate_fn`` maps a linear SNR to bits/channel use and must be
    nondecreasing on the bracket.
    """
    lo, hi = bracket_db
    if rate_fn(10 ** (hi / 10.0)) < target_rate:
        raise ValueError("target rate %.6g not achievable within bracket" % target_rate)
    if rate_fn(10 ** (lo / 10.0)) > target_rate:
        raise ValueError("target rate %.6g already exceeded at bracket floor" % target_rate)
    mid = 0.5 * (lo + hi)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        rate = rate_fn(10 ** (mid / 10.0))
        if rate < target_rate:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol_db and abs(rate - target_rate) < tol_rate:
            break
    return mid


def make_rate_fn(dist: InputDistribution, labeling: Labeling, kind: str = "bmd"):
    """Rate-vs-SNR callable for a fixed distribution (Delta rescales per SNR)."""
    if kind == "bmd":
        return lambda snr: bmd_rate(dist, labeling, snr)
    if kind == "bicm":
        return lambda snr: bicm_rate(dist, labeling, snr)
    raise ValueError("unknown rate kind %r" % (kind,))


def snr_loss_db(
    dist: InputDistribution, labeling: Labeling, r_t: float, r_loss: float
) -> float:
    """SNR penalty of a rate loss: required-SNR ratio at r_t + r_loss vs r_t, dB."""
    if r_loss < 0:
        raise ValueError("rate loss must be >= 0")
    if r_loss == 0.0:
        return 0.0
    fn = make_rate_fn(dist, labeling)
    return required_snr_db(fn, r_t + r_loss) - required_snr_db(fn, r_t)


def snr_loss_rule_of_thumb_db(r_t: float, r_loss: float) -> float:
    """Gaussian-capacity estimate of the rate-loss SNR penalty, dB."""
    if r_t <= 0:
        raise ValueError("r_t must be positive")
    return 10.0 * math.log10((2 ** (2 * (r_t + r_loss)) - 1) / (2 ** (2 * r_t) - 1))
