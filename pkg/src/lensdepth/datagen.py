"""Seeded synthetic generators for the simulation benchmarks.

All randomness flows through a Philox counter-based 64-bit generator;
normal and exponential variates come from inverse CDFs applied to open
uniforms. Identical (family, parameters, n, seed) always reproduces the
same bytes.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .classify import LabeledDataset
from .metrics import euclidean_space, spd_power, spd_space

_U53 = float(2 ** 53)


def make_rng(seed):
    """Counter-based generator; splittable and reproducible across runs."""
    return np.random.Generator(np.random.Philox(key=int(seed) & (2 ** 64 - 1)))


def uniform_open(rng, size=None):
    """Uniforms strictly inside (0, 1), safe for inverse CDFs."""
    return (rng.integers(0, 2 ** 53, size=size) + 0.5) / _U53


def normal_icdf(rng, size=None):
    """Standard normals by inverse CDF of open uniforms."""
    return ndtri(uniform_open(rng, size))


def exponential_icdf(rng, rate, size=None):
    """Exponential(rate) variates by inverse CDF."""
    return -np.log(uniform_open(rng, size)) / rate


@dataclass(frozen=True)
class GeneratorSpec:
    """A reproducible generation request: family, parameters, n, seed."""

    family: str
    n: int
    seed: int
    params: dict = field(default_factory=dict)

    def describe(self):
        extra = "".join(f" {k}={v}" for k, v in sorted(self.params.items()))
        return f"family={self.family} n={self.n} seed={self.seed}{extra}"


def gen_interlocking_rings(n_per_group, seed, rate=0.5, shift=(3.0, 0.0)):
    """Two noisy rings of radius 2 + Exp(rate), one shifted sideways.

    A draw is ((2 + R) cos t, (2 + R) sin t) with R ~ Exp(rate) and
    t ~ Unif(0, 2 pi). Class 0 is shifted by ``shift``; class 1 sits at
    the origin. The default rate 1/2 reads the rings' radial spread as
    mean 2; pass rate=2.0 for the mean-1/2 reading.
    """
    if n_per_group < 1:
        raise ValueError("n_per_group must be >= 1")
    rng = make_rng(seed)
    n = 2 * n_per_group
    radius = 2.0 + exponential_icdf(rng, rate, n)
    theta = 2.0 * np.pi * uniform_open(rng, n)
    pts = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    pts[:n_per_group] += np.asarray(shift, dtype=np.float64)
    labels = np.repeat([0, 1], n_per_group)
    return LabeledDataset(pts, labels, euclidean_space(2))


def gen_two_moons(n_per_group, noise_sd, seed):
    """Two interlocking half-circle arcs with isotropic Gaussian noise.

    Class 0 is the upper unit half-circle (cos t, sin t), t ~ Unif(0, pi).
    Class 1 is that arc rotated half a turn and placed at
    (1 - cos t, 1/2 - sin t), so it bulges downward to -1/2 while class 0
    bulges up to 1. Noise adds noise_sd times a standard normal to each
    coordinate.
    """
    if noise_sd < 0:
        raise ValueError("noise_sd must be >= 0")
    rng = make_rng(seed)
    t = np.pi * uniform_open(rng, 2 * n_per_group)
    upper = np.column_stack([np.cos(t[:n_per_group]), np.sin(t[:n_per_group])])
    lower = np.column_stack(
        [1.0 - np.cos(t[n_per_group:]), 0.5 - np.sin(t[n_per_group:])]
    )
    pts = np.concatenate([upper, lower], axis=0)
    pts += noise_sd * normal_icdf(rng, pts.shape)
    labels = np.repeat([0, 1], n_per_group)
    return LabeledDataset(pts, labels, euclidean_space(2))


def gen_ring_uniform(n, seed, r_inner=1.0, r_outer=1.5):
    """Area-uniform points on the annulus r_inner <= |x| <= r_outer.

    Radius by CDF inversion r = sqrt(r_inner^2 + (r_outer^2 - r_inner^2) u),
    angle uniform.
    """
    rng = make_rng(seed)
    u = uniform_open(rng, n)
    r = np.sqrt(r_inner ** 2 + (r_outer ** 2 - r_inner ** 2) * u)
    theta = 2.0 * np.pi * uniform_open(rng, n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def gen_bivariate_exponential(n, seed):
    """Independent unit-rate exponential coordinates (density e^(-x-y))."""
    rng = make_rng(seed)
    return np.column_stack(
        [exponential_icdf(rng, 1.0, n), exponential_icdf(rng, 1.0, n)]
    )


def gen_wishart(n, k, m, sigma, seed):
    """n draws of S = sum_{i<=m} a_i a_i^T with a_i ~ N(0, sigma).

    Requires m >= k so every draw is SPD with probability 1.
    """
    if m < k:
        raise ValueError(f"need m >= k for SPD output, got m={m}, k={k}")
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape != (k, k):
        raise ValueError(f"sigma must be {k}x{k}, got {sigma.shape}")
    root = spd_power(sigma, 0.5)
    rng = make_rng(seed)
    z = normal_icdf(rng, (n, m, k))
    a = z @ root
    s = np.einsum("nmi,nmj->nij", a, a)
    return 0.5 * (s + s.transpose(0, 2, 1))


def gen_wishart_two_groups(n_per_group, k, m, scale2, seed):
    """The two-group SPD benchmark: identity covariance vs scale2 * identity."""
    mats1 = gen_wishart(n_per_group, k, m, np.eye(k), seed)
    mats2 = gen_wishart(n_per_group, k, m, scale2 * np.eye(k), seed + 1)
    pts = np.concatenate([mats1, mats2], axis=0)
    labels = np.repeat([0, 1], n_per_group)
    return LabeledDataset(pts, labels, spd_space(k))


def generate(spec):
    """Dispatch a :class:`GeneratorSpec` to its family generator."""
    fam, n, seed, p = spec.family, spec.n, spec.seed, spec.params
    if fam == "interlocking-rings":
        return gen_interlocking_rings(n, seed, rate=p.get("rate", 0.5))
    if fam == "two-moons":
        return gen_two_moons(n, p.get("noise_sd", 0.1), seed)
    if fam == "ring-uniform":
        return gen_ring_uniform(n, seed)
    if fam == "bivariate-exponential":
        return gen_bivariate_exponential(n, seed)
    if fam == "wishart":
        k = p.get("k", 5)
        return gen_wishart(n, k, p.get("m", 10), p.get("scale", 1.0) * np.eye(k), seed)
    raise ValueError(f"unknown generator family {fam!r}")


def sampler_uniform_box(low, high, dim):
    """i.i.d. sampler over an axis-aligned box, for oracles/diagnostics."""
    low = float(low)
    span = float(high) - low

    def sample(rng, n):
        return low + span * uniform_open(rng, (n, dim))

    return sample
