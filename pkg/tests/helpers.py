"""Shared builders and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths: the
Yule-Walker solve uses a dense stacked system instead of the order
recursion, and the spectral oracle is a smoothed periodogram of simulated
data.
"""

import numpy as np

from vardtf import make_var


def random_stable_model(seed, dim=3, order=2, radius=0.6, sigma="random"):
    """Random VAR with companion spectral radius rescaled to ``radius``.

    Rescaling lag u by s**u multiplies every companion eigenvalue by s, so
    the target radius is hit exactly.
    """
    rng = np.random.default_rng(seed)
    coeffs = [rng.normal(scale=0.4, size=(dim, dim)) for _ in range(order)]
    rho = _companion_radius(coeffs, dim)
    if rho > 0:
        scale = radius / rho
        coeffs = [a * scale ** (u + 1) for u, a in enumerate(coeffs)]
    if sigma == "identity":
        sig = np.eye(dim)
    else:
        w = rng.normal(size=(dim, 2 * dim)) / np.sqrt(2 * dim)
        sig = w @ w.T + 0.1 * np.eye(dim)
    return make_var(coeffs, sig)


def dense_stable_model(seed, dim=3, order=2, radius=0.6):
    """Random stable VAR with every coefficient entry bounded away from zero."""
    rng = np.random.default_rng(seed)
    coeffs = [
        rng.uniform(0.2, 0.8, size=(dim, dim)) * rng.choice([-1.0, 1.0], size=(dim, dim))
        for _ in range(order)
    ]
    rho = _companion_radius(coeffs, dim)
    scale = radius / rho
    coeffs = [a * scale ** (u + 1) for u, a in enumerate(coeffs)]
    return make_var(coeffs, np.eye(dim))


def block_diagonal_model(seed, block_dims=(2, 2), order=2, radius=0.6):
    """Stable VAR made of causally isolated channel blocks."""
    rng = np.random.default_rng(seed)
    dim = sum(block_dims)
    coeffs = [np.zeros((dim, dim)) for _ in range(order)]
    start = 0
    for bd in block_dims:
        stop = start + bd
        for a in coeffs:
            a[start:stop, start:stop] = rng.normal(scale=0.4, size=(bd, bd))
        start = stop
    rho = _companion_radius(coeffs, dim)
    if rho > 0:
        scale = radius / rho
        coeffs = [a * scale ** (u + 1) for u, a in enumerate(coeffs)]
    return make_var(coeffs, np.eye(dim))


def _companion_radius(coeffs, dim):
    p = len(coeffs)
    comp = np.zeros((dim * p, dim * p))
    comp[:dim] = np.hstack(coeffs)
    if p > 1:
        comp[dim:, : dim * (p - 1)] = np.eye(dim * (p - 1))
    return float(np.max(np.abs(np.linalg.eigvals(comp))))


def direct_yule_walker(gammas, q):
    """Order-q predictor by solving the stacked block Yule-Walker system.

    ``gammas[h]`` is Gamma(h) = E[X(t) X(t-h)']. Returns (phis, v) with
    ``phis`` of shape (q, d, d). Independent oracle for the order
    recursion: one dense solve, no recursion.
    """
    d = gammas.shape[1]

    def gamma(h):
        return gammas[h] if h >= 0 else gammas[-h].T

    big = np.zeros((q * d, q * d))
    rhs = np.zeros((d, q * d))
    for u in range(1, q + 1):
        rhs[:, (u - 1) * d : u * d] = gamma(u)
        for v in range(1, q + 1):
            big[(u - 1) * d : u * d, (v - 1) * d : v * d] = gamma(v - u)
    stacked = np.linalg.solve(big.T, rhs.T).T
    phis = np.stack([stacked[:, (u - 1) * d : u * d] for u in range(1, q + 1)])
    v = gamma(0).copy()
    for u in range(1, q + 1):
        v -= phis[u - 1] @ gamma(u).T
    return phis, 0.5 * (v + v.T)


def smoothed_periodogram(samples, half_width):
    """Boxcar-smoothed periodogram matrices at the Fourier frequencies.

    Returns (freqs, values) where ``freqs[k] = 2 pi k / T`` for
    k = 0..T//2 and ``values[k]`` is the (d, d) Hermitian estimate of
    f(freqs[k]). Edges are handled by reflecting with the conjugate
    symmetry f(-lambda) = conj(f(lambda)).
    """
    samples = np.asarray(samples, dtype=float)
    t_len, d = samples.shape
    centered = samples - samples.mean(axis=0)
    spec = np.fft.rfft(centered, axis=0)  # (K, d)
    raw = np.einsum("kj,kl->kjl", spec, spec.conj()) / (2.0 * np.pi * t_len)
    k_count = raw.shape[0]
    m = half_width
    pre = raw[1 : m + 1][::-1].conj()
    post = raw[k_count - m - 1 : k_count - 1][::-1].conj()
    padded = np.concatenate([pre, raw, post], axis=0)
    csum = np.cumsum(padded, axis=0)
    width = 2 * m + 1
    smoothed = np.empty_like(raw)
    smoothed[0] = csum[width - 1] / width
    smoothed[1:] = (csum[width:] - csum[: k_count - 1]) / width
    freqs = 2.0 * np.pi * np.arange(k_count) / t_len
    return freqs, smoothed


def fourier_subgrid(t_len, count=257):
    """Fourier-frequency indices closest to an even grid over (0, pi)."""
    targets = np.linspace(0.0, np.pi, count)[1:-1]
    ks = np.unique(np.round(targets * t_len / (2.0 * np.pi)).astype(int))
    ks = ks[(ks >= 1) & (ks < t_len // 2)]
    return ks
