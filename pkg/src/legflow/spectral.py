"""Periodic differentiation and quadrature on uniform grids.

All routines work along axis 0, so an ``(n,)`` signal and an ``(n, d)``
stack of coordinate columns are handled the same way.
"""

import numpy as np


def uniform_grid(n, period=1.0):
    """Uniform periodic grid ``[0, period)`` with ``n`` nodes."""
    return period * np.arange(n) / n


def wavenumbers(n, period=1.0):
    """Angular wavenumbers matching ``np.fft.fft`` ordering."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=period / n)


def _expand(k, f):
    return k.reshape((-1,) + (1,) * (f.ndim - 1))


def spectral_derivative(f, order=1, period=1.0):
    """Derivative of periodic samples via the FFT.

    The Nyquist coefficient is dropped for odd orders, which keeps the
    result real and makes the operator antisymmetric.
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    k = wavenumbers(n, period)
    mult = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[n // 2] = 0.0
    F = np.fft.fft(f, axis=0)
    return np.real(np.fft.ifft(_expand(mult, f) * F, axis=0))


def fd4_derivative(f, order=1, period=1.0):
    """Fourth-order central differences on a periodic grid.

    Fallback for rough data where spectral derivatives ring.
    """
    f = np.asarray(f, dtype=float)
    h = period / f.shape[0]
    fp1, fm1 = np.roll(f, -1, axis=0), np.roll(f, 1, axis=0)
    fp2, fm2 = np.roll(f, -2, axis=0), np.roll(f, 2, axis=0)
    if order == 1:
        return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h)
    if order == 2:
        return (-fp2 + 16.0 * fp1 - 30.0 * f + 16.0 * fm1 - fm2) / (12.0 * h * h)
    raise ValueError(f"fd4_derivative supports order 1 or 2, got {order}")


def derivative(f, order=1, period=1.0, method="spectral"):
    if method == "spectral":
        return spectral_derivative(f, order, period)
    if method == "fd4":
        return fd4_derivative(f, order, period)
    raise ValueError(f"unknown derivative method {method!r}")


def periodic_integral(f, period=1.0):
    """Trapezoid rule over one period (spectrally accurate for smooth data)."""
    f = np.asarray(f, dtype=float)
    return period * np.mean(f, axis=0)


def cumulative_integral(f, period=1.0):
    """Antiderivative ``F(u) = int_0^u f`` sampled on the grid.

    ``f`` need not have zero mean; the mean contributes the linear part
    ``mean * u`` and the oscillating part is integrated spectrally.
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    k = wavenumbers(n, period)
    F = np.fft.fft(f, axis=0)
    mean = F[0] / n
    inv = np.zeros(n, dtype=complex)
    inv[1:] = 1.0 / (1j * k[1:])
    if n % 2 == 0:
        inv[n // 2] = 0.0
    G = _expand(inv, f) * F
    G[0] = 0.0
    g = np.real(np.fft.ifft(G, axis=0))
    g = g - g[0]
    u = uniform_grid(n, period)
    return g + _expand(u, f) * np.real(mean)


def fourier_eval(f, x, period=1.0):
    """Evaluate the trigonometric interpolant of samples ``f`` at points ``x``.

    Direct O(n m) sum; meant for resampling, not for inner loops.
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    x = np.asarray(x, dtype=float)
    F = np.fft.fft(f, axis=0) / n
    k = wavenumbers(n, period)
    if n % 2 == 0:
        # split the Nyquist term symmetrically so the interpolant is real
        F = F.copy()
        F[n // 2] *= 0.5
        k = np.append(k, -k[n // 2])
        F = np.concatenate([F, F[n // 2: n // 2 + 1]], axis=0)
    phase = np.exp(1j * np.outer(x, k))
    return np.real(phase @ F)
