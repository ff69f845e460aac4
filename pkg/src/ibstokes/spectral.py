"""Periodic spectral operators for interface data and 2D grid fields.

Conventions follow the discrete Fourier transform with the 1/N factor on the
forward transform and wavenumbers k in {-N/2+1, ..., N/2}.  numpy's FFT stores
the unpaired Nyquist mode at index N/2 with the opposite sign convention; all
odd-symmetry multipliers (ik, -i sgn k, 1/ik) zero that mode so results stay
real and skew-symmetry is preserved.  Even multipliers keep it.
"""

import numpy as np

from .errors import InvalidGridError, SymmetryError

TWO_PI = 2.0 * np.pi

# cheap instrumentation used by the cost-scaling report; a 2D transform
# counts as one event
counters = {"fft": 0}


def reset_counters():
    counters["fft"] = 0


def _check_1d(f):
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size == 0 or f.size % 2 != 0:
        raise InvalidGridError(f"need a nonempty even-length 1D sample array, got shape {f.shape}")
    return f


def integer_modes(n):
    """FFT-ordered integer mode numbers m in {-n/2, ..., n/2-1} (numpy layout)."""
    return np.fft.fftfreq(n, d=1.0 / n)


def wavenumbers(n, period=TWO_PI):
    """FFT-ordered physical wavenumbers 2*pi*m/period."""
    return TWO_PI * integer_modes(n) / period


def forward_1d(f):
    """Forward transform with the 1/N normalization."""
    f = np.asarray(f)
    counters["fft"] += 1
    return np.fft.fft(f) / f.size


def inverse_1d(fh):
    fh = np.asarray(fh)
    counters["fft"] += 1
    return np.fft.ifft(fh * fh.size)


def forward_2d(field):
    field = np.asarray(field)
    counters["fft"] += 1
    return np.fft.fft2(field) / field.size


def inverse_2d(fh):
    fh = np.asarray(fh)
    counters["fft"] += 1
    return np.fft.ifft2(fh * fh.size)


def derivative_1d(f, order=1, period=TWO_PI):
    """Spectral derivative of periodic samples.

    Parameters
    ----------
    f : periodic samples, even length
    order : positive integer derivative order
    period : parameter-domain length

    The Nyquist mode is zeroed for odd orders (unpaired mode under an odd
    multiplier), kept for even orders.
    """
    f = _check_1d(f)
    if order < 1 or int(order) != order:
        raise InvalidGridError(f"derivative order must be a positive integer, got {order}")
    n = f.size
    k = wavenumbers(n, period)
    counters["fft"] += 2
    fh = np.fft.fft(f)
    fh *= (1j * k) ** order
    if order % 2 == 1:
        fh[n // 2] = 0.0
    return np.real(np.fft.ifft(fh))


def hilbert_transform(f, period=TWO_PI):
    """Periodic Hilbert transform: multiplier -i*sgn(k), zero mean mode."""
    f = _check_1d(f)
    n = f.size
    m = integer_modes(n)
    counters["fft"] += 2
    fh = np.fft.fft(f)
    fh *= -1j * np.sign(m)
    fh[n // 2] = 0.0
    return np.real(np.fft.ifft(fh))


def apply_symbol_1d(f, symbol, period=TWO_PI, real_output=True):
    """Apply a diagonal Fourier multiplier k -> symbol(k).

    ``symbol`` is either a callable evaluated on the physical wavenumber array
    or a precomputed FFT-ordered array.  With ``real_output`` the symbol must
    satisfy symbol(-k) = conj(symbol(k)) and be real at k=0 and Nyquist.
    """
    f = _check_1d(f)
    n = f.size
    k = wavenumbers(n, period)
    sig = symbol(k) if callable(symbol) else np.asarray(symbol)
    if sig.shape != (n,):
        raise InvalidGridError(f"symbol array has shape {sig.shape}, expected ({n},)")
    sig = sig.astype(complex)
    if real_output:
        paired = np.arange(1, n // 2)
        mismatch = np.max(np.abs(sig[-paired] - np.conj(sig[paired]))) if paired.size else 0.0
        scale = max(np.max(np.abs(sig)), 1e-300)
        if mismatch > 1e-12 * scale or abs(sig[0].imag) > 1e-12 * scale \
                or abs(sig[n // 2].imag) > 1e-12 * scale:
            raise SymmetryError("symbol is not conjugate-symmetric; real output impossible")
    counters["fft"] += 2
    out = np.fft.ifft(np.fft.fft(f) * sig)
    return np.real(out) if real_output else out


def antiderivative(f, value_at_zero=0.0, period=TWO_PI):
    """Spectral antiderivative g with g' = f and g(0) = value_at_zero.

    The mean of f contributes a linear-in-alpha term mean(f)*alpha, so g is
    periodic only when f has zero mean.
    """
    f = _check_1d(f)
    n = f.size
    k = wavenumbers(n, period)
    counters["fft"] += 2
    fh = np.fft.fft(f)
    mean = fh[0].real / n
    gh = np.zeros_like(fh)
    nz = k != 0
    gh[nz] = fh[nz] / (1j * k[nz])
    gh[n // 2] = 0.0
    g = np.real(np.fft.ifft(gh))
    alpha = period * np.arange(n) / n
    return g - g[0] + mean * alpha + value_at_zero


def derivative_2d(field, axis, length=1.0):
    """Per-axis spectral derivative of an N x N periodic grid field.

    ``axis`` is "x" (first index) or "y" (second index).
    """
    field = np.asarray(field, dtype=float)
    if field.ndim != 2 or field.shape[0] != field.shape[1] or field.shape[0] == 0:
        raise InvalidGridError(f"need a square N x N grid, got shape {field.shape}")
    n = field.shape[0]
    k = wavenumbers(n, length)
    k = np.where(integer_modes(n) == -(n // 2), 0.0, k)
    counters["fft"] += 2
    if axis == "x":
        fh = np.fft.fft(field, axis=0)
        fh *= (1j * k)[:, None]
        return np.real(np.fft.ifft(fh, axis=0))
    if axis == "y":
        fh = np.fft.fft(field, axis=1)
        fh *= (1j * k)[None, :]
        return np.real(np.fft.ifft(fh, axis=1))
    raise InvalidGridError(f"axis must be 'x' or 'y', got {axis!r}")


def dealias_23(f):
    """Optional 2/3-rule filter for interface data (off by default everywhere)."""
    f = _check_1d(f)
    n = f.size
    m = integer_modes(n)
    counters["fft"] += 2
    fh = np.fft.fft(f)
    fh[np.abs(m) > n / 3] = 0.0
    return np.real(np.fft.ifft(fh))
