"""Angular frequencies of the dominant lines in a uniformly sampled signal."""
from __future__ import annotations

import math

import numpy as np
from scipy.signal import find_peaks
from scipy.signal.windows import hann


def peak_frequencies(signal, dt: float, n_peaks: int = 2, pad: int = 16) -> np.ndarray:
    """Strongest `n_peaks` spectral lines, ascending, in rad per unit time.

    Hann-windowed, zero-padded FFT; each peak is refined by a parabola
    through the log-magnitude at the peak bin and its neighbours.
    """
    x = np.asarray(signal, dtype=float)
    x = (x - x.mean()) * hann(len(x), sym=False)
    nfft = pad * (1 << (len(x) - 1).bit_length())
    mag = np.abs(np.fft.rfft(x, nfft))
    idx, _ = find_peaks(mag)
    if len(idx) == 0:
        return np.array([])
    idx = idx[np.argsort(mag[idx])[::-1][:n_peaks]]
    out = []
    for k in idx:
        a, b, c = np.log(mag[k - 1:k + 2] + 1e-300)
        shift = 0.5 * (a - c) / (a - 2 * b + c) if a - 2 * b + c != 0 else 0.0
        out.append(2 * math.pi * (k + shift) / (nfft * dt))
    return np.sort(np.array(out))
