"""FFT-guided frequency extraction, Linear Fourier Model fitting and the
synthetic recovery benchmark. Frequencies are in cycles/sample."""

import json

import numpy as np

from . import _freqprior
from ._freqprior import FreqpriorError, hit_rate

__all__ = [
    "FreqpriorError",
    "standardize",
    "power_spectrum",
    "top_k_peaks",
    "extract_frequencies",
    "train_lfm",
    "generate_synthetic",
    "hit_rate",
    "run_benchmark",
    "forecast_extrapolate",
    "forecast_metrics",
]


def _matrix(values):
    a = np.asarray(values, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"expected a 1-D or 2-D array, got {a.ndim} dimensions")
    return a


def standardize(values):
    """Returns (z, mean, std) with per-channel population statistics."""
    return _freqprior.standardize(_matrix(values))


def power_spectrum(values):
    return np.asarray(_freqprior.power_spectrum(_matrix(values)))


def top_k_peaks(values, k, exclude=()):
    return _freqprior.top_k_peaks(_matrix(values), k, set(exclude))


def extract_frequencies(values, k=5, epsilon=None, max_sweeps=50, rtol=1e-12):
    return _freqprior.extract_frequencies(_matrix(values), k, epsilon, max_sweeps, rtol)


def train_lfm(y, k=5, lr=1e-3, lr_freq=1e-6, steps=2000, init="fft", seed=0, log_every=100):
    return _freqprior.train_lfm(_matrix(y), k, lr, lr_freq, steps, init, seed, log_every)


def generate_synthetic(length=512, noise_std=0.5, seed=0, **tones):
    """Standardized low/high tone mixture plus noise, shape (length,)."""
    return _freqprior.generate_synthetic(length=length, noise_std=noise_std, seed=seed, **tones)[:, 0]


def run_benchmark(runs=10, master_seed=0, steps=2000, k=5, delta=0.005, length=512, noise_std=0.5, threads=0):
    """Runs the {fft, random} x {1e-6, 1e-3} grid and returns the report as a dict."""
    text = _freqprior.run_benchmark_json(runs, master_seed, steps, k, delta, length, noise_std, threads)
    return json.loads(text)


def forecast_extrapolate(freqs, amplitudes, observed, horizon):
    amps = np.atleast_2d(np.asarray(amplitudes, dtype=np.float64))
    return _freqprior.forecast_extrapolate(list(freqs), amps, observed, horizon)


def forecast_metrics(pred, truth):
    """Returns (mse, mae)."""
    return _freqprior.forecast_metrics(_matrix(pred), _matrix(truth))
