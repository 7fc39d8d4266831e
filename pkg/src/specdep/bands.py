"""Epoch segmentation, Fourier magnitudes and frequency-band extraction.

A recording is a set of channels sampled at a fixed rate.  It is cut into
epochs of ``T`` samples, each epoch is mapped to the magnitudes of its
discrete Fourier coefficients at the fundamental frequencies ``k / T``
(cycles per sample, i.e. ``k * fs / T`` Hz), and the magnitudes falling in a
named frequency band are collected into one vector per (channel, epoch).
Band vectors are finally rescaled into [0, 1] using a single global
minimum/maximum over the whole epoch range so that statistics computed for
different epochs stay comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BandSpec",
    "EpochTensor",
    "BandMagnitudes",
    "StandardizedMagnitudes",
    "default_bands",
    "segment_epochs",
    "fourier_magnitudes",
    "band_bin_indices",
    "band_extract",
    "band_magnitude_matrix",
    "standardize",
    "unstandardize",
]

# Relative tolerance used to match a notch frequency to a Fourier bin.
_NOTCH_RTOL = 1e-9


@dataclass(frozen=True)
class BandSpec:
    """A half-open frequency interval ``(lo_hz, hi_hz]`` with optional notches.

    Half-open intervals make adjacent bands disjoint.  ``notch_hz`` lists
    frequencies whose Fourier bin is removed from the band (a bin is dropped
    only if its frequency coincides with the notch value; no time-domain
    filtering is applied).
    """

    name: str
    lo_hz: float
    hi_hz: float
    notch_hz: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.lo_hz < self.hi_hz:
            raise ValueError(f"band {self.name!r}: need 0 <= lo < hi, got ({self.lo_hz}, {self.hi_hz}]")
        for f in self.notch_hz:
            if not self.lo_hz < f <= self.hi_hz:
                raise ValueError(f"band {self.name!r}: notch {f} Hz outside ({self.lo_hz}, {self.hi_hz}]")


def default_bands(include_notch: bool = True) -> tuple[BandSpec, ...]:
    """The five standard bands: delta (0,4], theta (4,8], alpha (8,12],
    beta (12,30] and gamma (30,300] Hz.

    With ``include_notch`` (the default) the gamma band excludes the 60 Hz
    mains bin, leaving 269 bins at 1 Hz resolution; without it the gamma band
    keeps all 270 bins.
    """
    gamma_notch = (60.0,) if include_notch else ()
    return (
        BandSpec("delta", 0.0, 4.0),
        BandSpec("theta", 4.0, 8.0),
        BandSpec("alpha", 8.0, 12.0),
        BandSpec("beta", 12.0, 30.0),
        BandSpec("gamma", 30.0, 300.0, gamma_notch),
    )


@dataclass(frozen=True)
class EpochTensor:
    """Samples arranged ``(channel, epoch, time)`` plus sampling metadata."""

    samples: np.ndarray
    sampling_rate_hz: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 3:
            raise ValueError(f"samples must be (channel, epoch, time), got shape {samples.shape}")
        if samples.shape[2] % 2 != 0:
            raise ValueError(f"epoch length must be even, got {samples.shape[2]}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain non-finite values")
        if self.sampling_rate_hz <= 0:
            raise ValueError("sampling_rate_hz must be positive")

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_epochs(self) -> int:
        return self.samples.shape[1]

    @property
    def n_samples(self) -> int:
        """Samples per epoch."""
        return self.samples.shape[2]


@dataclass(frozen=True)
class BandMagnitudes:
    """Magnitudes of the Fourier coefficients of one band, one channel, one epoch."""

    channel: int
    epoch: int
    band: BandSpec
    freqs_hz: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        freqs = np.asarray(self.freqs_hz, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "freqs_hz", freqs)
        object.__setattr__(self, "values", values)
        if freqs.shape != values.shape or freqs.ndim != 1:
            raise ValueError("freqs_hz and values must be 1-D arrays of equal length")
        if np.any(values < 0):
            raise ValueError("magnitudes must be nonnegative")


@dataclass(frozen=True)
class StandardizedMagnitudes:
    """Band magnitudes rescaled to [0, 1] with the scaling bounds retained."""

    channel: int
    epoch: int
    band: BandSpec
    freqs_hz: np.ndarray
    values: np.ndarray
    global_min: float
    global_max: float


def segment_epochs(
    streams,
    epoch_len: int,
    sampling_rate_hz: float,
    *,
    stride: int | None = None,
    allow_truncate: bool = False,
) -> EpochTensor:
    """Cut per-channel sample streams into an :class:`EpochTensor`.

    Parameters
    ----------
    streams : array_like
        ``(n_channels, n_samples)`` array, or a sequence of equal-length 1-D
        per-channel arrays.
    epoch_len : int
        Samples per epoch (must be even).
    stride : int, optional
        Offset between consecutive epoch starts.  Defaults to ``epoch_len``
        (non-overlapping); smaller values give overlapping epochs.
    allow_truncate : bool
        Permit dropping trailing samples that do not fill a final epoch.
    """
    arr = np.atleast_2d(np.asarray(streams, dtype=float))
    if arr.ndim != 2:
        raise ValueError("streams must be 2-D (channel, time) or a list of 1-D arrays")
    n = arr.shape[1]
    if epoch_len <= 0 or epoch_len % 2 != 0:
        raise ValueError(f"epoch_len must be a positive even integer, got {epoch_len}")
    if n < epoch_len:
        raise ValueError(f"stream length {n} is shorter than one epoch ({epoch_len})")
    step = epoch_len if stride is None else int(stride)
    if step <= 0:
        raise ValueError("stride must be positive")
    n_epochs = (n - epoch_len) // step + 1
    leftover = n - ((n_epochs - 1) * step + epoch_len)
    if leftover and not allow_truncate:
        raise ValueError(
            f"{leftover} trailing samples do not fill an epoch; "
            "pass allow_truncate=True to drop them"
        )
    starts = np.arange(n_epochs) * step
    samples = np.stack([arr[:, s : s + epoch_len] for s in starts], axis=1)
    return EpochTensor(samples=samples, sampling_rate_hz=sampling_rate_hz)


def fourier_magnitudes(epoch: np.ndarray) -> np.ndarray:
    """Magnitudes ``|f_k|`` of the normalized DFT of one epoch.

    ``f_k = T**-0.5 * sum_t x(t) exp(-i 2 pi k t / T)`` for ``k = 0 .. T/2``;
    the returned array has length ``T // 2 + 1``.
    """
    x = np.asarray(epoch, dtype=float)
    if x.ndim != 1:
        raise ValueError("epoch must be a 1-D vector")
    if x.size == 0 or x.size % 2 != 0:
        raise ValueError(f"epoch length must be a positive even integer, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("epoch contains non-finite values")
    return np.abs(np.fft.rfft(x)) / np.sqrt(x.size)


def band_bin_indices(
    band: BandSpec, n_samples: int, sampling_rate_hz: float
) -> tuple[np.ndarray, np.ndarray]:
    """Fourier bin indices and frequencies (Hz) retained by ``band``.

    Bin ``k`` sits at ``k * sampling_rate_hz / n_samples`` Hz; bins with
    ``lo < f <= hi`` are kept, minus any bin matching a notch frequency.
    The DC bin (k = 0) is never retained because band intervals are open at
    the lower edge.
    """
    nyquist = sampling_rate_hz / 2.0
    if band.hi_hz > nyquist * (1 + 1e-12):
        raise ValueError(f"band {band.name!r} upper edge {band.hi_hz} Hz exceeds Nyquist {nyquist} Hz")
    resolution = sampling_rate_hz / n_samples
    k = np.arange(n_samples // 2 + 1)
    freqs = k * resolution
    keep = (freqs > band.lo_hz) & (freqs <= band.hi_hz)
    for notch in band.notch_hz:
        keep &= ~np.isclose(freqs, notch, rtol=_NOTCH_RTOL, atol=0.0)
    if not np.any(keep):
        raise ValueError(f"band {band.name!r} contains no fundamental frequency at resolution {resolution} Hz")
    return k[keep], freqs[keep]


def band_extract(
    mags: np.ndarray,
    band: BandSpec,
    sampling_rate_hz: float,
    *,
    channel: int = 0,
    epoch: int = 0,
) -> BandMagnitudes:
    """Select the band's bins out of a full half-spectrum magnitude vector."""
    mags = np.asarray(mags, dtype=float)
    if mags.ndim != 1:
        raise ValueError("mags must be the 1-D half-spectrum magnitude vector")
    n_samples = 2 * (mags.size - 1)
    idx, freqs = band_bin_indices(band, n_samples, sampling_rate_hz)
    return BandMagnitudes(channel=channel, epoch=epoch, band=band, freqs_hz=freqs, values=mags[idx])


def band_magnitude_matrix(
    tensor: EpochTensor, band: BandSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Band magnitudes for every channel and epoch of a tensor.

    Returns
    -------
    values : ndarray, shape (n_channels, n_epochs, n_bins)
    freqs_hz : ndarray, shape (n_bins,)
    """
    idx, freqs = band_bin_indices(band, tensor.n_samples, tensor.sampling_rate_hz)
    spectra = np.abs(np.fft.rfft(tensor.samples, axis=2)) / np.sqrt(tensor.n_samples)
    return spectra[:, :, idx], freqs


def standardize(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Affinely map an epoch-by-bin matrix onto [0, 1].

    The same global minimum and maximum, taken over every epoch in ``values``
    (rows are epochs), scale all entries; this keeps statistics computed from
    different epochs on one common scale.

    Returns
    -------
    scaled : ndarray, same shape as ``values``
    global_min, global_max : float
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValueError("values must be a 2-D (epoch, bin) matrix with at least 2 epochs")
    gmin = float(arr.min())
    gmax = float(arr.max())
    if not gmax > gmin:
        raise ValueError("degenerate range: global max equals global min")
    return (arr - gmin) / (gmax - gmin), gmin, gmax


def unstandardize(scaled: np.ndarray, global_min: float, global_max: float) -> np.ndarray:
    """Invert :func:`standardize` given the stored scaling bounds."""
    return np.asarray(scaled, dtype=float) * (global_max - global_min) + global_min
