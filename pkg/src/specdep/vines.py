"""D-vine copulas over epoch ranges and Clarke's comparison test.

A whole epoch range is modeled by a drawable-vine pair-copula construction:
the first tree joins consecutive epochs, deeper trees join epochs further
apart conditionally on the ones between them (propagated through
h-functions), and trees beyond a truncation level are taken independent.
Two fitted vines are compared by Clarke's test: the per-observation
log-density difference ``m_i`` is reduced to the count ``xi`` of positive
entries, which is Binomial(n, 1/2) when the two models describe the data
equally well, giving an exact two-sided p-value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sp_stats

from .bands import BandSpec, band_bin_indices, standardize
from .copulas import (
    DEFAULT_PANEL,
    PSEUDO_OBS_EPS,
    CopulaModel,
    Family,
    copula_logpdf,
    copula_loglik,
    h_function,
    mle_theta,
    select_family,
)
from .ks import fit_epoch_marginals
from .marginals import BootstrapConfig, GammaFit, gamma_cdf

__all__ = [
    "DVineModel",
    "ClarkeResult",
    "CompareConfig",
    "build_dvine",
    "dvine_loglik_pointwise",
    "clarke_test",
    "compare_prepost",
    "compare_channels",
]


@dataclass(frozen=True)
class DVineModel:
    """A truncated D-vine: per-tree pair copulas over an ordered variable set."""

    order: tuple[int, ...]
    trees: tuple[tuple[CopulaModel, ...], ...]
    truncation_level: int
    loglik: float
    marginals: tuple[GammaFit, ...] | None = None

    @property
    def n_vars(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class ClarkeResult:
    """Clarke's test outcome for two models evaluated on n shared indices."""

    xi: int
    n: int
    p_value: float
    m: np.ndarray

    def to_dict(self) -> dict:
        return {"xi": self.xi, "n": self.n, "p_value": self.p_value}


@dataclass(frozen=True)
class CompareConfig:
    """Settings for whole-regime dependence comparisons."""

    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    truncation_level: int = 2
    panel: tuple[Family, ...] = DEFAULT_PANEL


def _clamp(p: np.ndarray) -> np.ndarray:
    return np.clip(p, PSEUDO_OBS_EPS, 1.0 - PSEUDO_OBS_EPS)


def _fit_pair(left: np.ndarray, right: np.ndarray, panel) -> CopulaModel:
    """Family by AIC at the tau-inverted parameter, then the parameter by
    maximum likelihood (the standard sequential vine recipe)."""
    selected = select_family(left, right, panel)
    if selected.family is Family.INDEPENDENT:
        return selected
    theta = mle_theta(selected.family, left, right)
    return CopulaModel(selected.family, theta, source="mle")


def build_dvine(
    data: np.ndarray,
    truncation_level: int = 2,
    panel: tuple[Family, ...] = DEFAULT_PANEL,
    *,
    order: tuple[int, ...] | None = None,
    marginals: tuple[GammaFit, ...] | None = None,
) -> DVineModel:
    """Sequentially fit a D-vine to pseudo-observations.

    Parameters
    ----------
    data : ndarray, shape (n_obs, n_vars)
        Pseudo-observations in (0, 1); columns follow the vine order
        (here: temporal epoch order).
    truncation_level : int
        Trees beyond this level are set to independence.
    panel : tuple of Family
        Candidate families for every pair.
    order : tuple of int, optional
        Variable labels, defaults to ``0 .. n_vars - 1``.
    """
    u = np.asarray(data, dtype=float)
    if u.ndim != 2 or u.shape[1] < 2:
        raise ValueError("data must be (n_obs, n_vars) with n_vars >= 2")
    if u.shape[0] < 4:
        raise ValueError("need at least 4 observations per variable")
    if np.any((u <= 0) | (u >= 1)):
        raise ValueError("pseudo-observations must lie strictly inside (0, 1)")
    if truncation_level < 1:
        raise ValueError("truncation_level must be >= 1")
    n_vars = u.shape[1]
    if order is None:
        order = tuple(range(n_vars))
    if len(order) != n_vars:
        raise ValueError("order length must match the number of columns")

    depth = min(truncation_level, n_vars - 1)
    left = [u[:, j] for j in range(n_vars - 1)]
    right = [u[:, j + 1] for j in range(n_vars - 1)]

    trees: list[tuple[CopulaModel, ...]] = []
    total = 0.0
    for level in range(1, depth + 1):
        models = []
        for j in range(len(left)):
            model = _fit_pair(left[j], right[j], panel)
            total += copula_loglik(model, left[j], right[j])
            models.append(model)
        trees.append(tuple(models))
        if level == depth:
            break
        # conditional pseudo-observations feeding the next tree
        new_left = [
            _clamp(h_function(models[j], left[j], _clamp(right[j])))
            for j in range(len(left) - 1)
        ]
        new_right = [
            _clamp(h_function(models[j + 1], right[j + 1], _clamp(left[j + 1])))
            for j in range(len(left) - 1)
        ]
        left, right = new_left, new_right

    return DVineModel(
        order=tuple(order),
        trees=tuple(trees),
        truncation_level=truncation_level,
        loglik=float(total),
        marginals=marginals,
    )


def dvine_loglik_pointwise(model: DVineModel, data: np.ndarray) -> np.ndarray:
    """Per-observation log density of a fitted D-vine.

    Replays the h-function recursion with the stored pair copulas and sums
    the pair log densities tree by tree; the vector sums to the fitting-time
    total log-likelihood when evaluated on the training data.
    """
    u = np.asarray(data, dtype=float)
    if u.ndim != 2 or u.shape[1] != model.n_vars:
        raise ValueError(
            f"data must have {model.n_vars} columns matching the vine order, got shape {u.shape}"
        )
    n_obs = u.shape[0]
    out = np.zeros(n_obs)
    left = [u[:, j] for j in range(model.n_vars - 1)]
    right = [u[:, j + 1] for j in range(model.n_vars - 1)]
    for level, models in enumerate(model.trees, start=1):
        for j, pair in enumerate(models):
            if pair.family is not Family.INDEPENDENT:
                out += copula_logpdf(pair, left[j], right[j])
        if level == len(model.trees):
            break
        new_left = [
            _clamp(h_function(models[j], left[j], _clamp(right[j])))
            for j in range(len(left) - 1)
        ]
        new_right = [
            _clamp(h_function(models[j + 1], right[j + 1], _clamp(left[j + 1])))
            for j in range(len(left) - 1)
        ]
        left, right = new_left, new_right
    return out


def clarke_test(loglik_1: np.ndarray, loglik_2: np.ndarray) -> ClarkeResult:
    """Clarke's sign test on per-observation log-likelihood differences.

    ``m_i = loglik_1[i] - loglik_2[i]``; ``xi`` counts strictly positive
    entries (exact zeros count as non-exceeding); under model equivalence
    ``xi ~ Binomial(n, 1/2)`` and the reported p-value is the exact
    two-sided one: ``min(1, 2 min(P(X <= xi), P(X >= xi)))``.
    """
    a = np.asarray(loglik_1, dtype=float)
    b = np.asarray(loglik_2, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("log-likelihood vectors must be 1-D with equal length")
    if a.size < 1:
        raise ValueError("need at least one observation")
    m = a - b
    xi = int(np.sum(m > 0))
    n = int(m.size)
    p_low = sp_stats.binom.cdf(xi, n, 0.5)
    p_high = sp_stats.binom.sf(xi - 1, n, 0.5)
    p = float(min(1.0, 2.0 * min(p_low, p_high)))
    return ClarkeResult(xi=xi, n=n, p_value=p, m=m)


def _epoch_pseudo_matrix(
    epochs: np.ndarray,
    band: BandSpec,
    sampling_rate_hz: float,
    cfg: BootstrapConfig,
    scaling: tuple[float, float],
    std_values: np.ndarray,
    *,
    channel: int,
    epoch_offset: int,
) -> tuple[np.ndarray, list[GammaFit]]:
    """Pseudo-observations (n_bins, n_epochs) through per-epoch Gamma fits."""
    fits = fit_epoch_marginals(
        epochs, band, sampling_rate_hz, cfg, scaling,
        channel=channel, epoch_offset=epoch_offset,
    )
    cols = [
        _clamp(gamma_cdf(fits[j], std_values[j])) for j in range(epochs.shape[0])
    ]
    return np.column_stack(cols), fits


def _band_standardized(tensor_samples: np.ndarray, band: BandSpec, fs: float):
    idx, _ = band_bin_indices(band, tensor_samples.shape[-1], fs)
    spectra = np.abs(np.fft.rfft(tensor_samples, axis=-1)) / np.sqrt(tensor_samples.shape[-1])
    values = spectra[..., idx]
    std_values, gmin, gmax = standardize(values)
    return std_values, (gmin, gmax)


def compare_prepost(
    epochs: np.ndarray,
    band: BandSpec,
    sampling_rate_hz: float,
    pre: tuple[int, int],
    post: tuple[int, int],
    config: CompareConfig,
    *,
    channel: int = 0,
) -> ClarkeResult:
    """Compare the dependence structure of two epoch ranges of one channel.

    Both ranges (half-open 0-based ``(start, stop)`` index pairs into the
    epoch axis) are modeled by D-vines over their per-epoch Gamma pseudo-
    observations; band magnitudes are rescaled with one global min/max taken
    over the union of both ranges.  Each vine is evaluated pointwise on its
    own range's observations and the per-frequency log-density difference
    feeds Clarke's test.
    """
    arr = np.asarray(epochs, dtype=float)
    if arr.ndim != 2:
        raise ValueError("epochs must be a 2-D (epoch, time) array")
    a0, a1 = pre
    b0, b1 = post
    if not (0 <= a0 < a1 <= arr.shape[0] and 0 <= b0 < b1 <= arr.shape[0]):
        raise ValueError("epoch ranges out of bounds")
    if a1 - a0 != b1 - b0:
        raise ValueError("the two ranges must contain the same number of epochs")
    # identical ranges are the degenerate self-comparison (m vanishes);
    # partial overlap is a configuration error
    if (a0, a1) != (b0, b1) and max(a0, b0) < min(a1, b1):
        raise ValueError("epoch ranges must not partially overlap")

    both = np.concatenate([arr[a0:a1], arr[b0:b1]], axis=0)
    std_values, scaling = _band_standardized(both, band, sampling_rate_hz)
    n_pre = a1 - a0

    u_pre, _ = _epoch_pseudo_matrix(
        arr[a0:a1], band, sampling_rate_hz, config.bootstrap, scaling,
        std_values[:n_pre], channel=channel, epoch_offset=a0,
    )
    u_post, _ = _epoch_pseudo_matrix(
        arr[b0:b1], band, sampling_rate_hz, config.bootstrap, scaling,
        std_values[n_pre:], channel=channel, epoch_offset=b0,
    )
    vine_pre = build_dvine(u_pre, config.truncation_level, config.panel)
    vine_post = build_dvine(u_post, config.truncation_level, config.panel)
    ll_pre = dvine_loglik_pointwise(vine_pre, u_pre)
    ll_post = dvine_loglik_pointwise(vine_post, u_post)
    return clarke_test(ll_pre, ll_post)


def compare_channels(
    samples: np.ndarray,
    band: BandSpec,
    sampling_rate_hz: float,
    channel_a: int,
    channel_b: int,
    config: CompareConfig,
) -> ClarkeResult:
    """Compare the dependence structure of two channels over all epochs.

    ``samples`` has shape (n_channels, n_epochs, n_samples).  Each channel
    gets its own global magnitude scaling, Gamma marginals and D-vine; the
    per-frequency log-density difference of the two vines (each evaluated on
    its own channel's observations) feeds Clarke's test.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 3:
        raise ValueError("samples must be (channel, epoch, time)")
    if channel_a == channel_b:
        raise ValueError("channels to compare must differ")
    for ch in (channel_a, channel_b):
        if not 0 <= ch < arr.shape[0]:
            raise ValueError(f"channel {ch} out of range")

    logliks = []
    for ch in (channel_a, channel_b):
        epochs = arr[ch]
        std_values, scaling = _band_standardized(epochs, band, sampling_rate_hz)
        u, _ = _epoch_pseudo_matrix(
            epochs, band, sampling_rate_hz, config.bootstrap, scaling,
            std_values, channel=ch, epoch_offset=0,
        )
        vine = build_dvine(u, config.truncation_level, config.panel)
        logliks.append(dvine_loglik_pointwise(vine, u))
    return clarke_test(logliks[0], logliks[1])
