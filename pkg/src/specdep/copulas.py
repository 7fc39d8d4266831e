"""Bivariate Archimedean copulas: evaluation, sampling and estimation.

The panel consists of the independence copula and five one-parameter
Archimedean families: Clayton, Gumbel, Frank, Joe and the 180-degree rotated
(survival) Joe.  For each family the CDF, the density, the conditional
distribution ``h(u | v) = dC(u, v)/dv`` and Kendall's tau are available in
closed or quadrature form; all evaluations run in log space so that extreme
dependence parameters stay finite.

Parameter estimation offers the two standard routes: inversion of the
empirical Kendall tau, and one-dimensional maximum likelihood by golden
section over the (log-parametrized) family domain.  Family selection
minimizes AIC at the tau-inverted parameter over the panel, and a Monte
Carlo Kullback-Leibler divergence estimate quantifies the cost of fitting a
misspecified family.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .rng import task_rng

__all__ = [
    "Family",
    "CopulaModel",
    "KlicEstimate",
    "DEFAULT_PANEL",
    "copula_cdf",
    "copula_pdf",
    "h_function",
    "h_inverse",
    "sample",
    "copula_logpdf",
    "copula_loglik",
    "kendall_tau_empirical",
    "tau_to_theta",
    "theta_to_tau",
    "select_family",
    "mle_theta",
    "klic_estimate",
]

# Pseudo-observations are clamped this far away from the corners before any
# density evaluation (log-singularity guard).
PSEUDO_OBS_EPS = 1e-10

# |tau| used for tau inversion is capped here: tiny bands can produce a
# degenerate empirical tau of +-1, which no family parameter attains.
TAU_CAP = 0.99

_FRANK_MIN_THETA = 1e-9
_THETA_MAX = 1e6


class Family(enum.Enum):
    INDEPENDENT = "independent"
    CLAYTON = "clayton"
    GUMBEL = "gumbel"
    FRANK = "frank"
    JOE = "joe"
    SURVIVAL_JOE = "survival_joe"

    def __str__(self) -> str:  # serialization label
        return self.value


DEFAULT_PANEL: tuple[Family, ...] = (
    Family.INDEPENDENT,
    Family.CLAYTON,
    Family.GUMBEL,
    Family.FRANK,
    Family.JOE,
    Family.SURVIVAL_JOE,
)


def _validate_theta(family: Family, theta: float | None) -> None:
    if family is Family.INDEPENDENT:
        if theta is not None:
            raise ValueError("the independence copula has no parameter")
        return
    if theta is None or not np.isfinite(theta):
        raise ValueError(f"{family.value} requires a finite parameter")
    if family is Family.CLAYTON and not theta > 0:
        raise ValueError(f"clayton requires theta > 0, got {theta}")
    if family in (Family.GUMBEL, Family.JOE, Family.SURVIVAL_JOE) and not theta >= 1:
        raise ValueError(f"{family.value} requires theta >= 1, got {theta}")
    if family is Family.FRANK and not abs(theta) >= _FRANK_MIN_THETA:
        raise ValueError(f"frank requires theta != 0, got {theta}")


@dataclass(frozen=True)
class CopulaModel:
    """An Archimedean family tag plus its dependence parameter."""

    family: Family
    theta: float | None = None
    source: str = "fixed"

    def __post_init__(self) -> None:
        _validate_theta(self.family, self.theta)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "theta": self.theta, "source": self.source}

    @staticmethod
    def from_dict(d: dict) -> "CopulaModel":
        return CopulaModel(Family(d["family"]), d.get("theta"), d.get("source", "fixed"))


@dataclass(frozen=True)
class KlicEstimate:
    """Monte Carlo Kullback-Leibler divergence between two copula densities."""

    value: float
    std_error: float
    n_mc: int


# ---------------------------------------------------------------------------
# family evaluations (theta scalar, u/v arrays in the open unit interval;
# boundary values are patched in by the public wrappers)
# ---------------------------------------------------------------------------


def _clayton_lnS(theta, u, v):
    # S = u**-theta + v**-theta - 1 via shifted exponentials
    a = -theta * np.log(u)
    b = -theta * np.log(v)
    m = np.maximum(a, b)
    return m + np.log(np.exp(a - m) + np.exp(b - m) - np.exp(-m))


def _clayton_cdf(theta, u, v):
    return np.exp(-_clayton_lnS(theta, u, v) / theta)


def _clayton_h(theta, u, v):
    lnS = _clayton_lnS(theta, u, v)
    return np.exp(-(theta + 1.0) * np.log(v) - (1.0 / theta + 1.0) * lnS)


def _clayton_logpdf(theta, u, v):
    lnS = _clayton_lnS(theta, u, v)
    return np.log1p(theta) - (theta + 1.0) * (np.log(u) + np.log(v)) - (1.0 / theta + 2.0) * lnS


def _gumbel_parts(theta, u, v):
    x = -np.log(u)
    y = -np.log(v)
    lnS = np.logaddexp(theta * np.log(x), theta * np.log(y))
    A = np.exp(lnS / theta)
    return x, y, lnS, A


def _gumbel_cdf(theta, u, v):
    _, _, _, A = _gumbel_parts(theta, u, v)
    return np.exp(-A)


def _gumbel_h(theta, u, v):
    _, y, lnS, A = _gumbel_parts(theta, u, v)
    return np.exp(-A + (theta - 1.0) * np.log(y) + (1.0 / theta - 1.0) * lnS - np.log(v))


def _gumbel_logpdf(theta, u, v):
    x, y, lnS, A = _gumbel_parts(theta, u, v)
    return (
        -A
        + (theta - 1.0) * (np.log(x) + np.log(y))
        - np.log(u)
        - np.log(v)
        + (1.0 / theta - 2.0) * lnS
        + np.log(A + theta - 1.0)
    )


def _frank_lnD(theta, u, v):
    # D = exp(-t*u) + exp(-t*v) - exp(-t*(u+v)) - exp(-t), positive for t > 0
    m = -theta * np.minimum(u, v)
    bracket = (
        np.exp(-theta * u - m)
        + np.exp(-theta * v - m)
        - np.exp(-theta * (u + v) - m)
        - np.exp(-theta - m)
    )
    return m + np.log(bracket)


def _frank_cdf(theta, u, v):
    if theta < 0:
        return v - _frank_cdf(-theta, 1.0 - u, v)
    ln1me = np.log(-np.expm1(-theta))
    return (ln1me - _frank_lnD(theta, u, v)) / theta


def _frank_h(theta, u, v):
    if theta < 0:
        return 1.0 - _frank_h(-theta, 1.0 - u, v)
    with np.errstate(divide="ignore"):
        num = np.log(-np.expm1(-theta * u))
    return np.exp(-theta * v + num - _frank_lnD(theta, u, v))


def _frank_logpdf(theta, u, v):
    if theta < 0:
        return _frank_logpdf(-theta, 1.0 - u, v)
    ln1me = np.log(-np.expm1(-theta))
    return np.log(theta) + ln1me - theta * (u + v) - 2.0 * _frank_lnD(theta, u, v)


def _joe_lnS(theta, u, v):
    # S = ub**t + vb**t - ub**t * vb**t with ub = 1-u, vb = 1-v; S in (0, 1]
    a = theta * np.log1p(-u)
    b = theta * np.log1p(-v)
    m = np.maximum(a, b)
    bracket = np.exp(a - m) + np.exp(b - m) - np.exp(a + b - m)
    return m + np.log(bracket)


def _joe_cdf(theta, u, v):
    return -np.expm1(_joe_lnS(theta, u, v) / theta)


def _joe_h(theta, u, v):
    lnS = _joe_lnS(theta, u, v)
    lead = np.exp((1.0 / theta - 1.0) * lnS + (theta - 1.0) * np.log1p(-v))
    return lead * (-np.expm1(theta * np.log1p(-u)))


def _joe_logpdf(theta, u, v):
    lnS = _joe_lnS(theta, u, v)
    S = np.exp(lnS)
    return (
        (theta - 1.0) * (np.log1p(-u) + np.log1p(-v))
        + (1.0 / theta - 2.0) * lnS
        + np.log(theta - 1.0 + S)
    )


def _survival_joe_cdf(theta, u, v):
    res = u + v - 1.0 + _joe_cdf(theta, 1.0 - u, 1.0 - v)
    return np.clip(res, 0.0, None)


def _survival_joe_h(theta, u, v):
    return 1.0 - _joe_h(theta, 1.0 - u, 1.0 - v)


def _survival_joe_logpdf(theta, u, v):
    return _joe_logpdf(theta, 1.0 - u, 1.0 - v)


_CDF = {
    Family.CLAYTON: _clayton_cdf,
    Family.GUMBEL: _gumbel_cdf,
    Family.FRANK: _frank_cdf,
    Family.JOE: _joe_cdf,
    Family.SURVIVAL_JOE: _survival_joe_cdf,
}
_H = {
    Family.CLAYTON: _clayton_h,
    Family.GUMBEL: _gumbel_h,
    Family.FRANK: _frank_h,
    Family.JOE: _joe_h,
    Family.SURVIVAL_JOE: _survival_joe_h,
}
_LOGPDF = {
    Family.CLAYTON: _clayton_logpdf,
    Family.GUMBEL: _gumbel_logpdf,
    Family.FRANK: _frank_logpdf,
    Family.JOE: _joe_logpdf,
    Family.SURVIVAL_JOE: _survival_joe_logpdf,
}


def _as_unit_arrays(u, v, name: str):
    uu = np.asarray(u, dtype=float)
    vv = np.asarray(v, dtype=float)
    if np.any((uu < 0) | (uu > 1)) or np.any((vv < 0) | (vv > 1)):
        raise ValueError(f"{name}: arguments must lie in [0, 1]")
    return np.broadcast_arrays(uu, vv)


def _maybe_scalar(out: np.ndarray, *inputs) -> np.ndarray | float:
    if all(np.ndim(x) == 0 for x in inputs):
        return float(np.asarray(out).item())
    return out


def copula_cdf(model: CopulaModel, u, v):
    """Copula CDF ``C(u, v)``; exact on the boundary of the unit square."""
    uu, vv = _as_unit_arrays(u, v, "copula_cdf")
    if model.family is Family.INDEPENDENT:
        return _maybe_scalar(uu * vv, u, v)
    ui = np.clip(uu, 1e-300, 1.0)
    vi = np.clip(vv, 1e-300, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        res = np.asarray(_CDF[model.family](model.theta, ui, vi))
    res = res.copy() if res.shape else np.atleast_1d(res).copy()
    res = np.where((uu == 0) | (vv == 0), 0.0, res)
    res = np.where(uu == 1, vv, res)
    res = np.where(vv == 1, np.where(uu == 1, 1.0, uu), res)
    return _maybe_scalar(np.clip(res, 0.0, 1.0), u, v)


def h_function(model: CopulaModel, u, v):
    """Conditional distribution ``h(u | v) = dC(u, v)/dv``.

    ``u`` may include 0 and 1 (where h is exactly 0 and 1); ``v`` must lie in
    the open interval.
    """
    uu, vv = _as_unit_arrays(u, v, "h_function")
    if np.any((vv <= 0) | (vv >= 1)):
        raise ValueError("h_function: conditioning value v must lie in (0, 1)")
    if model.family is Family.INDEPENDENT:
        return _maybe_scalar(uu + 0.0 * vv, u, v)
    ui = np.clip(uu, 1e-300, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        res = np.asarray(_H[model.family](model.theta, ui, vv))
    res = res.copy() if res.shape else np.atleast_1d(res).copy()
    res = np.where(uu == 0, 0.0, res)
    res = np.where(uu == 1, 1.0, res)
    return _maybe_scalar(np.clip(res, 0.0, 1.0), u, v)


def copula_pdf(model: CopulaModel, u, v):
    """Copula density ``c(u, v)`` for interior points of the unit square."""
    uu, vv = _as_unit_arrays(u, v, "copula_pdf")
    if np.any((uu <= 0) | (uu >= 1) | (vv <= 0) | (vv >= 1)):
        raise ValueError("copula_pdf: arguments must lie strictly inside (0, 1)")
    if model.family is Family.INDEPENDENT:
        return _maybe_scalar(np.ones_like(uu), u, v)
    res = np.exp(_LOGPDF[model.family](model.theta, uu, vv))
    return _maybe_scalar(res, u, v)


def copula_logpdf(model: CopulaModel, u, v) -> np.ndarray:
    """Pointwise log copula density over pseudo-observation pairs.

    Observations are clamped into ``[eps, 1 - eps]`` (eps = 1e-10) first so
    that boundary values produced by fitted marginal CDFs stay evaluable.
    """
    uu = np.clip(np.asarray(u, dtype=float), PSEUDO_OBS_EPS, 1.0 - PSEUDO_OBS_EPS)
    vv = np.clip(np.asarray(v, dtype=float), PSEUDO_OBS_EPS, 1.0 - PSEUDO_OBS_EPS)
    if model.family is Family.INDEPENDENT:
        return np.zeros(np.broadcast(uu, vv).shape)
    return _LOGPDF[model.family](model.theta, uu, vv)


def copula_loglik(model: CopulaModel, u, v) -> float:
    """Sum of :func:`copula_logpdf` over pseudo-observation pairs."""
    return float(np.sum(copula_logpdf(model, u, v)))


# ---------------------------------------------------------------------------
# Kendall's tau
# ---------------------------------------------------------------------------


def _count_inversions(a: np.ndarray) -> tuple[int, np.ndarray]:
    """Pairs (i < j) with ``a[i] > a[j]``, by vectorized mergesort counting."""
    n = a.size
    if n < 2:
        return 0, a
    mid = n // 2
    inv_l, left = _count_inversions(a[:mid])
    inv_r, right = _count_inversions(a[mid:])
    pos = np.searchsorted(left, right, side="right")
    cross = int((left.size - pos).sum())
    return inv_l + inv_r + cross, np.sort(np.concatenate((left, right)), kind="mergesort")


def _tie_pairs(a: np.ndarray) -> int:
    _, counts = np.unique(a, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def kendall_tau_empirical(x, y) -> float:
    """Kendall's tau-a: (concordant - discordant) / (n choose 2).

    Tied pairs (in either coordinate) count as neither concordant nor
    discordant; with continuous magnitudes ties have probability zero.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    n = xa.size
    if n < 2:
        raise ValueError("need at least two observations")
    order = np.lexsort((ya, xa))
    discordant, _ = _count_inversions(ya[order])
    total = n * (n - 1) // 2
    tie_x = _tie_pairs(xa)
    tie_y = _tie_pairs(ya)
    pair_ids = np.unique(np.column_stack((xa, ya)), axis=0, return_counts=True)[1]
    tie_xy = int((pair_ids * (pair_ids - 1) // 2).sum())
    s = total - 2 * discordant - tie_x - tie_y + tie_xy
    return s / total


# ---------------------------------------------------------------------------
# tau <-> theta maps
# ---------------------------------------------------------------------------


def _debye1(theta: float) -> float:
    """First Debye function ``(1/t) * int_0^t s / (e^s - 1) ds``."""
    if theta > 50.0:
        # the full integral is pi^2/6; the truncated tail is below 1e-20
        return np.pi**2 / 6.0 / theta

    def integrand(s):
        # s / (e^s - 1) written overflow-free
        return 1.0 if s == 0 else s * np.exp(-s) / (-np.expm1(-s))

    val, _ = integrate.quad(integrand, 0.0, theta, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val / theta


def _joe_tau(theta: float) -> float:
    """Kendall tau of the Joe copula via the generator integral
    ``tau = 1 + 4 * int_0^1 phi(t)/phi'(t) dt``."""
    if theta == 1.0:
        return 0.0

    def integrand(t):
        # log(g) * g / (theta * (1-t)**(theta-1)) with g = 1 - (1-t)**theta,
        # assembled in log space: both g -> 1 (log rounding to zero) and the
        # underflowing denominator would otherwise corrupt the tail.
        if t <= 0.0 or t >= 1.0:
            return 0.0
        l1p = np.log1p(-t)
        e_a = np.exp(theta * l1p)  # (1-t)**theta
        ln_g = np.log1p(-e_a)
        if not np.isfinite(ln_g):
            return 0.0  # t so small that g vanishes; integrand limit is 0
        if ln_g == 0.0:
            return -(1.0 - t) / theta  # e_a below the log1p resolution
        g = -np.expm1(theta * l1p)
        return -np.exp(np.log(-ln_g) + np.log(g) - np.log(theta) - (theta - 1.0) * l1p)

    pts = [1.0 / theta] if theta > 10.0 else None
    val, _ = integrate.quad(
        integrand, 0.0, 1.0, points=pts, epsabs=1e-12, epsrel=1e-10, limit=300
    )
    return 1.0 + 4.0 * val


@functools.lru_cache(maxsize=65536)
def _theta_to_tau_scalar(family: Family, theta: float) -> float:
    if family is Family.INDEPENDENT:
        return 0.0
    if family is Family.CLAYTON:
        return theta / (theta + 2.0)
    if family is Family.GUMBEL:
        return 1.0 - 1.0 / theta
    if family is Family.FRANK:
        if theta < 0:
            return -_theta_to_tau_scalar(family, -theta)
        return 1.0 - (4.0 / theta) * (1.0 - _debye1(theta))
    # Joe and its 180-degree rotation share the same tau
    return _joe_tau(theta)


def theta_to_tau(family: Family, theta: float | None) -> float:
    """Kendall's tau implied by a family parameter."""
    _validate_theta(family, theta)
    if family is Family.INDEPENDENT:
        return 0.0
    return _theta_to_tau_scalar(family, float(theta))


def _invert_tau(family: Family, tau: float, lo: float, hi: float) -> float:
    """Bracketing bisection of ``theta_to_tau`` on [lo, hi] (log spaced)."""
    llo, lhi = np.log(lo), np.log(hi)
    if not (_theta_to_tau_scalar(family, lo) <= tau <= _theta_to_tau_scalar(family, hi)):
        raise ValueError(f"tau={tau} outside the attainable range of {family.value}")
    for _ in range(200):
        mid = np.exp(0.5 * (llo + lhi))
        t = _theta_to_tau_scalar(family, mid)
        if abs(t - tau) < 1e-10:
            return float(mid)
        if t < tau:
            llo = np.log(mid)
        else:
            lhi = np.log(mid)
    return float(np.exp(0.5 * (llo + lhi)))


@functools.lru_cache(maxsize=65536)
def _tau_to_theta_scalar(family: Family, tau: float) -> float | None:
    if family is Family.INDEPENDENT:
        return None
    if family is Family.CLAYTON:
        if not 0.0 < tau < 1.0:
            raise ValueError(f"clayton attains tau in (0, 1), got {tau}")
        return 2.0 * tau / (1.0 - tau)
    if family is Family.GUMBEL:
        if not 0.0 <= tau < 1.0:
            raise ValueError(f"gumbel attains tau in [0, 1), got {tau}")
        return 1.0 / (1.0 - tau)
    if family is Family.FRANK:
        if not -1.0 < tau < 1.0:
            raise ValueError(f"frank attains tau in (-1, 1), got {tau}")
        if tau == 0.0:
            return 0.0  # independence limit
        theta = _invert_tau(family, abs(tau), _FRANK_MIN_THETA, _THETA_MAX)
        return theta if tau > 0 else -theta
    # Joe / survival Joe
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"{family.value} attains tau in [0, 1), got {tau}")
    if tau == 0.0:
        return 1.0
    return _invert_tau(family, tau, 1.0 + 1e-12, _THETA_MAX)


def tau_to_theta(family: Family, tau: float) -> float | None:
    """Family parameter matching a Kendall tau (inverse of
    :func:`theta_to_tau`); raises ``ValueError`` outside the attainable
    range.  Frank at tau = 0 returns 0.0, the independence limit."""
    return _tau_to_theta_scalar(family, float(tau))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def h_inverse(model: CopulaModel, w, v):
    """Solve ``h(u | v) = w`` for ``u`` by bisection (tolerance 1e-10)."""
    ww, vv = _as_unit_arrays(w, v, "h_inverse")
    if model.family is Family.INDEPENDENT:
        return _maybe_scalar(ww + 0.0 * vv, w, v)
    vv = np.clip(vv, 1e-12, 1.0 - 1e-12)
    lo = np.zeros(np.broadcast(ww, vv).shape)
    hi = np.ones_like(lo)
    target = np.broadcast_to(ww, lo.shape)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = h_function(model, mid, vv) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) < 1e-10:
            break
    return _maybe_scalar(0.5 * (lo + hi), w, v)


def sample(model: CopulaModel, n: int, seed: int = 0) -> np.ndarray:
    """Draw ``n`` pairs from the copula by conditional inversion.

    ``v`` is uniform and ``u = h^{-1}(w | v)`` with ``w`` uniform; the
    inverse h-function is solved by bisection.  Deterministic given ``seed``.

    Returns
    -------
    ndarray, shape (n, 2)
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = task_rng(seed)
    v = rng.random(n)
    w = rng.random(n)
    u = h_inverse(model, w, v)
    return np.column_stack((u, v))


# ---------------------------------------------------------------------------
# estimation and selection
# ---------------------------------------------------------------------------


def select_family(
    u,
    v,
    panel: tuple[Family, ...] = DEFAULT_PANEL,
    *,
    tau: float | None = None,
) -> CopulaModel:
    """AIC selection over the panel at tau-inverted parameters.

    The empirical Kendall tau of the pairs fixes each candidate family's
    parameter through tau inversion; AIC = -2 loglik + 2k (k = 1, or 0 for
    independence) ranks the candidates, with ties resolved in panel order.
    Families whose parameter domain cannot attain the observed tau simply do
    not compete.  The inversion uses a tau capped at +-0.99 so that the
    degenerate rank patterns possible in very small bands stay inside every
    family's domain.
    """
    uu = np.asarray(u, dtype=float)
    vv = np.asarray(v, dtype=float)
    if uu.size < 4:
        raise ValueError("need at least 4 pairs to select a copula family")
    tau_hat = kendall_tau_empirical(uu, vv) if tau is None else float(tau)
    tau_eff = float(np.clip(tau_hat, -TAU_CAP, TAU_CAP))

    best: tuple[float, CopulaModel] | None = None
    for family in panel:
        if family is Family.INDEPENDENT:
            candidate = CopulaModel(Family.INDEPENDENT, None, source="tau_inversion")
            aic = 0.0
        else:
            try:
                theta = tau_to_theta(family, tau_eff)
            except ValueError:
                continue
            if family is Family.FRANK and theta == 0.0:
                continue  # independence limit, already in the panel
            candidate = CopulaModel(family, theta, source="tau_inversion")
            aic = -2.0 * copula_loglik(candidate, uu, vv) + 2.0
        if best is None or aic < best[0]:
            best = (aic, candidate)
    assert best is not None  # the independence copula is always feasible
    return best[1]


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fn, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Golden-section maximizer of a unimodal scalar function on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def mle_theta(family: Family, u, v) -> float | None:
    """Maximum likelihood dependence parameter for one family.

    One-dimensional golden-section search of the log-likelihood over the
    log-parametrized family domain (relative tolerance ~1e-9, i.e. well below
    the 1e-8 contract).  Returns ``None`` for the independence copula.
    """
    if family is Family.INDEPENDENT:
        return None
    uu = np.asarray(u, dtype=float)
    vv = np.asarray(v, dtype=float)
    if uu.size < 4:
        raise ValueError("need at least 4 pairs for maximum likelihood")

    if family is Family.CLAYTON:
        to_theta = np.exp
        lo, hi = np.log(1e-6), np.log(2e3)
    elif family in (Family.GUMBEL, Family.JOE, Family.SURVIVAL_JOE):
        to_theta = lambda s: 1.0 + np.exp(s)  # noqa: E731
        lo, hi = np.log(1e-8), np.log(2e3)
    else:  # Frank: search |theta| on the side indicated by the empirical tau
        sign = 1.0 if kendall_tau_empirical(uu, vv) >= 0 else -1.0
        to_theta = lambda s: sign * np.exp(s)  # noqa: E731
        lo, hi = np.log(1e-6), np.log(1e3)

    def objective(s: float) -> float:
        return copula_loglik(CopulaModel(family, float(to_theta(s))), uu, vv)

    s_star = _golden_max(objective, lo, hi)
    return float(to_theta(s_star))


def klic_estimate(
    true_model: CopulaModel,
    fitted_model: CopulaModel,
    n_mc: int = 10_000,
    seed: int = 0,
) -> KlicEstimate:
    """Monte Carlo estimate of ``E_true[log(c_true / c_fitted)]``.

    Samples from ``true_model``; reports the average log density ratio and
    its standard error.  Equal models give 0 up to Monte Carlo noise, and a
    misspecified fit gives a strictly positive value.
    """
    if n_mc < 1000:
        raise ValueError("n_mc must be at least 1000")
    uv = sample(true_model, n_mc, seed=seed)
    diff = copula_logpdf(true_model, uv[:, 0], uv[:, 1]) - copula_logpdf(
        fitted_model, uv[:, 0], uv[:, 1]
    )
    return KlicEstimate(
        value=float(diff.mean()),
        std_error=float(diff.std(ddof=1) / np.sqrt(n_mc)),
        n_mc=n_mc,
    )
