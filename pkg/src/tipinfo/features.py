"""Curve features: double-exponential fits, integrated MI, asymptotic MI, roles."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .infoflow import InfoCurve

# (fast, slow) rate guesses for the multi-start fit
RATE_STARTS = ((1.0, 0.1), (0.5, 0.05), (0.3, 0.02), (2.0, 0.01), (0.1, 0.01), (1.0, 0.005))
RESIDUAL_WARN_FRACTION = 0.05


class FitQualityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DecayFit:
    """``I(t) ~ a exp(-b t) + c exp(-d t) + omega`` with ``b >= d``."""

    a: float
    b: float
    c: float
    d: float
    omega: float
    residual: float
    form: str = "double"  # "double", "single" or "constant"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.a * np.exp(-self.b * t) + self.c * np.exp(-self.d * t) + self.omega

    def tail(self, t0: float) -> float:
        """Integral of the transient terms from ``t0`` to infinity."""
        out = 0.0
        for amp, rate in ((self.a, self.b), (self.c, self.d)):
            if amp > 0 and rate > 0:
                out += amp * np.exp(-rate * t0) / rate
        return float(out)


def _values(curve) -> np.ndarray:
    return np.asarray(curve.values if isinstance(curve, InfoCurve) else curve, dtype=float)


def _best_fit(model, x0s, lower, y):
    best = None
    for x0 in x0s:
        x0 = np.maximum(x0, lower)
        r = least_squares(lambda p: model(p) - y, x0, bounds=(lower, np.inf),
                          xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=5000)
        if best is None or r.cost < best.cost:
            best = r
    return best


def fit_decay(curve, min_rate: float | None = None) -> DecayFit:
    """Fit a non-negative double exponential plus offset to an information curve.

    Parameters
    ----------
    curve : InfoCurve or array_like
        ``I(t)`` sampled at ``t = 0, 1, ...``; at least 10 points.
    min_rate : float, optional
        Lower bound on both decay rates. Defaults to ``1 / t_max`` so that
        modes too slow to decay inside the observed window end up in ``omega``.

    Notes
    -----
    Several starting points spanning fast and slow rates are tried and the
    lowest residual kept. If the two components collapse onto one (equal
    rates or a vanishing amplitude) the curve is refit with a single
    exponential plus offset and ``form`` is set to ``"single"``.
    """
    y = _values(curve)
    if y.size < 10:
        raise ValueError("need at least 10 points to fit a decay")
    t = np.arange(y.size, dtype=float)
    t_max = y.size - 1
    if min_rate is None:
        min_rate = 1.0 / t_max
    scale = max(float(np.max(np.abs(y))), 1e-300)

    if np.ptp(y) <= 1e-12 * scale:
        return DecayFit(0.0, 0.0, 0.0, 0.0, float(max(y[-1], 0.0)), 0.0, "constant")

    amp = max(y[0] - y[-1], 1e-6 * scale)
    base = max(y[-1], 0.0)

    def double(p):
        return p[0] * np.exp(-p[1] * t) + p[2] * np.exp(-p[3] * t) + p[4]

    lower = np.array([0.0, min_rate, 0.0, min_rate, 0.0])
    x0s = [np.array([amp / 2, b0, amp / 2, d0, base]) for b0, d0 in RATE_STARTS]
    r = _best_fit(double, x0s, lower, y)
    a, b, c, d, w = r.x
    if d > b:
        a, b, c, d = c, d, a, b
    collapsed = (
        abs(b - d) <= 1e-3 * max(b, d)
        or min(a, c) <= 1e-8 * max(a, c, 1e-300)
    )
    form = "double"
    if collapsed:
        def single(p):
            return p[0] * np.exp(-p[1] * t) + p[2]

        starts = sorted({rate for pair in RATE_STARTS for rate in pair})
        r = _best_fit(single, [np.array([amp, s, base]) for s in starts],
                      np.array([0.0, min_rate, 0.0]), y)
        a, b, w = r.x
        c, d = 0.0, 0.0
        form = "single"
    rms = float(np.sqrt(np.mean(r.fun ** 2)))
    if y[0] > 0 and rms > RESIDUAL_WARN_FRACTION * y[0]:
        warnings.warn(f"decay fit residual {rms:.3g} exceeds 5% of I(0)={y[0]:.3g}",
                      FitQualityWarning, stacklevel=2)
    return DecayFit(float(a), float(b), float(c), float(d), float(w), rms, form)


def integrated_mi(curve, fit: DecayFit) -> float:
    """Area between the curve and its asymptote, closed with the fitted tail."""
    y = _values(curve)
    area = float(np.sum(np.maximum(y - fit.omega, 0.0)))
    return area + fit.tail(y.size - 1)


@dataclass(frozen=True, eq=False)
class RoleTable:
    """Role scores per node.

    ``mu`` and ``omega`` are the raw ``node x gamma`` matrices; ``mu_star`` and
    ``omega_star`` are each node's maximum over gamma after normalising by the
    global maximum, and ``role = mu_star - omega_star``.
    """

    mu: np.ndarray
    omega: np.ndarray
    mu_star: np.ndarray
    omega_star: np.ndarray
    role: np.ndarray
    mu_argmax: np.ndarray
    omega_argmax: np.ndarray


def _normalise(m: np.ndarray) -> np.ndarray:
    top = m.max() if m.size else 0.0
    return m / top if top > 0 else np.zeros_like(m)


def role_scores(mu, omega) -> RoleTable:
    mu = np.asarray(mu, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if mu.shape != omega.shape:
        raise ValueError(f"shape mismatch: {mu.shape} vs {omega.shape}")
    mu_n, om_n = _normalise(mu), _normalise(omega)
    mu_star, om_star = mu_n.max(axis=1), om_n.max(axis=1)
    # argmax returns the first maximiser, i.e. the gamma nearest 0
    return RoleTable(mu, omega, mu_star, om_star, mu_star - om_star,
                     mu_n.argmax(axis=1), om_n.argmax(axis=1))


@dataclass(frozen=True, eq=False)
class CurveFeatures:
    mu: np.ndarray
    omega: np.ndarray
    fits: dict


def curve_features(curves, n: int, min_rate: float | None = None) -> CurveFeatures:
    """Fit every curve and collect ``mu`` and ``omega`` as ``node x gamma`` arrays.

    Identically zero curves (the single-state partitions) get ``mu = omega = 0``.
    """
    mu = np.zeros((n, n + 1))
    omega = np.zeros((n, n + 1))
    fits = {}
    for cv in curves:
        k = int(round(cv.gamma * n))
        fit = fit_decay(cv, min_rate=min_rate)
        fits[(cv.node, k)] = fit
        mu[cv.node, k] = integrated_mi(cv, fit)
        omega[cv.node, k] = fit.omega
    return CurveFeatures(mu, omega, fits)
