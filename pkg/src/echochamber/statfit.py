"""Least-squares fits of CCDF curves and the two-sample Kolmogorov-Smirnov test.

Three two-parameter models are fitted to ``(x, P(X >= x))`` points:

* ``exponential``  ``a * exp(b * x)``
* ``power_law``    ``a * x**b``
* ``log_normal``   survival function of a log-normal with ``(mu, sigma)``

Fits minimize the residual sum of squares with a Levenberg-Marquardt
iteration and are ranked by a Gaussian-residual log-likelihood.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import erfc

__all__ = [
    "MODELS",
    "FitError",
    "FitResult",
    "KsResult",
    "model_curve",
    "initial_params",
    "fit_model",
    "fit_all",
    "select_best",
    "gaussian_loglik",
    "ks_statistic",
    "kolmogorov_sf",
    "ks_two_sample",
    "KS_CRITICAL_COEF",
]

MODELS = ("exponential", "power_law", "log_normal")
PARAM_NAMES = {"exponential": ("a", "b"), "power_law": ("a", "b"), "log_normal": ("mu", "sigma")}

MAX_ITER = 500
REL_SSE_TOL = 1e-10
GRAD_TOL = 1e-8
# c(0.05) for the two-sample KS critical value c / sqrt(n_e)
KS_CRITICAL_COEF = 1.3581

_SQRT2 = math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    model: str
    params: dict[str, float]
    log_likelihood: float
    residual_sse: float
    converged: bool
    iterations: int
    gradient_norm: float = float("nan")
    n_points: int = 0

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "log_likelihood": self.log_likelihood,
            "residual_sse": self.residual_sse,
            "converged": self.converged,
            "iterations": self.iterations,
            "gradient_norm": self.gradient_norm,
            "n_points": self.n_points,
        }


def _check_model(model: str) -> None:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def _eval(model: str, x: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Model values and Jacobian (n x 2)."""
    p, q = theta
    if model == "exponential":
        e = np.exp(q * x)
        return p * e, np.column_stack([e, p * x * e])
    if model == "power_law":
        lx = np.log(x)
        e = np.exp(q * lx)
        return p * e, np.column_stack([e, p * lx * e])
    z = (np.log(x) - p) / q
    dens = _INV_SQRT2PI * np.exp(-0.5 * z * z)
    return 0.5 * erfc(z / _SQRT2), np.column_stack([dens / q, dens * z / q])


def model_curve(model: str, x, params) -> np.ndarray:
    """Evaluate ``model`` at ``x``; ``params`` is a mapping or a pair."""
    _check_model(model)
    if isinstance(params, dict):
        params = [params[k] for k in PARAM_NAMES[model]]
    return _eval(model, np.asarray(x, dtype=np.float64), np.asarray(params, dtype=np.float64))[0]


def _linfit(u: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(u, v, 1)
    return float(intercept), float(slope)


def initial_params(model: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Log-linear regression (exponential, power law) or moments of the
    log-values weighted by the CCDF step masses (log-normal)."""
    pos = y > 0
    if model == "exponential":
        if pos.sum() >= 2 and np.ptp(x[pos]) > 0:
            c, b = _linfit(x[pos], np.log(y[pos]))
            return np.array([math.exp(c), b])
        return np.array([float(np.max(y)) or 1.0, 0.0])
    if model == "power_law":
        if pos.sum() >= 2 and np.ptp(x[pos]) > 0:
            c, b = _linfit(np.log(x[pos]), np.log(y[pos]))
            return np.array([math.exp(c), b])
        return np.array([float(np.max(y)) or 1.0, 0.0])
    order = np.argsort(x)
    xs, ys = x[order], y[order]
    mass = np.clip(ys - np.append(ys[1:], 0.0), 0.0, None)
    lx = np.log(xs)
    if mass.sum() > 0:
        mu = float(np.dot(mass, lx) / mass.sum())
        var = float(np.dot(mass, (lx - mu) ** 2) / mass.sum())
    else:
        mu, var = float(lx.mean()), float(lx.var())
    sigma = math.sqrt(var) if var > 0 else 1.0
    return np.array([mu, sigma])


def gaussian_loglik(sse: float, n: int) -> float:
    """``-(n/2) * (ln(2*pi*SSE/n) + 1)``; SSE/n is floored at the smallest
    positive double so exact fits stay finite."""
    s2 = max(sse / n, np.finfo(float).tiny)
    return -0.5 * n * (math.log(2.0 * math.pi * s2) + 1.0)


def _valid(model: str, theta: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(theta))) and (model != "log_normal" or theta[1] > 0)


def fit_model(points, model: str, init=None, max_iter: int = MAX_ITER) -> FitResult:
    """Nonlinear least-squares fit of ``model`` to CCDF ``points``.

    Parameters
    ----------
    points : (x, y) pair of arrays, or iterable of (x, y) pairs
    model : one of ``MODELS``
    init : optional starting parameters (mapping or pair)

    Returns
    -------
    FitResult
        ``converged`` is False when ``max_iter`` is exhausted or no step
        reduces the SSE before the gradient is small; parameters are then the
        best found.

    Raises
    ------
    FitError
        Too few points, non-positive ``x`` for the power-law or log-normal
        model, or a rank-deficient Jacobian at the start.
    """
    _check_model(model)
    x, y = _as_xy(points)
    n = x.size
    if n < 2:
        raise FitError("at least two points are needed for a two-parameter fit")
    if model != "exponential" and np.any(x <= 0):
        raise FitError(f"{model} requires x > 0")
    if init is None:
        theta = initial_params(model, x, y)
    elif isinstance(init, dict):
        theta = np.array([init[k] for k in PARAM_NAMES[model]], dtype=np.float64)
    else:
        theta = np.asarray(init, dtype=np.float64).copy()
    if not _valid(model, theta):
        raise FitError(f"invalid starting parameters {theta.tolist()}")

    f, jac = _eval(model, x, theta)
    if np.linalg.matrix_rank(jac) < 2:
        raise FitError("singular normal equations: Jacobian is rank deficient")
    r = y - f
    sse = float(r @ r)
    lam = 1e-3
    converged = False
    it = 0
    grad = jac.T @ r
    while it < max_iter:
        if np.max(np.abs(grad)) < GRAD_TOL:
            converged = True
            break
        it += 1
        a = jac.T @ jac
        diag = np.diag(np.diag(a))
        accepted = False
        while lam < 1e20:
            try:
                step = np.linalg.solve(a + lam * diag, grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = theta + step
            if _valid(model, trial):
                # wild trial steps may overflow; they are rejected below
                with np.errstate(over="ignore", invalid="ignore"):
                    f_new, jac_new = _eval(model, x, trial)
                    r_new = y - f_new
                    sse_new = float(r_new @ r_new)
                if np.isfinite(sse_new) and sse_new < sse:
                    accepted = True
                    break
            lam *= 10.0
        if not accepted:
            break
        rel = (sse - sse_new) / sse
        theta, jac, r, sse = trial, jac_new, r_new, sse_new
        grad = jac.T @ r
        lam = max(lam / 10.0, 1e-12)
        if rel < REL_SSE_TOL:
            converged = True
            break
    grad_norm = float(np.max(np.abs(grad)))
    if not converged and grad_norm < GRAD_TOL:
        converged = True
    names = PARAM_NAMES[model]
    return FitResult(model, {names[0]: float(theta[0]), names[1]: float(theta[1])},
                     gaussian_loglik(sse, n), sse, converged, it, grad_norm, n)


def _as_xy(points) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(points, tuple) and len(points) == 2 and np.ndim(points[0]) == 1:
        x, y = points
    else:
        arr = np.asarray(list(points), dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise FitError("points must be (x, y) pairs")
        x, y = arr[:, 0], arr[:, 1]
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise FitError("x and y differ in length")
    return x, y


def fit_all(points, models: Iterable[str] = MODELS) -> list[FitResult]:
    """Fit every model; models that cannot be fitted are skipped."""
    out = []
    for m in models:
        try:
            out.append(fit_model(points, m))
        except FitError:
            continue
    return out


def select_best(fits: Sequence[FitResult]) -> FitResult:
    """Converged fit with the largest log-likelihood; ties go to fewer
    iterations, then to model order exponential < power_law < log_normal."""
    ok = [f for f in fits if f.converged]
    if not ok:
        raise FitError("no converged fit to choose from")
    return min(ok, key=lambda f: (-f.log_likelihood, f.iterations, MODELS.index(f.model)))


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov


@dataclass(frozen=True)
class KsResult:
    d_statistic: float
    p_value: float
    n1: int
    n2: int
    critical_value: float = field(default=float("nan"))

    def as_dict(self) -> dict:
        return {"D": self.d_statistic, "p_value": self.p_value, "n1": self.n1,
                "n2": self.n2, "critical_value": self.critical_value}


def ks_statistic(s1, s2) -> float:
    """Largest gap between the two empirical CDFs over the merged support."""
    a = np.sort(np.asarray(s1, dtype=np.float64))
    b = np.sort(np.asarray(s2, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS test needs two nonempty samples")
    support = np.concatenate([a, b])
    fa = np.searchsorted(a, support, side="right") / a.size
    fb = np.searchsorted(b, support, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def kolmogorov_sf(lam: float, tol: float = 1e-12) -> float:
    """``Q(lam) = 2 * sum_{k>=1} (-1)**(k-1) * exp(-2 k**2 lam**2)``.

    Below ``lam = 1.18`` the alternating series converges slowly, so the
    equivalent Jacobi-theta form is summed instead. Both stop once a term
    drops below ``tol``.
    """
    if lam <= 0:
        return 1.0
    if lam < 1.18:
        c = -(math.pi ** 2) / (8.0 * lam * lam)
        total, k = 0.0, 1
        while True:
            term = math.exp(c * (2 * k - 1) ** 2)
            total += term
            if term < tol:
                break
            k += 1
        q = 1.0 - math.sqrt(2.0 * math.pi) / lam * total
    else:
        total, k = 0.0, 1
        while True:
            term = math.exp(-2.0 * k * k * lam * lam)
            total += term if k % 2 else -term
            if term < tol:
                break
            k += 1
        q = 2.0 * total
    return min(1.0, max(0.0, q))


def ks_two_sample(s1, s2) -> KsResult:
    """Two-sided two-sample KS test with the asymptotic p-value
    ``Q(D * sqrt(n1 n2 / (n1 + n2)))``."""
    n1, n2 = len(s1), len(s2)
    d = ks_statistic(s1, s2)
    ne = n1 * n2 / (n1 + n2)
    return KsResult(d, kolmogorov_sf(d * math.sqrt(ne)), n1, n2, KS_CRITICAL_COEF / math.sqrt(ne))
