"""
Bessel functions of the first and second kind, order two.

Ascending series up to |x| = 12, Hankel asymptotic expansion above.
"""

import math

import numpy as np

from ..models.errors import InvalidArgumentError

SWITCH = 12.0
SERIES_TERMS = 60
ASYMPTOTIC_TERMS = 30
EULER_GAMMA = 0.57721566490153286061


def _series_j(n: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    term = half**n / math.factorial(n)
    out = term.copy()
    for k in range(1, SERIES_TERMS):
        term = -term * half * half / (k * (k + n))
        out += term
    return out


def _series_y2(x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    n = 2
    # finite part: -(1/pi) sum_{k<n} (n-k-1)!/k! (x/2)^(2k-n)
    finite = -(1.0 / math.pi) * (half**-2 + 1.0)
    # psi(m + 1) = -gamma + H_m
    harmonic = [0.0]
    for m in range(1, SERIES_TERMS + n + 1):
        harmonic.append(harmonic[-1] + 1.0 / m)
    term = half**n / math.factorial(n)  # (x/2)^n / (k! (n+k)!) at k = 0
    tail = np.zeros_like(x)
    for k in range(SERIES_TERMS):
        psi_sum = (harmonic[k] - EULER_GAMMA) + (harmonic[n + k] - EULER_GAMMA)
        tail += psi_sum * term
        term = -term * half * half / ((k + 1) * (k + 1 + n))
    return finite + (2.0 / math.pi) * np.log(half) * _series_j(n, x) - tail / math.pi


def _hankel_pq(n: int, x: np.ndarray):
    mu = 4.0 * n * n
    p = np.ones_like(x)
    q = np.zeros_like(x)
    coef = 1.0
    last = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 2 * ASYMPTOTIC_TERMS):
        coef *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
        term = coef / x**k
        # the expansion diverges; stop each point at its smallest term
        active &= np.abs(term) < last
        last = np.abs(term)
        sign = (-1) ** (k // 2)
        if k % 2 == 0:
            p += np.where(active, sign * term, 0.0)
        else:
            q += np.where(active, sign * term, 0.0)
        if not active.any():
            break
    return p, q


def _asymptotic(n: int, x: np.ndarray):
    p, q = _hankel_pq(n, x)
    chi = x - (0.5 * n + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * x))
    return amp * (p * np.cos(chi) - q * np.sin(chi)), amp * (p * np.sin(chi) + q * np.cos(chi))


def _shaped(values: np.ndarray, like: np.ndarray):
    out = values.reshape(like.shape)
    return float(out) if out.ndim == 0 else out


def bessel_j2(x) -> np.ndarray:
    """J_2(x) for real x; even in x."""
    given = np.asarray(x, dtype=float)
    arr = np.abs(np.atleast_1d(given))
    out = np.empty_like(arr)
    small = arr <= SWITCH
    out[small] = _series_j(2, arr[small])
    out[~small] = _asymptotic(2, arr[~small])[0]
    return _shaped(out, given)


def bessel_y2(x) -> np.ndarray:
    """Y_2(x) for x > 0."""
    given = np.asarray(x, dtype=float)
    arr = np.atleast_1d(given)
    if np.any(arr <= 0.0):
        raise InvalidArgumentError("Y_2 is defined for positive arguments only")
    out = np.empty_like(arr)
    small = arr <= SWITCH
    out[small] = _series_y2(arr[small])
    out[~small] = _asymptotic(2, arr[~small])[1]
    return _shaped(out, given)
