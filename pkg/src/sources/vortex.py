"""Analytic corotating vortex pair: velocity field and acoustic far field."""

import math
from typing import Union

import numpy as np

from ..models.errors import InvalidArgumentError
from ..models.vortex import VortexPairConfig
from .bessel import bessel_j2, bessel_y2

PHASES = ("corrected", "printed")

ArrayLike = Union[float, np.ndarray]


def vortex_centers(cfg: VortexPairConfig, t: float) -> np.ndarray:
    """Centres +b(t) and -b(t) with b = r0 exp(i omega t), shape (2, 2)."""
    angle = cfg.omega * t
    b = cfg.r0 * np.array([math.cos(angle), math.sin(angle)])
    return np.stack([b, -b])


def scully_velocity(points: np.ndarray, center: np.ndarray, gamma: float, rc: float) -> np.ndarray:
    """Counter-clockwise velocity of one desingularised vortex, u_theta = gamma r / (2 pi (rc^2 + r^2))."""
    d = np.atleast_2d(points)[:, :2] - center
    scale = gamma / (2.0 * math.pi * (rc**2 + np.einsum("nd,nd->n", d, d)))
    return scale[:, None] * np.stack([-d[:, 1], d[:, 0]], axis=1)


def vortex_velocity(cfg: VortexPairConfig, x: np.ndarray, t: float) -> np.ndarray:
    """In-plane velocity of the pair at points x (n, 2) or (n, 3); returns (n, 2)."""
    if t < 0.0:
        raise InvalidArgumentError(f"time must be non-negative, got {t}")
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    centers = vortex_centers(cfg, t)
    return scully_velocity(pts, centers[0], cfg.gamma, cfg.rc) + scully_velocity(pts, centers[1], cfg.gamma, cfg.rc)


def potential_velocity(cfg: VortexPairConfig, x: np.ndarray, t: float) -> np.ndarray:
    """Point-vortex velocity from u - i v = d/dz of the complex potential."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    z = pts[:, 0] + 1j * pts[:, 1]
    b = cfg.r0 * np.exp(1j * cfg.omega * t)
    w = cfg.gamma / (2j * math.pi) * (1.0 / (z - b) + 1.0 / (z + b))
    return np.stack([w.real, -w.imag], axis=1)


def farfield_pressure(
    cfg: VortexPairConfig,
    r: ArrayLike,
    theta: ArrayLike,
    t: float,
    phase: str = "corrected",
) -> np.ndarray:
    """
    Acoustic pressure of the rotating quadrupole at polar position (r, theta).

    The "corrected" phase uses 2 (theta - omega t) in both terms, which has
    the acoustic period T_f / 2; "printed" keeps 2 theta - omega t in the
    Y_2 term.
    """
    if phase not in PHASES:
        raise InvalidArgumentError(f"phase must be one of {PHASES}, got {phase!r}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0.0):
        raise InvalidArgumentError("far-field pressure is singular at r = 0")
    theta_arr = np.asarray(theta, dtype=float)
    kr = cfg.wavenumber * r_arr
    amplitude = -(cfg.rho0 * cfg.c0**2 / (64.0 * math.pi**3)) * (cfg.gamma / (cfg.r0 * cfg.c0)) ** 4
    sin_arg = 2.0 * (theta_arr - cfg.omega * t)
    cos_arg = sin_arg if phase == "corrected" else 2.0 * theta_arr - cfg.omega * t
    if cfg.gamma == 0.0:
        return np.zeros(np.broadcast(kr, sin_arg).shape)
    return amplitude * (bessel_j2(kr) * np.sin(sin_arg) + bessel_y2(kr) * np.cos(cos_arg))


def farfield_at_points(cfg: VortexPairConfig, points: np.ndarray, t: float, phase: str = "corrected") -> np.ndarray:
    pts = np.atleast_2d(points)
    return farfield_pressure(cfg, np.hypot(pts[:, 0], pts[:, 1]), np.arctan2(pts[:, 1], pts[:, 0]), t, phase)
