"""Closed-form per-harmonic patterns and gain budgets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .architecture import (ArchitectureConfig, ChannelControls, TWO_PI, check_controls,
                           progressive_phase, to_db)
from .errors import InvalidParameter
from .waveform import SYMMETRY_RTOL, make_comb, make_square, total_power

DEFAULT_GRID_STEP_DEG = 0.05


def theta_grid(step_deg: float = DEFAULT_GRID_STEP_DEG) -> np.ndarray:
    n = int(round(180.0 / step_deg))
    return np.linspace(-90.0, 90.0, n + 1)


@dataclass(frozen=True)
class PatternSlice:
    m: int
    theta_deg: np.ndarray
    magnitude: np.ndarray
    peak_theta: float           # grid point of the global maximum
    peak_theta_refined: float   # parabolic refinement around that point

    @property
    def magnitude_db(self) -> np.ndarray:
        return 2 * to_db(self.magnitude)


def _parabolic_peak(x: np.ndarray, y: np.ndarray, i: int) -> float:
    if i == 0 or i == len(x) - 1:
        return float(x[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(x[i])
    offset = 0.5 * (y0 - y2) / denom
    return float(x[i] + offset * (x[i + 1] - x[i]))


def array_factor(cfg: ArchitectureConfig, ctl: ChannelControls | None, m: int,
                 theta_deg: Sequence[float] | None = None) -> PatternSlice:
    """|sum_n w_{n,m} exp(-j*n*2*pi*d*sin(theta))| over a grid of angles."""
    ctl = check_controls(cfg, ctl)
    grid = theta_grid() if theta_deg is None else np.asarray(theta_deg, dtype=float)
    if grid.size == 0 or np.any(np.abs(grid) > 90.0):
        raise InvalidParameter("theta grid must be nonempty and within [-90, 90] degrees")
    beta = cfg.waveform.beta(m)
    dphi = progressive_phase(cfg, ctl, np.array([m]))[0]
    n = np.arange(cfg.n_channels)
    psi = TWO_PI * cfg.spacing_d * np.sin(np.radians(grid))
    # reduce n*dphi modulo 2*pi first; raw HMJPTA3 phases can be large
    chan_phase = np.mod(n * dphi, TWO_PI)
    af = np.abs(beta * np.exp(1j * (chan_phase[:, None] - np.outer(n, psi))).sum(axis=0))
    i = int(np.argmax(af))
    return PatternSlice(m=int(m), theta_deg=grid, magnitude=af, peak_theta=float(grid[i]),
                        peak_theta_refined=_parabolic_peak(grid, af, i))


@dataclass(frozen=True)
class GainReport:
    harmonics: np.ndarray
    f_m: np.ndarray
    g_sig: np.ndarray
    g_noise: np.ndarray
    ag: np.ndarray            # NaN where the coefficient is zero
    harmonic_loss: float
    flagged: tuple = ()       # harmonics with beta_m == 0

    def at(self, m: int) -> tuple[float, float, float]:
        i = int(np.nonzero(self.harmonics == m)[0][0])
        return float(self.g_sig[i]), float(self.g_noise[i]), float(self.ag[i])

    def rows_db(self):
        for i, m in enumerate(self.harmonics):
            yield (int(m), float(self.f_m[i]), to_db(self.g_sig[i]), to_db(self.g_noise[i]),
                   to_db(self.ag[i]) if np.isfinite(self.ag[i]) else float("nan"))


def gain_report(cfg: ArchitectureConfig, ctl: ChannelControls | None = None,
                used_harmonics: Iterable[int] | None = None,
                combining_loss_db: float = 0.0) -> GainReport:
    """Per-harmonic gains: signal N^2|beta_m|^2 over noise N|beta_m|^2, so the array gain is N.

    Gains do not depend on the steering controls; ``ctl`` is only validated.
    ``combining_loss_db`` scales both gains equally, so the array gain is
    unaffected.
    """
    check_controls(cfg, ctl)
    w = cfg.waveform
    if used_harmonics is None:
        ms = w.nonzero_harmonics()
    else:
        ms = np.array(sorted({int(m) for m in used_harmonics}), dtype=int)
    if ms.size == 0:
        raise InvalidParameter("used harmonic set is empty")
    n = cfg.n_channels
    loss = 10.0 ** (-combining_loss_db / 10.0)
    p = np.abs(w.betas(ms)) ** 2
    g_sig = loss * n * n * p
    g_noise = loss * n * p
    zero = p <= (SYMMETRY_RTOL * np.abs(w.coeffs).max()) ** 2
    # g_sig / g_noise is N identically; assign it rather than divide
    ag = np.where(zero, np.nan, float(n))
    used_power = float(np.sum(p))
    h_loss = min(1.0, max(0.0, 1.0 - used_power / total_power(w)))
    return GainReport(harmonics=ms, f_m=cfg.f_rf + ms * cfg.f_hm, g_sig=g_sig, g_noise=g_noise,
                      ag=ag, harmonic_loss=h_loss, flagged=tuple(int(m) for m in ms[zero]))


def comb_harmonics(k: int) -> list[int]:
    """K beam harmonics centred on 0; even K leans toward negative m."""
    if k < 1:
        raise InvalidParameter("K must be >= 1")
    lo = -(k // 2)
    return list(range(lo, lo + k))


@dataclass(frozen=True)
class ComparisonRow:
    k: int
    harmonics: tuple
    g_square: np.ndarray   # per harmonic, aligned with ``harmonics``
    g_comb: np.ndarray
    square_harmonic_loss: float

    @property
    def g_square_0(self) -> float:
        return float(self.g_square[self.harmonics.index(0)])

    @property
    def g_comb_0(self) -> float:
        return float(self.g_comb[self.harmonics.index(0)])


def compare_waveforms(n: int, k_values: Iterable[int], fixed_power: float = 1.0,
                      f_hm: float = 1.0, m_max: int | None = None) -> list[ComparisonRow]:
    """Signal gain of a duty-1/N square versus a K-tooth comb at equal LO power.

    The square is scaled so its full (untruncated) mean-square power equals
    ``fixed_power``; the comb puts ``fixed_power/K`` on each of its K teeth.
    """
    if n < 1:
        raise InvalidParameter("N must be >= 1")
    if not fixed_power > 0:
        raise InvalidParameter("fixed_power must be positive")
    duty = 1.0 / n
    square = make_square(duty, amplitude=math.sqrt(fixed_power / duty), m_max=m_max, f_hm=f_hm)
    rows = []
    for k in sorted(set(int(k) for k in k_values)):
        hs = comb_harmonics(k)
        comb = make_comb(hs, total_power=fixed_power, f_hm=f_hm)
        g_sq = n * n * np.abs(square.betas(hs)) ** 2
        g_cb = n * n * np.abs(comb.betas(hs)) ** 2
        used = float(np.sum(np.abs(square.betas(hs)) ** 2))
        rows.append(ComparisonRow(k=k, harmonics=tuple(hs), g_square=g_sq, g_comb=g_cb,
                                  square_harmonic_loss=max(0.0, 1.0 - used / fixed_power)))
    return rows
