"""Brute-force time-domain simulator used as an oracle for the analytic model.

Everything runs at equivalent baseband: the carrier is not sampled, plane
waves arrive as per-channel phases ``exp(-j*n*2*pi*d*sin(theta))`` and the
``2*pi*f_rf*d_tau`` rotation of a post-mixer delay is applied as a phase.
Each channel's hardware is realized separately (LO time shift, LO-port
phase shifter, RF phase shifter, post-mixer delay) and the mixer is an
ideal multiplication by the channel's HM-LO. Sampling is coherent: the
record spans a whole number of HM-LO periods and every tone sits on a DFT
bin, so there is no leakage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .architecture import (ArchitectureConfig, ChannelControls, Kind, TWO_PI, check_controls)
from .errors import InvalidParameter
from .waveform import SYMMETRY_RTOL, shifted_copy

DEFAULT_PERIODS = 4
DEFAULT_BATCH = 256


@dataclass(frozen=True)
class Source:
    theta_deg: float
    offset_hz: float = 0.0
    amplitude: float = 1.0


@dataclass(frozen=True)
class SimParams:
    """Simulation settings.

    ``duration`` defaults to four HM-LO periods and ``sample_rate`` to the
    smallest power-of-two sample count that keeps all output bands
    alias-free. ``noise_psd`` is the per-sample variance of the white noise
    at each channel input before it is band-limited to the RF channel
    bandwidth ``cfg.f_bw``.
    """

    sample_rate: float | None = None
    duration: float | None = None
    sources: tuple = ()
    noise_psd: float = 0.0
    seed: int = 0
    probe_offset: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(
            s if isinstance(s, Source) else Source(*s) for s in self.sources))
        if self.noise_psd < 0:
            raise InvalidParameter("noise_psd must be non-negative")

    def to_dict(self) -> dict:
        return {
            "sample_rate_hz": self.sample_rate,
            "duration_s": self.duration,
            "sources": [{"theta_deg": s.theta_deg, "offset_hz": s.offset_hz,
                         "amplitude": s.amplitude} for s in self.sources],
            "noise_psd": self.noise_psd,
            "seed": self.seed,
            "probe_offset_hz": self.probe_offset,
        }

    @classmethod
    def from_dict(cls, data) -> "SimParams":
        data = data or {}
        try:
            return cls(sample_rate=data.get("sample_rate_hz"), duration=data.get("duration_s"),
                       sources=tuple(Source(float(s["theta_deg"]), float(s.get("offset_hz", 0.0)),
                                            float(s.get("amplitude", 1.0)))
                                     for s in data.get("sources", ())),
                       noise_psd=float(data.get("noise_psd", 0.0)), seed=int(data.get("seed", 0)),
                       probe_offset=data.get("probe_offset_hz"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidParameter(f"malformed simulation parameters: {exc}") from exc


@dataclass(frozen=True)
class SimGrid:
    n_periods: int
    n_samples: int
    sample_rate: float
    duration: float
    offset_bins: tuple
    probe_bin: int
    noise_bins: np.ndarray
    snaps: tuple = ()

    @property
    def bin_hz(self) -> float:
        return 1.0 / self.duration

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.sample_rate

    def harmonic_bin(self, m) -> np.ndarray:
        return np.asarray(m) * self.n_periods + self.probe_bin


def coherent_grid(cfg: ArchitectureConfig, params: SimParams) -> SimGrid:
    f_hm = cfg.f_hm
    snaps = []
    if params.duration is None:
        periods = DEFAULT_PERIODS
    else:
        if not params.duration > 0:
            raise InvalidParameter("duration must be positive")
        periods = max(1, int(round(params.duration * f_hm)))
        if not math.isclose(periods / f_hm, params.duration, rel_tol=1e-12):
            snaps.append(f"duration {params.duration!r} s snapped to {periods} HM-LO periods")
    duration = periods / f_hm

    def to_bin(f, what):
        b = int(round(f * duration))
        if not math.isclose(b / duration, f, rel_tol=1e-12, abs_tol=1e-9 / duration):
            snaps.append(f"{what} {f!r} Hz snapped to {b / duration!r} Hz")
        return b

    offset_bins = tuple(to_bin(s.offset_hz, "source offset") for s in params.sources)
    if params.probe_offset is not None:
        probe = to_bin(params.probe_offset, "probe offset")
    else:
        probe = offset_bins[0] if offset_bins else 0
    half_band = int(math.floor(0.5 * cfg.f_bw * duration + 1e-9))
    noise_bins = np.arange(-half_band, half_band + 1)

    m_max = cfg.waveform.m_max
    extra = max([abs(b) for b in offset_bins] + [abs(probe), half_band])
    min_samples = 2 * (m_max * periods + extra) + 1
    if params.sample_rate is None:
        n_samples = 1 << (min_samples - 1).bit_length()
    else:
        n_samples = int(math.ceil(params.sample_rate * duration - 1e-9))
        if n_samples < min_samples:
            raise InvalidParameter(
                f"sample_rate {params.sample_rate!r} Hz too low: need more than "
                f"{2 * (m_max * f_hm + extra / duration):.6g} Hz to keep all bands alias-free")
        if not math.isclose(n_samples / duration, params.sample_rate, rel_tol=1e-12):
            snaps.append(f"sample_rate snapped to {n_samples / duration!r} Hz")
    return SimGrid(n_periods=periods, n_samples=n_samples, sample_rate=n_samples / duration,
                   duration=duration, offset_bins=offset_bins, probe_bin=probe,
                   noise_bins=noise_bins, snaps=tuple(snaps))


@dataclass(frozen=True)
class _ChannelPath:
    lo: np.ndarray        # (N, L) sampled HM-LO per channel
    in_advance: np.ndarray  # (N,) time advance applied to the channel input, seconds
    rotation: np.ndarray  # (N,) phase applied to the channel input, radians


def _sample_lo(coeffs: np.ndarray, harmonics: np.ndarray, grid: SimGrid) -> np.ndarray:
    """Samples of sum_m c_m exp(j*2*pi*m*f_hm*t) on the grid.

    Harmonic m sits exactly on DFT bin m*P, and the grid keeps every bin
    below L/2, so one inverse FFT gives the samples.
    """
    spec = np.zeros(grid.n_samples, dtype=np.complex128)
    spec[np.mod(harmonics * grid.n_periods, grid.n_samples)] = coeffs
    return np.fft.ifft(spec) * grid.n_samples


def _channel_paths(cfg: ArchitectureConfig, ctl: ChannelControls, grid: SimGrid) -> _ChannelPath:
    n_ch = cfg.n_channels
    w = cfg.waveform
    lo = np.empty((n_ch, grid.n_samples), dtype=np.complex128)
    in_adv = np.zeros(n_ch)
    rot = np.zeros(n_ch)
    phi_lo = ctl.d_phi_lo if cfg.kind is Kind.HMJPTA3 else 0.0
    for n in range(n_ch):
        adv = n * ctl.d_tau
        if cfg.kind is Kind.HMJPTA3:
            # wideband LO phase shifter, then a delay after the mixer that
            # shifts both the LO product and the input
            in_adv[n] = adv
            rot[n] = n * ctl.d_phi_rf + TWO_PI * math.fmod(cfg.f_rf * adv, 1.0)
        elif cfg.kind is Kind.HMJPTA2:
            rot[n] = n * ctl.d_phi_rf
        # LO seen by channel n is a(t + n*d_tau), LO-port phase applied
        lo[n] = _sample_lo(shifted_copy(w, n, -ctl.d_tau, phi_lo).coeffs, w.harmonics, grid)
    return _ChannelPath(lo=lo, in_advance=in_adv, rotation=rot)


def _plane_wave_inputs(cfg, path: _ChannelPath, grid: SimGrid, psi: np.ndarray,
                       offset_bins: np.ndarray, amps: np.ndarray) -> np.ndarray:
    """Channel inputs for a batch of single tones: returns (S, N, L).

    ``psi`` is each tone's progressive phase (2*pi*d*sin(theta)).
    """
    n = np.arange(cfg.n_channels)
    l = np.arange(grid.n_samples)
    cyc = np.mod(np.multiply.outer(offset_bins, l), grid.n_samples) / grid.n_samples  # (S, L)
    tone = np.exp(2j * np.pi * cyc)
    adv_phase = TWO_PI * np.multiply.outer(offset_bins / grid.duration, path.in_advance)  # (S, N)
    chan = amps[:, None] * np.exp(1j * (path.rotation[None, :] + adv_phase - np.outer(psi, n)))
    return chan[:, :, None] * tone[:, None, :]


def _source_inputs(cfg, path, grid, sources: Sequence[Source]) -> np.ndarray:
    """Sum of all sources at each channel: (1, N, L)."""
    if not sources:
        return np.zeros((1, cfg.n_channels, grid.n_samples), dtype=np.complex128)
    psi = np.array([TWO_PI * cfg.spacing_d * math.sin(math.radians(s.theta_deg)) for s in sources])
    x = _plane_wave_inputs(cfg, path, grid, psi, np.array(grid.offset_bins, dtype=float),
                           np.array([s.amplitude for s in sources], dtype=float))
    return x.sum(axis=0, keepdims=True)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    # counter-based: each trial owns a disjoint block of the Philox stream
    return np.random.Generator(np.random.Philox(key=int(seed), counter=int(trial) << 128))


def _noise_coeffs(seed: int, trials: range, n_ch: int, n_bins: int, n_samples: int,
                  noise_psd: float) -> np.ndarray:
    """In-band DFT coefficients of white noise: CN(0, noise_psd / L) per bin."""
    scale = math.sqrt(noise_psd / (2.0 * n_samples))
    out = np.empty((len(trials), n_ch, n_bins), dtype=np.complex128)
    for i, t in enumerate(trials):
        g = _trial_rng(seed, t).standard_normal((2, n_ch, n_bins))
        out[i] = scale * (g[0] + 1j * g[1])
    return out


def _noise_basis(grid: SimGrid) -> np.ndarray:
    l = np.arange(grid.n_samples)
    cyc = np.mod(np.multiply.outer(grid.noise_bins, l), grid.n_samples) / grid.n_samples
    return np.exp(2j * np.pi * cyc)


def _noise_path_coeffs(z: np.ndarray, path: _ChannelPath, grid: SimGrid) -> np.ndarray:
    """Apply each channel's input rotation and advance to noise coefficients (..., N, B)."""
    adv = TWO_PI * np.multiply.outer(path.in_advance, grid.noise_bins / grid.duration)  # (N, B)
    return np.ascontiguousarray(z * np.exp(1j * (path.rotation[:, None] + adv)))


def _band_power(spec: np.ndarray, grid: SimGrid, ms: np.ndarray) -> np.ndarray:
    """Noise power in each harmonic's band from a (T, L) DFT: returns (T, K)."""
    idx = np.mod(grid.harmonic_bin(ms)[:, None] - grid.probe_bin + grid.noise_bins[None, :],
                 grid.n_samples)
    return np.sum(np.abs(spec[:, idx]) ** 2, axis=-1)


def _adjacent_phase(per_channel: np.ndarray) -> np.ndarray:
    """Progressive phase from per-channel bin values (N, K)."""
    prod = np.sum(per_channel[1:] * np.conj(per_channel[:-1]), axis=0)
    return np.angle(prod)


@dataclass(frozen=True)
class SpectrumResult:
    harmonics: np.ndarray
    f_offset: np.ndarray          # m*f_hm + probe offset, Hz
    amplitude: np.ndarray         # complex output at the probe bin (signal + noise)
    signal_power: np.ndarray
    noise_power: np.ndarray       # in-band noise power around each harmonic
    interchannel_phase: np.ndarray  # radians, NaN where the signal vanishes
    grid: SimGrid = field(repr=False)

    def rows(self):
        for i, m in enumerate(self.harmonics):
            a = self.amplitude[i]
            yield (int(m), float(self.f_offset[i]), float(a.real), float(a.imag),
                   float(self.signal_power[i]), float(self.noise_power[i]))


def _default_harmonics(cfg, harmonics):
    if harmonics is None:
        return cfg.waveform.harmonics.copy()
    return np.array(sorted({int(m) for m in harmonics}), dtype=int)


def simulate_rx(cfg: ArchitectureConfig, ctl: ChannelControls | None, params: SimParams,
                harmonics: Iterable[int] | None = None) -> SpectrumResult:
    """Receive the configured sources and read each harmonic bin of the combined output."""
    ctl = check_controls(cfg, ctl)
    grid = coherent_grid(cfg, params)
    ms = _default_harmonics(cfg, harmonics)
    path = _channel_paths(cfg, ctl, grid)
    x = _source_inputs(cfg, path, grid, params.sources)
    bins = grid.harmonic_bin(ms)

    y = kernels.mix_combine(path.lo, x)[0]
    amp_sig = kernels.dft_bins(y, bins)
    per_channel = kernels.dft_bins(path.lo * x[0], bins)   # (N, K)
    phase = _adjacent_phase(per_channel)
    floor = SYMMETRY_RTOL * max(1.0, float(np.max(np.abs(per_channel), initial=0.0)))
    phase = np.where(np.abs(per_channel).min(axis=0) > floor, phase, np.nan)

    amp = amp_sig.copy()
    noise_power = np.zeros(ms.shape)
    if params.noise_psd > 0:
        z = _noise_coeffs(params.seed, range(1), cfg.n_channels, grid.noise_bins.size,
                          grid.n_samples, params.noise_psd)[0]
        yn = kernels.band_mix_combine(path.lo, _noise_path_coeffs(z[None], path, grid), _noise_basis(grid))
        spec = np.fft.fft(yn, axis=-1) / grid.n_samples
        noise_power = _band_power(spec, grid, ms)[0]
        amp = amp + spec[0, np.mod(bins, grid.n_samples)]
    return SpectrumResult(harmonics=ms, f_offset=ms * cfg.f_hm + grid.probe_bin / grid.duration,
                          amplitude=amp, signal_power=np.abs(amp_sig) ** 2,
                          noise_power=noise_power, interchannel_phase=phase, grid=grid)


def measure_interchannel_phase(cfg: ArchitectureConfig, ctl: ChannelControls | None,
                               params: SimParams | None, m: int) -> float:
    """Adjacent-channel phase at bin ``m`` for a noiseless broadside source."""
    params = params or SimParams()
    offset = params.probe_offset or 0.0
    probe = SimParams(sample_rate=params.sample_rate, duration=params.duration,
                      sources=(Source(0.0, offset, 1.0),), noise_psd=0.0, seed=params.seed,
                      probe_offset=offset)
    res = simulate_rx(cfg, ctl, probe, harmonics=[m])
    return float(res.interchannel_phase[0])


@dataclass(frozen=True)
class EmpiricalGains:
    harmonics: np.ndarray
    g_sig: np.ndarray
    g_noise: np.ndarray
    ag: np.ndarray
    baseline_g_sig: np.ndarray     # channel 0 alone, no combining
    baseline_g_noise: np.ndarray
    baseline_ag: np.ndarray
    trials: int


def measure_gains(cfg: ArchitectureConfig, ctl: ChannelControls | None, params: SimParams,
                  trials: int, harmonics: Iterable[int] | None = None,
                  batch: int = DEFAULT_BATCH) -> EmpiricalGains:
    """Empirical gains per harmonic.

    Signal gain uses a unit tone whose progressive phase is set to the
    phase the simulator itself measures at that harmonic (so it arrives
    from the beam direction, visible or not). Noise gain averages
    ``trials`` independent noise-only runs, comparing output power in each
    harmonic's band with the input power per channel in the RF band.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    if not params.noise_psd > 0:
        raise InvalidParameter("noise_psd must be positive to measure noise gain")
    ctl = check_controls(cfg, ctl)
    grid = coherent_grid(cfg, params)
    if 2 * grid.noise_bins[-1] + 1 > grid.n_periods:
        raise InvalidParameter("noise band must be narrower than f_hm so harmonic bands stay disjoint")
    if harmonics is None:
        ms = cfg.waveform.nonzero_harmonics()
    else:
        ms = _default_harmonics(cfg, harmonics)
    path = _channel_paths(cfg, ctl, grid)
    bins = grid.harmonic_bin(ms)

    # aim a unit tone at each harmonic's measured beam
    broadside = _plane_wave_inputs(cfg, path, grid, np.zeros(1), np.array([grid.probe_bin], float),
                                   np.ones(1))
    steer = _adjacent_phase(kernels.dft_bins(path.lo * broadside[0], bins))
    g_sig = np.empty(ms.size)
    g_sig_1 = np.empty(ms.size)
    for start in range(0, ms.size, batch):
        sl = slice(start, start + batch)
        x = _plane_wave_inputs(cfg, path, grid, steer[sl], np.full(steer[sl].size, grid.probe_bin, float),
                               np.ones(steer[sl].size))
        y = kernels.mix_combine(path.lo, x)
        own = bins[sl]
        g_sig[sl] = np.abs(kernels.dft_rowbins(y, own)) ** 2
        y1 = path.lo[0][None, :] * x[:, 0, :]
        g_sig_1[sl] = np.abs(kernels.dft_rowbins(y1, own)) ** 2

    basis = _noise_basis(grid)
    out_sum = np.zeros(ms.size)
    out_sum_1 = np.zeros(ms.size)
    in_sum = 0.0
    n_bins = grid.noise_bins.size
    for start in range(0, trials, batch):
        tr = range(start, min(trials, start + batch))
        z = _noise_coeffs(params.seed, tr, cfg.n_channels, n_bins, grid.n_samples, params.noise_psd)
        zr = _noise_path_coeffs(z, path, grid)
        y = kernels.band_mix_combine(path.lo, zr, basis)
        spec = np.fft.fft(y, axis=-1) / grid.n_samples
        out_sum += _band_power(spec, grid, ms).sum(axis=0)
        y1 = path.lo[0][None, :] * (zr[:, 0, :] @ basis)
        spec1 = np.fft.fft(y1, axis=-1) / grid.n_samples
        out_sum_1 += _band_power(spec1, grid, ms).sum(axis=0)
        in_sum += float(np.sum(np.abs(z) ** 2))
    in_per_channel = in_sum / (trials * cfg.n_channels)
    g_noise = out_sum / trials / in_per_channel
    g_noise_1 = out_sum_1 / trials / in_per_channel
    with np.errstate(divide="ignore", invalid="ignore"):
        ag = g_sig / g_noise
        ag_1 = g_sig_1 / g_noise_1
    return EmpiricalGains(harmonics=ms, g_sig=g_sig, g_noise=g_noise, ag=ag,
                          baseline_g_sig=g_sig_1, baseline_g_noise=g_noise_1, baseline_ag=ag_1,
                          trials=trials)
