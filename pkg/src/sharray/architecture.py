"""SHA architectures with their channel controls and phase-frequency profiles.

Sign convention: a positive progressive delay ``d_tau`` gives a positive
progressive phase at positive harmonics, ``d_phi(f_m) = 2*pi*m*f_hm*d_tau``.
Channel ``n`` weights its harmonic ``m`` by ``exp(+j*n*d_phi(f_m))`` and a
plane wave from angle theta reaches channel ``n`` with phase
``exp(-j*n*2*pi*d*sin(theta))``, so the beam at harmonic m points where
``sin(theta_m) = d_phi_wrapped(m) / (2*pi*d)``. Under the physical
``exp(+j*2*pi*f*t)`` convention this corresponds to channel n's path being
advanced by ``n*d_tau`` relative to channel 0, i.e. delays referenced to
the last element.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import InvalidControl, InvalidParameter
from .waveform import ChannelCoefficients, HarmonicWaveform, is_square

TWO_PI = 2.0 * math.pi


class Kind(str, enum.Enum):
    TMA = "tma"
    HMA = "hma"
    HMJPTA2 = "hmjpta2"
    HMJPTA3 = "hmjpta3"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        for k in cls:
            if k.value == key:
                return k
        raise InvalidParameter(f"unknown architecture kind {value!r}")


# which progressive controls each architecture can tune
SUPPORTED_CONTROLS = {
    Kind.TMA: frozenset(),
    Kind.HMA: frozenset({"d_tau"}),
    Kind.HMJPTA2: frozenset({"d_tau", "d_phi_rf"}),
    Kind.HMJPTA3: frozenset({"d_tau", "d_phi_rf", "d_phi_lo"}),
}


def wrap_phase(x):
    """Wrap radians into (-pi, pi]."""
    out = math.pi - np.mod(math.pi - np.asarray(x, dtype=float), TWO_PI)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ChannelControls:
    """Progressive channel-to-channel delay and phase increments."""

    d_tau: float = 0.0
    d_phi_rf: float = 0.0
    d_phi_lo: float = 0.0

    def active(self) -> frozenset:
        return frozenset(k for k in ("d_tau", "d_phi_rf", "d_phi_lo") if getattr(self, k) != 0)

    def to_dict(self) -> dict:
        return {"d_tau_s": self.d_tau, "d_phi_rf_rad": self.d_phi_rf, "d_phi_lo_rad": self.d_phi_lo}

    @classmethod
    def from_dict(cls, data: Mapping | None) -> "ChannelControls":
        data = data or {}
        try:
            return cls(d_tau=float(data.get("d_tau_s", 0.0)),
                       d_phi_rf=float(data.get("d_phi_rf_rad", 0.0)),
                       d_phi_lo=float(data.get("d_phi_lo_rad", 0.0)))
        except (TypeError, ValueError) as exc:
            raise InvalidParameter(f"malformed controls: {exc}") from exc


@dataclass(frozen=True)
class ArchitectureConfig:
    kind: Kind
    n_channels: int
    waveform: HarmonicWaveform
    f_rf: float = 28e9
    spacing_d: float = 0.5
    f_bw: float = 0.0
    f_tr: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        if int(self.n_channels) != self.n_channels or self.n_channels < 2:
            raise InvalidParameter(f"n_channels must be an integer >= 2, got {self.n_channels!r}")
        object.__setattr__(self, "n_channels", int(self.n_channels))
        if not self.spacing_d > 0:
            raise InvalidParameter("spacing_d must be positive")
        if not self.f_rf > 0:
            raise InvalidParameter("f_rf must be positive")
        if self.f_bw < 0 or self.f_tr < 0:
            raise InvalidParameter("f_bw and f_tr must be non-negative")
        if not isinstance(self.waveform, HarmonicWaveform):
            raise InvalidParameter("waveform must be a HarmonicWaveform")
        if self.kind is Kind.TMA and not is_square(self.waveform, 1.0 / self.n_channels):
            raise InvalidParameter(
                f"TMA requires a square waveform of duty 1/{self.n_channels}")

    @property
    def f_hm(self) -> float:
        return self.waveform.f_hm

    def fixed_controls(self) -> ChannelControls:
        """The TMA's built-in progressive delay T_hm/N (zero controls otherwise)."""
        if self.kind is Kind.TMA:
            return ChannelControls(d_tau=1.0 / (self.f_hm * self.n_channels))
        return ChannelControls()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n_channels": self.n_channels,
            "spacing_d": self.spacing_d,
            "f_rf_hz": self.f_rf,
            "f_bw_hz": self.f_bw,
            "f_tr_hz": self.f_tr,
            "waveform": self.waveform.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ArchitectureConfig":
        try:
            return cls(kind=Kind.parse(data["kind"]),
                       n_channels=int(data["n_channels"]),
                       waveform=HarmonicWaveform.from_dict(data["waveform"]),
                       f_rf=float(data.get("f_rf_hz", 28e9)),
                       spacing_d=float(data.get("spacing_d", 0.5)),
                       f_bw=float(data.get("f_bw_hz", 0.0)),
                       f_tr=float(data.get("f_tr_hz", 0.0)))
        except KeyError as exc:
            raise InvalidParameter(f"architecture config missing field {exc}") from exc

    def with_waveform(self, waveform: HarmonicWaveform) -> "ArchitectureConfig":
        return replace(self, waveform=waveform)


def check_controls(cfg: ArchitectureConfig, ctl: ChannelControls | None) -> ChannelControls:
    """Validate ``ctl`` against the architecture and return the effective controls.

    The TMA is not tunable: passing ``None``, zero controls or exactly its
    fixed delay is accepted and its fixed delay is returned.
    """
    if ctl is None:
        return cfg.fixed_controls()
    if cfg.kind is Kind.TMA:
        fixed = cfg.fixed_controls()
        if ctl == ChannelControls() or ctl == fixed:
            return fixed
        raise InvalidControl("TMA controls are fixed at d_tau = T_hm/N and cannot be tuned")
    extra = ctl.active() - SUPPORTED_CONTROLS[cfg.kind]
    if extra:
        raise InvalidControl(
            f"{cfg.kind.value} does not support control(s) {', '.join(sorted(extra))}")
    return ctl


def _harmonic_array(cfg: ArchitectureConfig, harmonics) -> np.ndarray:
    if harmonics is None:
        return cfg.waveform.harmonics.copy()
    hs = np.array(sorted({int(m) for m in harmonics}), dtype=int)
    if hs.size == 0:
        raise InvalidParameter("harmonic set is empty")
    return hs


def progressive_phase(cfg: ArchitectureConfig, ctl: ChannelControls, ms: np.ndarray) -> np.ndarray:
    """Unwrapped progressive phase at each harmonic, for already-checked controls."""
    ms = np.asarray(ms)
    f_hm = cfg.f_hm
    if cfg.kind is Kind.HMJPTA3:
        # TTD sits after the mixer, so it sees the full output frequency
        return (TWO_PI * (cfg.f_rf + ms * f_hm) * ctl.d_tau + ctl.d_phi_rf
                + np.sign(ms) * ctl.d_phi_lo)
    phase = TWO_PI * ms * f_hm * ctl.d_tau
    if cfg.kind is Kind.HMJPTA2:
        phase = phase + ctl.d_phi_rf
    return phase.astype(float)


@dataclass(frozen=True)
class PhaseProfile:
    harmonics: np.ndarray
    f_m: np.ndarray
    d_phi: np.ndarray
    d_phi_wrapped: np.ndarray

    def at(self, m: int) -> float:
        idx = np.nonzero(self.harmonics == m)[0]
        if not idx.size:
            raise KeyError(m)
        return float(self.d_phi_wrapped[idx[0]])


def phase_profile(cfg: ArchitectureConfig, ctl: ChannelControls | None = None,
                  harmonics: Iterable[int] | None = None) -> PhaseProfile:
    ctl = check_controls(cfg, ctl)
    ms = _harmonic_array(cfg, harmonics)
    raw = progressive_phase(cfg, ctl, ms)
    return PhaseProfile(harmonics=ms, f_m=cfg.f_rf + ms * cfg.f_hm, d_phi=raw,
                        d_phi_wrapped=np.asarray(wrap_phase(raw), dtype=float).reshape(raw.shape))


def channel_weights(cfg: ArchitectureConfig, ctl: ChannelControls | None, n: int) -> ChannelCoefficients:
    """Harmonic weights ``beta_m * exp(j*n*d_phi(f_m))`` seen at channel ``n``."""
    if not 0 <= n < cfg.n_channels:
        raise InvalidParameter(f"channel index {n} outside 0..{cfg.n_channels - 1}")
    ctl = check_controls(cfg, ctl)
    ms = cfg.waveform.harmonics
    phase = progressive_phase(cfg, ctl, ms)
    return ChannelCoefficients(n=n, harmonics=ms,
                               coeffs=cfg.waveform.coeffs * np.exp(1j * n * phase))


def steering_sine(d_phi_wrapped, spacing_d: float):
    """sin(theta) implied by a wrapped progressive phase."""
    return np.asarray(d_phi_wrapped, dtype=float) / (TWO_PI * spacing_d)


def signal_gain(cfg: ArchitectureConfig, ms) -> np.ndarray:
    """Coherent signal power gain N^2 |beta_m|^2 (lossless combining)."""
    return cfg.n_channels ** 2 * np.abs(cfg.waveform.betas(ms)) ** 2


def to_db(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BeamMap:
    harmonics: np.ndarray
    f_m: np.ndarray
    d_phi_wrapped: np.ndarray
    theta_deg: np.ndarray  # NaN where invisible
    visible: np.ndarray
    g_sig_db: np.ndarray

    def theta(self, m: int) -> float | None:
        idx = np.nonzero(self.harmonics == m)[0]
        if not idx.size:
            raise KeyError(m)
        i = idx[0]
        return float(self.theta_deg[i]) if self.visible[i] else None

    def rows(self):
        for i, m in enumerate(self.harmonics):
            yield (int(m), float(self.f_m[i]),
                   float(self.theta_deg[i]) if self.visible[i] else "invisible",
                   float(self.g_sig_db[i]))


def beam_map(cfg: ArchitectureConfig, ctl: ChannelControls | None = None,
             harmonics: Iterable[int] | None = None) -> BeamMap:
    prof = phase_profile(cfg, ctl, harmonics)
    s = steering_sine(prof.d_phi_wrapped, cfg.spacing_d)
    visible = np.abs(s) <= 1.0
    theta = np.full(s.shape, np.nan)
    theta[visible] = np.degrees(np.arcsin(s[visible]))
    return BeamMap(harmonics=prof.harmonics, f_m=prof.f_m, d_phi_wrapped=prof.d_phi_wrapped,
                   theta_deg=theta, visible=visible,
                   g_sig_db=to_db(signal_gain(cfg, prof.harmonics)))


class BandwidthCheck(NamedTuple):
    passed: bool
    margin: float


def validate_bandwidth(f_hm: float, f_bw: float, f_tr: float = 0.0) -> BandwidthCheck:
    """Harmonic bands stay disjoint iff f_hm > f_bw + f_tr."""
    if min(f_hm, f_bw, f_tr) < 0:
        raise InvalidParameter("bandwidths must be non-negative")
    margin = f_hm - (f_bw + f_tr)
    return BandwidthCheck(passed=margin > 0, margin=margin)


class RequiredBandwidths(NamedTuple):
    lo_network_bw: float
    output_span: float
    f_low: float
    f_high: float


def required_bandwidths(w: HarmonicWaveform, f_rf: float = 0.0) -> RequiredBandwidths:
    """LO-network bandwidth M*f_hm and output span covering bands -M..M around f_rf."""
    m_eff = w.effective_m_max()
    return RequiredBandwidths(lo_network_bw=m_eff * w.f_hm, output_span=2 * m_eff * w.f_hm,
                              f_low=f_rf - m_eff * w.f_hm, f_high=f_rf + m_eff * w.f_hm)
