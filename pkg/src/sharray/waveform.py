"""HM-LO waveforms represented as finite complex Fourier series.

A waveform is stored densely over harmonics ``-M..M``:

    a(t) = sum_m beta_m * exp(j*2*pi*m*f_hm*t)

Built-in square and comb shapes sit alongside arbitrary coefficients. Per-channel
copies (delayed and/or LO phase shifted) are returned as
:class:`ChannelCoefficients`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidParameter

# relative tolerance for conjugate-symmetry checks and "nonzero" tests
SYMMETRY_RTOL = 1e-12


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HarmonicWaveform:
    """Periodic HM-LO waveform with fundamental ``f_hm`` (Hz).

    ``coeffs[i]`` holds beta_m for ``m = i - m_max``.
    """

    f_hm: float
    coeffs: np.ndarray
    real_valued: bool = False

    def __post_init__(self):
        if not (self.f_hm > 0 and math.isfinite(self.f_hm)):
            raise InvalidParameter(f"f_hm must be a positive finite frequency, got {self.f_hm!r}")
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size % 2 != 1:
            raise InvalidParameter("coeffs must be a 1-D array of odd length 2*M+1")
        if not np.all(np.isfinite(c)):
            raise InvalidParameter("coeffs must be finite")
        if not np.any(c != 0):
            raise InvalidParameter("waveform needs at least one nonzero coefficient")
        if self.real_valued:
            scale = np.max(np.abs(c))
            if np.max(np.abs(c[::-1] - np.conj(c))) > SYMMETRY_RTOL * scale:
                raise InvalidParameter(
                    "real_valued waveform requires beta_{-m} == conj(beta_m) for all m")
            # snap tiny asymmetries so downstream evaluation is exactly real
            c = 0.5 * (c + np.conj(c[::-1]))
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def m_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.m_max, self.m_max + 1)

    @property
    def period(self) -> float:
        return 1.0 / self.f_hm

    def beta(self, m: int) -> complex:
        """Coefficient at harmonic ``m`` (zero outside the stored range)."""
        m = int(m)
        if abs(m) > self.m_max:
            return 0j
        return complex(self.coeffs[m + self.m_max])

    def betas(self, ms: Iterable[int]) -> np.ndarray:
        return np.array([self.beta(m) for m in ms], dtype=np.complex128)

    def nonzero_harmonics(self) -> np.ndarray:
        mag = np.abs(self.coeffs)
        return self.harmonics[mag > SYMMETRY_RTOL * mag.max()]

    def effective_m_max(self) -> int:
        """Largest |m| carrying a nonzero coefficient."""
        return int(np.max(np.abs(self.nonzero_harmonics())))

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, complex] | Sequence[tuple[int, complex]],
                    f_hm: float, real_valued: bool = False) -> "HarmonicWaveform":
        """Build from sparse ``{m: beta_m}`` (or pairs); fills zeros up to max |m|."""
        items = list(coeffs.items()) if isinstance(coeffs, Mapping) else list(coeffs)
        if not items:
            raise InvalidParameter("no coefficients given")
        ms = [int(m) for m, _ in items]
        if len(set(ms)) != len(ms):
            raise InvalidParameter("duplicate harmonic index in coefficients")
        m_max = max(abs(m) for m in ms)
        dense = np.zeros(2 * m_max + 1, dtype=np.complex128)
        for m, b in items:
            dense[int(m) + m_max] = complex(b)
        return cls(f_hm=float(f_hm), coeffs=dense, real_valued=real_valued)

    def to_dict(self) -> dict:
        return {
            "f_hm_hz": float(self.f_hm),
            "real_valued": bool(self.real_valued),
            "coeffs": [
                {"m": int(m), "re": float(b.real), "im": float(b.imag)}
                for m, b in zip(self.harmonics, self.coeffs)
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HarmonicWaveform":
        try:
            pairs = [(int(c["m"]), complex(float(c["re"]), float(c["im"])))
                     for c in data["coeffs"]]
            return cls.from_coeffs(pairs, f_hm=float(data["f_hm_hz"]),
                                   real_valued=bool(data.get("real_valued", False)))
        except (KeyError, TypeError) as exc:
            raise InvalidParameter(f"malformed waveform JSON: {exc}") from exc


@dataclass(frozen=True)
class ChannelCoefficients:
    """Fourier coefficients ``w_{n,m}`` of the HM-LO seen by channel ``n``."""

    n: int
    harmonics: np.ndarray
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "harmonics", _readonly(np.asarray(self.harmonics, dtype=int)))
        object.__setattr__(self, "coeffs", _readonly(np.asarray(self.coeffs, dtype=np.complex128)))

    def weight(self, m: int) -> complex:
        idx = np.nonzero(self.harmonics == m)[0]
        return complex(self.coeffs[idx[0]]) if idx.size else 0j


def _as_fraction(duty) -> Fraction:
    if isinstance(duty, Fraction):
        return duty
    if isinstance(duty, int):
        return Fraction(duty)
    return Fraction(float(duty)).limit_denominator(1_000_000)


def default_square_m_max(duty) -> int:
    return 4 * math.ceil(1 / _as_fraction(duty))


def make_square(duty, amplitude: float = 1.0, m_max: int | None = None,
                f_hm: float = 1.0, bipolar: bool = False) -> HarmonicWaveform:
    """Pulse train of the given duty cycle, centred on t = 0.

    The unipolar (0/amplitude) form has beta_0 = amplitude*duty and
    beta_m = amplitude*sin(pi*m*duty)/(pi*m). With ``bipolar`` the waveform
    swings between -amplitude and +amplitude instead.

    Harmonics are truncated at ``m_max`` (default ``4*ceil(1/duty)``), so
    :func:`total_power` falls short of ``amplitude**2 * duty`` by the energy
    in the discarded tail.
    """
    d = _as_fraction(duty)
    if not (0 < d <= 1):
        raise InvalidParameter(f"duty must lie in (0, 1], got {duty!r}")
    if not amplitude > 0:
        raise InvalidParameter(f"amplitude must be positive, got {amplitude!r}")
    if not f_hm > 0:
        raise InvalidParameter(f"f_hm must be positive, got {f_hm!r}")
    if m_max is None:
        m_max = default_square_m_max(d)
    if int(m_max) < 1:
        raise InvalidParameter("m_max must be >= 1")
    m_max = int(m_max)
    df = float(d)
    ms = np.arange(-m_max, m_max + 1)
    coeffs = np.empty(ms.size, dtype=np.complex128)
    for i, m in enumerate(ms):
        if m == 0:
            coeffs[i] = df
        elif (m * d).denominator == 1:
            coeffs[i] = 0.0  # exact spectral null
        else:
            coeffs[i] = math.sin(math.pi * m * df) / (math.pi * m)
    coeffs *= amplitude
    if bipolar:
        coeffs *= 2
        coeffs[m_max] -= amplitude
        if not np.any(coeffs != 0):
            raise InvalidParameter("bipolar square with duty 1/2 and no harmonics is all-zero")
    return HarmonicWaveform(f_hm=float(f_hm), coeffs=coeffs, real_valued=True)


PHASE_SCHEMES = ("zero", "random")


def make_comb(harmonics: Iterable[int], total_power: float = 1.0, phase_scheme: str = "zero",
              f_hm: float = 1.0, seed: int | None = None) -> HarmonicWaveform:
    """Comb-like waveform: equal power at each listed harmonic, zero elsewhere.

    ``phase_scheme="random"`` draws seeded phases; if the harmonic set is
    symmetric about 0 the phases are made conjugate-symmetric so the
    waveform stays real.
    """
    hs = sorted({int(m) for m in harmonics})
    if not hs:
        raise InvalidParameter("comb needs at least one harmonic")
    if not total_power > 0:
        raise InvalidParameter(f"total_power must be positive, got {total_power!r}")
    if phase_scheme not in PHASE_SCHEMES:
        raise InvalidParameter(f"unknown phase scheme {phase_scheme!r}")
    mag = math.sqrt(total_power / len(hs))
    symmetric = set(hs) == {-m for m in hs}
    phases = dict.fromkeys(hs, 0.0)
    if phase_scheme == "random":
        rng = np.random.default_rng(seed)
        for m in hs:
            if symmetric and m < 0:
                continue
            phases[m] = 0.0 if (symmetric and m == 0) else float(rng.uniform(-np.pi, np.pi))
        if symmetric:
            for m in hs:
                if m < 0:
                    phases[m] = -phases[-m]
    coeffs = {m: mag * np.exp(1j * phases[m]) for m in hs}
    return HarmonicWaveform.from_coeffs(coeffs, f_hm=f_hm, real_valued=symmetric)


def total_power(w: HarmonicWaveform) -> float:
    """Sum of |beta_m|^2, i.e. the mean of |a(t)|^2 over one period."""
    return float(np.sum(np.abs(w.coeffs) ** 2))


def normalize_power(w: HarmonicWaveform, target_power: float) -> HarmonicWaveform:
    if not target_power > 0:
        raise InvalidParameter(f"target_power must be positive, got {target_power!r}")
    p = total_power(w)
    if not p > 0:
        raise InvalidParameter("cannot normalize a zero-power waveform")
    scale = math.sqrt(target_power / p)
    return HarmonicWaveform(f_hm=w.f_hm, coeffs=w.coeffs * scale, real_valued=w.real_valued)


def eval_time(w: HarmonicWaveform, t):
    """Evaluate the truncated series at time(s) ``t`` (seconds).

    Returns a complex scalar for scalar input, otherwise an array shaped
    like ``t``.
    """
    t_arr = np.asarray(t, dtype=float)
    # phase in cycles; reduce the per-harmonic argument modulo 1 for accuracy
    cycles = np.mod(np.multiply.outer(t_arr * w.f_hm, w.harmonics), 1.0)
    out = np.exp(2j * np.pi * cycles) @ w.coeffs
    if t_arr.ndim == 0:
        return complex(out)
    return out


def shifted_copy(w: HarmonicWaveform, n: int, tau: float, phi_lo: float = 0.0) -> ChannelCoefficients:
    """Coefficients of ``a(t - n*tau)`` with an LO-port phase shift applied.

    w_{n,m} = beta_m * exp(-j*2*pi*m*f_hm*n*tau) * exp(j*n*phi_lo*sgn(m)).
    A wideband LO phase shifter rotates positive harmonics forward and
    negative ones backward; it leaves DC untouched.
    """
    ms = w.harmonics
    delay_cycles = np.mod(ms * (w.f_hm * n * tau), 1.0)
    rot = np.exp(-2j * np.pi * delay_cycles) * np.exp(1j * n * phi_lo * np.sign(ms))
    return ChannelCoefficients(n=int(n), harmonics=ms, coeffs=w.coeffs * rot)


def channel_waveform(w: HarmonicWaveform, cc: ChannelCoefficients) -> HarmonicWaveform:
    """Wrap per-channel coefficients back into a waveform for time evaluation."""
    pairs = list(zip(cc.harmonics.tolist(), cc.coeffs))
    real = w.real_valued and bool(np.allclose(cc.coeffs[::-1], np.conj(cc.coeffs),
                                              rtol=0, atol=SYMMETRY_RTOL * np.abs(cc.coeffs).max()))
    return HarmonicWaveform.from_coeffs(pairs, f_hm=w.f_hm, real_valued=real)


def is_square(w: HarmonicWaveform, duty, rtol: float = 1e-9) -> bool:
    """True if ``w`` equals a (scaled) unipolar square of this duty cycle."""
    b0 = w.beta(0)
    if abs(b0.imag) > rtol * abs(b0) or b0.real <= 0:
        return False
    ref = make_square(duty, amplitude=b0.real / float(_as_fraction(duty)), m_max=w.m_max,
                      f_hm=w.f_hm)
    scale = np.max(np.abs(ref.coeffs))
    return bool(np.max(np.abs(ref.coeffs - w.coeffs)) <= rtol * scale)
