"""Spatial-to-spectral degrees of freedom and inverse beam steering.

Each architecture's progressive phase is linear in a small control vector
x, ``d_phi(f_m) = A[m] @ x``:

    HMA      x = (2*pi*f_hm*d_tau,)                    A[m] = (m,)
    HMJPTA2  x = (d_phi_rf, 2*pi*f_hm*d_tau)           A[m] = (1, m)
    HMJPTA3  x = (d_phi_rf + 2*pi*f_rf*d_tau,
                  d_phi_lo, 2*pi*f_hm*d_tau)           A[m] = (1, sgn(m), m)

The rank of A over the selected harmonics is the number of independently
steerable beams.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .analysis import DEFAULT_GRID_STEP_DEG, array_factor, theta_grid
from .architecture import (ArchitectureConfig, ChannelControls, Kind, TWO_PI, phase_profile,
                           wrap_phase)
from .errors import InvalidParameter, SteeringInfeasible

COLUMNS = {
    Kind.TMA: (),
    Kind.HMA: ("m",),
    Kind.HMJPTA2: ("1", "m"),
    Kind.HMJPTA3: ("1", "sgn(m)", "m"),
}

DEFAULT_RANK_TOL = 1e-10
FEASIBILITY_TOL = 1e-9
MAX_WRAP_OFFSET = 4
# cap on wrap-offset combinations searched per solve
MAX_WRAP_CANDIDATES = 200_000


@dataclass(frozen=True)
class DofMatrix:
    rows: tuple
    cols: tuple
    a: np.ndarray
    kind: Kind

    @property
    def shape(self):
        return self.a.shape


def _column(label: str, m: int) -> int:
    if label == "1":
        return 1
    if label == "m":
        return m
    return (m > 0) - (m < 0)


def build_dof_matrix(kind, harmonics: Iterable[int]) -> DofMatrix:
    kind = Kind.parse(kind)
    hs = [int(m) for m in harmonics]
    if not hs:
        raise InvalidParameter("harmonic selection is empty")
    if len(set(hs)) != len(hs):
        raise InvalidParameter("duplicate harmonics in selection")
    hs.sort()
    cols = COLUMNS[kind]
    a = np.array([[_column(c, m) for c in cols] for m in hs], dtype=np.int64).reshape(len(hs), len(cols))
    a.setflags(write=False)
    return DofMatrix(rows=tuple(hs), cols=cols, a=a, kind=kind)


def dof_rank(a, tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank: singular values above ``tol * sigma_max``."""
    if not tol > 0:
        raise InvalidParameter("tol must be positive")
    mat = np.asarray(a.a if isinstance(a, DofMatrix) else a, dtype=float)
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def elementary_transform(f_rf: float, f_hm: float) -> tuple[np.ndarray, np.ndarray]:
    """E maps the HMJPTA3 solve basis to hardware controls; returns (E, E^-1).

    ``E @ x = (d_phi_rf, d_phi_lo, 2*pi*f_hm*d_tau)``.
    """
    if not f_hm > 0:
        raise InvalidParameter("f_hm must be positive")
    r = f_rf / f_hm
    e = np.eye(3)
    e[0, 2] = -r
    e_inv = np.eye(3)
    e_inv[0, 2] = r
    return e, e_inv


@dataclass(frozen=True)
class SteeringProblem:
    targets: tuple  # of (m, theta_deg), sorted by m

    def __init__(self, targets: Iterable[tuple[int, float]] | Mapping[int, float]):
        items = list(targets.items()) if isinstance(targets, Mapping) else list(targets)
        pairs = [(int(m), float(th)) for m, th in items]
        ms = [m for m, _ in pairs]
        if len(set(ms)) != len(ms):
            raise InvalidParameter("duplicate harmonic in steering targets")
        for m, th in pairs:
            if not -90.0 <= th <= 90.0:
                raise InvalidParameter(f"target angle {th} deg for m={m} outside [-90, 90]")
        object.__setattr__(self, "targets", tuple(sorted(pairs)))

    @property
    def harmonics(self) -> list[int]:
        return [m for m, _ in self.targets]

    @property
    def angles_deg(self) -> np.ndarray:
        return np.array([th for _, th in self.targets], dtype=float)

    def target_phases(self, spacing_d: float) -> np.ndarray:
        return TWO_PI * spacing_d * np.sin(np.radians(self.angles_deg))

    def to_dict(self) -> dict:
        return {"targets": [{"m": m, "theta_deg": th} for m, th in self.targets]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "SteeringProblem":
        try:
            return cls([(int(t["m"]), float(t["theta_deg"])) for t in data["targets"]])
        except (KeyError, TypeError) as exc:
            raise InvalidParameter(f"malformed steering problem: {exc}") from exc


@dataclass(frozen=True)
class SteeringSolution:
    controls: ChannelControls
    achieved_profile: dict = field(default_factory=dict)   # m -> wrapped radians
    residual: float = 0.0
    rank: int = 0
    wrap_offsets: tuple = ()

    def to_dict(self, problem: SteeringProblem | None = None) -> dict:
        out = problem.to_dict() if problem is not None else {"targets": []}
        out["solution"] = self.controls.to_dict()
        out["residual_rad"] = self.residual
        return out


def _phase_control(x: float) -> float:
    """Phase-shifter setting in [0, 2*pi)."""
    v = math.fmod(float(x), TWO_PI)
    if v < 0:
        v += TWO_PI
    return 0.0 if v >= TWO_PI or abs(v - TWO_PI) < 1e-12 else v


def _controls_from_x(cfg: ArchitectureConfig, x: np.ndarray) -> ChannelControls:
    two_pi_f = TWO_PI * cfg.f_hm
    if cfg.kind is Kind.HMA:
        return ChannelControls(d_tau=float(x[0] / two_pi_f))
    if cfg.kind is Kind.HMJPTA2:
        return ChannelControls(d_tau=float(x[1] / two_pi_f), d_phi_rf=_phase_control(x[0]))
    e, _ = elementary_transform(cfg.f_rf, cfg.f_hm)
    phi_rf, phi_lo, tau_term = e @ x
    return ChannelControls(d_tau=float(tau_term / two_pi_f), d_phi_rf=_phase_control(phi_rf),
                           d_phi_lo=_phase_control(phi_lo))


def _wrap_offset_grid(k: int) -> np.ndarray:
    r = MAX_WRAP_OFFSET
    while r > 0 and (2 * r + 1) ** k > MAX_WRAP_CANDIDATES:
        r -= 1
    return np.array(list(itertools.product(range(-r, r + 1), repeat=k)), dtype=float).reshape(-1, k)


def solve_steering(cfg: ArchitectureConfig, problem: SteeringProblem,
                   tol: float = FEASIBILITY_TOL) -> SteeringSolution:
    """Controls that point beam ``m`` at each target angle.

    Targets are converted to progressive phases and solved in unwrapped
    phase space (exactly when A is square and full rank, in least squares
    otherwise). Each target may be offset by 2*pi*k, |k| <= 4; among the
    offsets reaching the smallest residual the one with the smallest |d_tau|
    wins, then the smallest total offset. Phase-shifter settings are
    reported in [0, 2*pi).
    """
    if cfg.spacing_d > 0.5:
        raise InvalidParameter("steering needs spacing_d <= 0.5 to avoid grating-lobe ambiguity")
    if not problem.targets:
        return SteeringSolution(controls=cfg.fixed_controls(), rank=0)
    dm = build_dof_matrix(cfg.kind, problem.harmonics)
    rank = dof_rank(dm)
    y = problem.target_phases(cfg.spacing_d)

    if cfg.kind is Kind.TMA:
        ctl = cfg.fixed_controls()
        return _finish(cfg, problem, ctl, y, rank, (0,) * len(y), tol)

    a = dm.a.astype(float)
    offsets = _wrap_offset_grid(len(y))
    ys = y[:, None] + TWO_PI * offsets.T                    # targets x candidates
    xs, *_ = np.linalg.lstsq(a, ys, rcond=None)
    resid = np.max(np.abs(wrap_phase(a @ xs - ys)), axis=0)
    tau_col = dm.cols.index("m")
    tau_mag = np.abs(xs[tau_col])
    best = resid.min()
    ok = resid <= best + tol
    # order: smallest |d_tau| (rounded to kill float ties), then total |k|
    key_tau = np.round(tau_mag / math.pi, 9)
    key_k = np.abs(offsets).sum(axis=1)
    cand = np.nonzero(ok)[0]
    order = np.lexsort((key_k[cand], key_tau[cand]))
    i = cand[order[0]]
    ctl = _controls_from_x(cfg, xs[:, i])
    return _finish(cfg, problem, ctl, y, rank, tuple(int(k) for k in offsets[i]), tol)


def _finish(cfg, problem, ctl, y, rank, offsets, tol) -> SteeringSolution:
    prof = phase_profile(cfg, ctl, problem.harmonics)
    achieved = prof.d_phi_wrapped
    residual = float(np.max(np.abs(wrap_phase(achieved - y))))
    if residual > tol:
        raise SteeringInfeasible(
            f"{len(y)} target(s) cannot be met by {cfg.kind.value}: DoF matrix rank is {rank}, "
            f"residual {residual:.3g} rad", rank=rank, residual=residual)
    return SteeringSolution(controls=ctl,
                            achieved_profile={int(m): float(p) for m, p in zip(prof.harmonics, achieved)},
                            residual=residual, rank=rank, wrap_offsets=offsets)


@dataclass(frozen=True)
class SteeringReport:
    entries: tuple   # (m, target_deg, peak_deg, error_deg)
    tolerance_deg: float

    @property
    def max_error(self) -> float:
        return max((e[3] for e in self.entries), default=0.0)

    @property
    def flagged(self) -> tuple:
        return tuple(e[0] for e in self.entries if e[3] > self.tolerance_deg)

    @property
    def passed(self) -> bool:
        return not self.flagged


def verify_steering(cfg: ArchitectureConfig, solution: SteeringSolution | ChannelControls,
                    problem: SteeringProblem, tolerance_deg: float = 0.5,
                    grid_step_deg: float = DEFAULT_GRID_STEP_DEG) -> SteeringReport:
    """Forward-evaluate each target harmonic's pattern and compare its peak."""
    ctl = solution.controls if isinstance(solution, SteeringSolution) else solution
    grid = theta_grid(grid_step_deg)
    entries = []
    for m, target in problem.targets:
        pat = array_factor(cfg, ctl, m, grid)
        peak = pat.peak_theta_refined
        entries.append((m, target, peak, abs(peak - target)))
    return SteeringReport(entries=tuple(entries), tolerance_deg=tolerance_deg)


def independent_beam_count(kind, harmonics: Sequence[int]) -> int:
    return dof_rank(build_dof_matrix(kind, harmonics))
