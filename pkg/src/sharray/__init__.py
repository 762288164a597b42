"""Modeling toolkit for spatial-to-spectral harmonic-modulated arrays."""

from .architecture import (ArchitectureConfig, BeamMap, ChannelControls, Kind, PhaseProfile,
                           beam_map, channel_weights, phase_profile, required_bandwidths,
                           validate_bandwidth, wrap_phase)
from .analysis import GainReport, PatternSlice, array_factor, compare_waveforms, gain_report
from .dof import (DofMatrix, SteeringProblem, SteeringSolution, build_dof_matrix, dof_rank,
                  elementary_transform, solve_steering, verify_steering)
from .errors import InvalidControl, InvalidParameter, SHAError, SteeringInfeasible
from .sim import (SimParams, Source, SpectrumResult, measure_gains, measure_interchannel_phase,
                  simulate_rx)
from .waveform import (ChannelCoefficients, HarmonicWaveform, eval_time, make_comb, make_square,
                       normalize_power, shifted_copy, total_power)

__version__ = "0.1.0"
