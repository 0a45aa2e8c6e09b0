"""Polarization self-rotation in an atomic X-system, the polarization-selective
ring cavity it drives into bistable parametric oscillation, statistics of the
resulting spontaneous symmetry breaking, and a coupled-mode Ising-machine
extension."""

from .atomic import (AtomicParams, DensityMatrix4, DriveField, OpticalResponse,
                     SingularSystem, ZeroField, gain_scale_for_gain,
                     master_equation_residual, optical_response,
                     response_closed_form, self_rotation_angle, small_signal_gain,
                     steady_state)
from .cavity import (CavityParams, InvalidEta, Medium, RunRecord, SweepPoint,
                     child_seed, linear_transfer_matrix, max_spectral_radius,
                     optimal_phase, roundtrip, rotated_vertical,
                     run_to_steady_state, spectral_radius, sweep_loss,
                     threshold_check)
from .ising import (DimensionMismatch, IsingProblem, RestartRecord, SolveResult,
                    SpinConfiguration, TooLarge, brute_force_ground_state,
                    coupled_roundtrip, coupling_from_maxcut, ising_energy,
                    read_edge_list, solve, write_edge_list)
from .polarization import (IntensityRecord, PolarizationState, UndefinedAngle,
                           ZeroHorizontal, ZeroPower, decompose,
                           ellipse_angle_from_intensities, ellipticity,
                           quadratures_from_intensities, rotate)
from .stats import (HelicitySequence, LagTooLarge, autocorrelation,
                    bernoulli_band, bias, filter_events)

__version__ = "0.1.0"
