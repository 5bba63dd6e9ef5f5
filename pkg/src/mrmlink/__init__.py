"""Dual micro-ring modulator link simulator and linearity metrology toolkit."""

__version__ = "0.1.0"

from .actuation import (DriveWaveform, OperatingPoint, make_pam, make_ramp,
                        make_two_tone, make_waveform, resonance_shift)
from .errors import (ConfigError, DataParseError, DegenerateResponseError,
                     InfeasibleSearchError, InvalidArgumentError, MrmLinkError,
                     WindowUnreachableError)
from .link import (LaserSpec, LinkConfig, LinkOutput, port_powers,
                   simulate_link, summed_gain, summed_gain_fn, notch_gain_fn)
from .metrics import (LinearityReport, SpectrumReport, TransferCurve,
                      WindowedCurve, db_to_bits, bits_to_db, delta_db,
                      extinction_ratio_db, fs_window, inl, ladder_report,
                      pam_level_report, static_transfer, two_tone_analysis)
from .optimize import OptimizeResult, SearchSpec, grid_sweep, optimize
from .resonator import RingDevice, drop_gain, fsr, loaded_q, round_trip_phase, thru_gain
from .runconfig import RunConfig, load_config

__all__ = [name for name in dir() if not name.startswith("_")]
