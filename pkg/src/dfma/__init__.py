"""Frequency-matching analysis of LIF membrane decay against discriminative temporal spectra."""
from .di import DiSpectrum, class_statistics, compute_di, di_spectrum
from .energy import EnergyConstants, LayerOps, ann_energy, snn_energy, sops
from .errors import (DataError, DfmaError, DomainError, NoDiscriminationError,
                     ParameterError)
from .lif_sim import LifConfig, gain_probe, mean_spike_rate, run, step, validity_flag
from .lif_spectral import (cutoff, effective_bandwidth, leak_from_beta, leak_from_tau,
                           quantize_cutoff, sample_template, template_at)
from .matching import FmsCurve, classify_regime, fms_avg, fms_sweep, select_boundary
from .spectrum import FrequencyGrid, SampleTensor, amplitude_spectrum, build_grid

__version__ = "0.1.0"
