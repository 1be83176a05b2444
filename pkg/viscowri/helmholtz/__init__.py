from .acquisition import Acquisition, ObservationOperator, SourceTerm, extended_index, sample
from .pml import PmlProfile
from .stencils import Stencil
from .system import HelmholtzSystem, assemble, augmented_wavefield_solve, solve_forward
from .wavelet import SourceWavelet, ricker_spectrum, ricker_wavelet, synthesize_traces
