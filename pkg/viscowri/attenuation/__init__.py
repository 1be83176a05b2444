from .bands import band_center, band_staircase, dispersion_curves, piecewise_band_models
from .mappings import (AttenuationModelKind, AttenuationPair, FrequencySpec, forward, inverse,
                       kf_forward, kf_inverse, kf_slowness, relaxation_times, sls_forward,
                       sls_inverse, sls_relaxation_times, sls_slowness)
