from .grid import ComplexField, Grid2D, RealField, wrapped_phase
from .operators import (grad_x, grad_x_adjoint, grad_z, grad_z_adjoint,
                        gradient_magnitude, gradient_operators, tv_norm)
from .storage import read_field, write_csv, write_field, write_profile
