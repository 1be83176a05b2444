import numpy as np


def shrink_weight(magnitude, gamma):
    """phi_gamma(x) = max(1 - gamma/x, 0) for x > 0 and 0 at x = 0."""
    magnitude = np.asarray(magnitude, dtype=float)
    weight = np.zeros_like(magnitude)
    positive = magnitude > 0
    weight[positive] = np.maximum(1.0 - gamma / magnitude[positive], 0.0)
    return weight


def shrink_pair(z_x, z_z, level_x, level_z):
    """Isotropic shrinkage of the gradient pair (z_x, z_z) on its joint magnitude."""
    magnitude = np.sqrt(np.abs(z_x) ** 2 + np.abs(z_z) ** 2)
    return shrink_weight(magnitude, level_x) * z_x, shrink_weight(magnitude, level_z) * z_z


def joint_prox_update(z_x, z_z, gamma_x, gamma_z):
    """Shrink complex gradients on the joint magnitude of their real and imaginary parts."""
    return shrink_pair(z_x, z_z, 1.0 / gamma_x, 1.0 / gamma_z)


def separate_ri_prox_update(z_x, z_z, gamma_x, gamma_z, tau):
    """Shrink real parts at tau/gamma and imaginary parts at (1 - tau)/gamma."""
    re_x, re_z = shrink_pair(z_x.real, z_z.real, tau / gamma_x, tau / gamma_z)
    im_x, im_z = shrink_pair(z_x.imag, z_z.imag, (1 - tau) / gamma_x, (1 - tau) / gamma_z)
    return re_x + 1j * im_x, re_z + 1j * im_z
