"""Fluid solves on the periodic grid (spectral steady/unsteady Stokes with
pressure projection) and the single-layer boundary-integral velocity for
steady Stokes flow."""

from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import (InvalidGeometryError, InvalidGridError,
                     NoSteadySolutionError, ParameterError)

# instrumentation for the cost-scaling report
counters = {"fluid_solves": 0, "dense_solves": 0}


def reset_counters():
    counters["fluid_solves"] = 0
    counters["dense_solves"] = 0


@dataclass
class FluidState:
    """Velocity components and pressure on the N x N periodic grid."""

    u: np.ndarray
    v: np.ndarray
    p: np.ndarray

    @classmethod
    def rest(cls, n):
        return cls(np.zeros((n, n)), np.zeros((n, n)), np.zeros((n, n)))

    def copy(self):
        return FluidState(self.u.copy(), self.v.copy(), self.p.copy())

    def max_speed(self):
        return float(np.sqrt(np.max(self.u**2 + self.v**2)))


def grid_wavenumbers(n, length):
    """FFT-ordered wavenumber grids (KX, KY) with the Nyquist mode zeroed
    (odd-symmetry operators) and the full |k|^2 for even symbols."""
    k = spectral.wavenumbers(n, length)
    kd = np.where(spectral.integer_modes(n) == -(n // 2), 0.0, k)
    kx = kd[:, None] * np.ones(n)[None, :]
    ky = np.ones(n)[:, None] * kd[None, :]
    k2_full = (k**2)[:, None] + (k**2)[None, :]
    return kx, ky, k2_full


def leray_project(fu_hat, fv_hat, kx, ky):
    """Remove the gradient part mode by mode; the k = 0 mode passes through."""
    k2 = kx**2 + ky**2
    with np.errstate(invalid="ignore", divide="ignore"):
        dot = np.where(k2 > 0, (kx * fu_hat + ky * fv_hat) / np.where(k2 > 0, k2, 1.0), 0.0)
    return fu_hat - kx * dot, fv_hat - ky * dot


def divergence_inf_norm(fluid, length=1.0):
    """max |D_hx u + D_hy v|, the discrete incompressibility residual."""
    div = spectral.derivative_2d(fluid.u, "x", length) \
        + spectral.derivative_2d(fluid.v, "y", length)
    return float(np.max(np.abs(div)))


def _pressure_from_force(fu_hat, fv_hat, kx, ky):
    k2 = kx**2 + ky**2
    with np.errstate(invalid="ignore", divide="ignore"):
        p_hat = np.where(k2 > 0, -1j * (kx * fu_hat + ky * fv_hat) / np.where(k2 > 0, k2, 1.0), 0.0)
    return p_hat


def unsteady_stokes_step(fluid, force, rho, mu, dt, grid, theta=1.0):
    """One implicit step of the unsteady Stokes equations with a given force.

    theta = 1 is backward Euler in the viscosity (the default scheme);
    theta = 0.5 is the trapezoidal update used by the second-order scheme.
    Per mode k != 0:

        (rho/dt + theta mu |k|^2) u_hat_new = (rho/dt - (1-theta) mu |k|^2) u_hat
                                              + P f_hat

    and the k = 0 mode advances by the mean force alone.
    """
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    n = grid.n
    if fluid.u.shape != (n, n) or force.shape != (n, n, 2):
        raise InvalidGridError("field shapes inconsistent with grid")
    counters["fluid_solves"] += 1
    kx, ky, k2 = grid_wavenumbers(n, grid.length)
    spectral.counters["fft"] += 6
    uh = np.fft.fft2(fluid.u)
    vh = np.fft.fft2(fluid.v)
    fuh = np.fft.fft2(force[..., 0])
    fvh = np.fft.fft2(force[..., 1])
    pu, pv = leray_project(fuh, fvh, kx, ky)
    a = rho / dt + theta * mu * k2
    b = rho / dt - (1.0 - theta) * mu * k2
    un = (b * uh + pu) / a
    vn = (b * vh + pv) / a
    # k = 0: no viscous or pressure action, mean force only
    un[0, 0] = uh[0, 0] + dt / rho * fuh[0, 0]
    vn[0, 0] = vh[0, 0] + dt / rho * fvh[0, 0]
    p_hat = _pressure_from_force(fuh, fvh, kx, ky)
    return FluidState(np.real(np.fft.ifft2(un)),
                      np.real(np.fft.ifft2(vn)),
                      np.real(np.fft.ifft2(p_hat)))


def steady_stokes_grid_solve(force, mu, grid, drop_mean=False):
    """Solve 0 = -grad p + mu lap u + f on the torus.

    A mean force has no steady solution; by default it raises, with
    drop_mean=True the k = 0 force mode is discarded (used inside implicit
    operators whose probe vectors carry an aliasing-level mean).
    """
    n = grid.n
    if force.shape != (n, n, 2):
        raise InvalidGridError("force shape inconsistent with grid")
    counters["fluid_solves"] += 1
    kx, ky, k2 = grid_wavenumbers(n, grid.length)
    spectral.counters["fft"] += 5
    fuh = np.fft.fft2(force[..., 0])
    fvh = np.fft.fft2(force[..., 1])
    mean = np.hypot(abs(fuh[0, 0]), abs(fvh[0, 0])) / n**2
    if not drop_mean:
        scale = max(np.max(np.abs(force)), 1.0)
        if mean > 1e-10 * scale:
            raise NoSteadySolutionError(
                f"mean force {mean:.3e} exceeds tolerance; no steady solution on the torus")
    fuh[0, 0] = 0.0
    fvh[0, 0] = 0.0
    pu, pv = leray_project(fuh, fvh, kx, ky)
    with np.errstate(invalid="ignore", divide="ignore"):
        denom = np.where(k2 > 0, mu * k2, 1.0)
        un = np.where(k2 > 0, pu / denom, 0.0)
        vn = np.where(k2 > 0, pv / denom, 0.0)
    p_hat = _pressure_from_force(fuh, fvh, kx, ky)
    return FluidState(np.real(np.fft.ifft2(un)),
                      np.real(np.fft.ifft2(vn)),
                      np.real(np.fft.ifft2(p_hat)))


def _log_kernel_multiplier(n, interface_length):
    """Multiplier of f -> int -ln((L_b/pi)|sin(pi (a-a')/L_b)|) f da'.

    pi/|kappa| for kappa != 0 and -L_b ln(L_b/2pi) at kappa = 0 (which
    vanishes for the 2*pi parameter domain).
    """
    kappa = spectral.wavenumbers(n, interface_length)
    mult = np.zeros(n)
    nz = kappa != 0
    mult[nz] = np.pi / np.abs(kappa[nz])
    mult[0] = -interface_length * np.log(interface_length / (2.0 * np.pi))
    return mult


def steady_velocity_on_interface(curve, force, mu, s_alpha, theta,
                                 interface_length=2.0 * np.pi):
    """Single-layer Stokes velocity on the curve itself.

    u_i(X(a)) = 1/(4 pi mu) oint [ -ln r d_ij + r_i r_j / r^2 ] F_j da'.

    The log factor is split as -ln(r/sigma) - ln(sigma) with sigma the
    periodized |a - a'|: the first factor is smooth (trapezoid rule, diagonal
    value -ln s_alpha), the second is applied spectrally through its exact
    Fourier coefficients.  The r_i r_j / r^2 terms take the limit tau_i tau_j
    on the diagonal.  Returns per-node (u, v) arrays.
    """
    nb = curve.n_nodes
    x, y = curve.x, curve.y
    f1, f2 = force[:, 0], force[:, 1]
    dal = interface_length * np.arange(nb) / nb
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    r2 = dx**2 + dy**2
    off = ~np.eye(nb, dtype=bool)
    if np.min(r2[off]) <= 0.0:
        raise InvalidGeometryError("coincident distinct interface nodes")
    # periodized parameter distance, ~|a - a'| near the diagonal
    dparam = dal[:, None] - dal[None, :]
    sigma = (interface_length / np.pi) * np.abs(np.sin(np.pi * dparam / interface_length))
    smooth = np.zeros((nb, nb))
    smooth[off] = -0.5 * np.log(r2[off] / sigma[off] ** 2)
    np.fill_diagonal(smooth, -np.log(s_alpha))
    tau1, tau2 = np.cos(theta), np.sin(theta)
    w11 = np.zeros((nb, nb))
    w12 = np.zeros((nb, nb))
    w22 = np.zeros((nb, nb))
    w11[off] = dx[off] ** 2 / r2[off]
    w12[off] = dx[off] * dy[off] / r2[off]
    w22[off] = dy[off] ** 2 / r2[off]
    np.fill_diagonal(w11, tau1 * tau1)
    np.fill_diagonal(w12, tau1 * tau2)
    np.fill_diagonal(w22, tau2 * tau2)
    dalpha = interface_length / nb
    mult = _log_kernel_multiplier(nb, interface_length)
    log_f1 = spectral.apply_symbol_1d(f1, mult, period=interface_length)
    log_f2 = spectral.apply_symbol_1d(f2, mult, period=interface_length)
    u = (smooth @ f1 + w11 @ f1 + w12 @ f2) * dalpha + log_f1
    v = (smooth @ f2 + w12 @ f1 + w22 @ f2) * dalpha + log_f2
    return u / (4.0 * np.pi * mu), v / (4.0 * np.pi * mu)
