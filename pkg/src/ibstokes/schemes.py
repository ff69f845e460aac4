"""Time-stepping schemes for the immersed elastic interface.

Steady flow: explicit, semi-implicit of the first and second kind,
integrating-factor RK4, and the provably energy-non-increasing two-step
scheme.  Unsteady flow: explicit, semi-implicit first/second kind, the
two-step stable scheme, and a midpoint/trapezoidal second-order scheme.

The semi-implicit updates add the implicit leading-order term and subtract
its explicit counterpart, so every scheme is consistent with the same
dynamics; only the stability properties differ.  Implicit leading operators
are diagonal in Fourier space except for the second-kind and two-step
schemes, which assemble (or apply matrix-free) dense N_b x N_b systems.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from . import coupling, spectral, stokes
from .bessel import SsdSymbolParams, ssd_symbol_s, ssd_symbol_second_order, ssd_symbol_t
from .errors import BlowupError, ParameterError, SolverStallError
from .geometry import (InterfaceState, elastic_force, reconstruct_curve,
                       tangent_normal, theta_derivative, update_reference_points)
from .stokes import FluidState, steady_stokes_grid_solve, steady_velocity_on_interface, \
    unsteady_stokes_step

TWO_PI = 2.0 * np.pi

STEADY_SCHEMES = ("explicit_steady", "ssd1_steady", "ssd2_steady",
                  "ifrk4_steady", "stable_steady")
UNSTEADY_SCHEMES = ("explicit_unsteady", "ssd1_unsteady", "ssd2_unsteady",
                    "stable_unsteady", "second_order_unsteady")
ALL_SCHEMES = STEADY_SCHEMES + UNSTEADY_SCHEMES


@dataclass
class SchemeConfig:
    scheme: str
    dt: float
    tol: float = 1e-10            # linear-solve tolerance
    rescale: bool = True          # first-step rescaling of the SSD leading terms
    c_v: float = None             # stored rescaling coefficients (set on step 1)
    c_u: float = None
    steady_velocity: str = "grid"  # "grid" (spread/solve/interpolate) or "integral"
    dense_max: int = 256          # dense assembly of implicit systems up to this N_b
    dealias: bool = False
    blowup_factor: float = 1e6
    drift_tol: float = 1e-2       # reconstruction anchor-mismatch warning level

    def __post_init__(self):
        if self.scheme not in ALL_SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.dt <= 0:
            raise ParameterError("dt must be positive")
        if not (0 < self.tol <= 1e-4):
            raise ParameterError("tol must lie in (0, 1e-4]")
        if self.steady_velocity not in ("grid", "integral"):
            raise ParameterError("steady_velocity must be 'grid' or 'integral'")


@dataclass
class StepState:
    interface: InterfaceState
    curve: object
    fluid: FluidState = None      # absent for steady schemes
    t: float = 0.0
    step: int = 0
    speed_ref: float = None       # blowup-detection reference scale


def _symbol_wavenumbers(iface):
    """Physical wavenumbers 2*pi*m/L_b at which the leading-order symbols
    are evaluated (the convolution analysis lives on the parameter line)."""
    return spectral.wavenumbers(iface.n_nodes, iface.length)


def _fft(x):
    return np.fft.fft(x)


def _ifft_real(xh):
    return np.real(np.fft.ifft(xh))


def _maybe_dealias(cfg, *arrays):
    if not cfg.dealias:
        return arrays
    return tuple(spectral.dealias_23(a) for a in arrays)


def _check_state(step_index, cfg, iface, fluid=None, speed_ref=None):
    if not (np.all(np.isfinite(iface.s_alpha)) and np.all(np.isfinite(iface.phi))
            and np.all(np.isfinite(iface.ref_points))):
        raise BlowupError(step_index, f"non-finite interface state at step {step_index}")
    if np.any(iface.s_alpha <= 0):
        raise BlowupError(step_index, f"arclength derivative collapsed at step {step_index}")
    if fluid is not None:
        if not (np.all(np.isfinite(fluid.u)) and np.all(np.isfinite(fluid.v))):
            raise BlowupError(step_index, f"non-finite velocity field at step {step_index}")
        speed = fluid.max_speed()
        if speed_ref is not None and speed > cfg.blowup_factor * speed_ref:
            raise BlowupError(step_index, f"velocity grew {cfg.blowup_factor:g}x at step {step_index}")


def _grid_uv(fluid):
    return np.stack([fluid.u, fluid.v], axis=-1)


def _project_velocity(uv, tau, nrm):
    """Split interpolated (u, v) node values into normal/tangential parts."""
    u_n = uv[:, 0] * nrm[:, 0] + uv[:, 1] * nrm[:, 1]
    u_t = uv[:, 0] * tau[:, 0] + uv[:, 1] * tau[:, 1]
    return u_n, u_t


def steady_interface_velocity(iface, curve, phys, grid, cfg, force=None):
    """(U, V) = normal/tangential interface velocity of the steady flow.

    Backend "grid": spread the force, solve steady Stokes spectrally,
    interpolate back (this is what reproduces the reported stability
    behavior).  Backend "integral": the free-space single-layer formula.
    """
    if force is None:
        force = elastic_force(iface, phys.elastic)
    tau, nrm = tangent_normal(iface)
    if cfg.steady_velocity == "integral":
        u, v = steady_velocity_on_interface(curve, force, phys.mu, iface.s_alpha,
                                            iface.theta, iface.length)
        uv = np.column_stack([u, v])
    else:
        f_grid = coupling.spread(curve, force, grid)
        fluid = steady_stokes_grid_solve(f_grid, phys.mu, grid, drop_mean=True)
        uv = coupling.interpolate(curve, _grid_uv(fluid), grid)
    return _project_velocity(uv, tau, nrm)


def _rhs_interface(iface, u_n, u_t, s_for_theta=None):
    """(ds/dt, dtheta/dt) with an optional replacement s in the theta denominator."""
    dth = theta_derivative(iface)
    dv = spectral.derivative_1d(u_t, 1, period=iface.length)
    du = spectral.derivative_1d(u_n, 1, period=iface.length)
    s = iface.s_alpha if s_for_theta is None else s_for_theta
    return dv - dth * u_n, (du + u_t * dth) / s


def _finish(state, cfg, s_new, phi_new, refs, fluid=None):
    if np.any(~np.isfinite(s_new)) or np.any(s_new <= 0):
        raise BlowupError(state.step + 1,
                          f"arclength derivative lost positivity at step {state.step + 1}")
    iface = InterfaceState(s_new, phi_new, refs, state.interface.length)
    _check_state(state.step + 1, cfg, iface, fluid, state.speed_ref)
    curve = reconstruct_curve(iface, drift_tol=cfg.drift_tol)
    speed_ref = state.speed_ref
    if fluid is not None and speed_ref is None:
        speed_ref = max(fluid.max_speed(), 1e-12)
    return StepState(iface, curve, fluid, state.t + cfg.dt, state.step + 1, speed_ref)


# ---------------------------------------------------------------------------
# steady schemes
# ---------------------------------------------------------------------------

def step_explicit_steady(state, phys, grid, cfg):
    iface = state.interface
    u_n, u_t = steady_interface_velocity(iface, state.curve, phys, grid, cfg)
    ds, dth = _rhs_interface(iface, u_n, u_t)
    ds, dth = _maybe_dealias(cfg, ds, dth)
    refs = update_reference_points(iface, u_n, u_t, cfg.dt)
    return _finish(state, cfg, iface.s_alpha + cfg.dt * ds, iface.phi + cfg.dt * dth, refs)


def _steady_rates(iface, phys):
    """Hilbert-transform decay rates of the steady leading terms:
    eta = (S_b/4mu)|kappa| for s_alpha and xi = gamma * eta for the angle."""
    kappa = _symbol_wavenumbers(iface)
    eta = phys.elastic / (4.0 * phys.mu) * np.abs(kappa)
    gamma = float(np.max(1.0 - 1.0 / iface.s_alpha))
    return eta, gamma * eta, gamma


def step_ssd1_steady(state, phys, grid, cfg):
    iface = state.interface
    dt = cfg.dt
    u_n, u_t = steady_interface_velocity(iface, state.curve, phys, grid, cfg)
    eta, xi, _ = _steady_rates(iface, phys)
    dth = theta_derivative(iface)
    rhs_s = spectral.derivative_1d(u_t, 1, period=iface.length) - dth * u_n
    (rhs_s,) = _maybe_dealias(cfg, rhs_s)
    s_hat = _fft(iface.s_alpha)
    s_new = _ifft_real((s_hat / dt + _fft(rhs_s) + eta * s_hat) / (1.0 / dt + eta))
    # the angle update divides the explicit terms by the new s_alpha
    rhs_phi = (spectral.derivative_1d(u_n, 1, period=iface.length) + u_t * dth) / s_new
    (rhs_phi,) = _maybe_dealias(cfg, rhs_phi)
    p_hat = _fft(iface.phi)
    phi_new = _ifft_real((p_hat / dt + _fft(rhs_phi) + xi * p_hat) / (1.0 / dt + xi))
    refs = update_reference_points(iface, u_n, u_t, dt)
    return _finish(state, cfg, s_new, phi_new, refs)


def _ifrk4_diagonal(y0, rate, dt, n_func):
    """Integrating-factor RK4 for y' = -rate*y + n(t, y), diagonal rate >= 0.

    ``n_func(stage, y)`` returns the nonlinear part at stages 0, 1, 2, 3
    (times t, t+dt/2, t+dt/2, t+dt).
    """
    e_half = np.exp(-0.5 * dt * rate)
    e_full = e_half * e_half
    k1 = n_func(0, y0)
    y2 = e_half * (y0 + 0.5 * dt * k1)
    k2 = n_func(1, y2)
    y3 = e_half * y0 + 0.5 * dt * k2
    k3 = n_func(2, y3)
    y4 = e_full * y0 + dt * e_half * k3
    k4 = n_func(3, y4)
    return e_full * y0 + dt / 6.0 * (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4)


def step_ifrk4_steady(state, phys, grid, cfg):
    iface = state.interface
    dt = cfg.dt
    nb = iface.n_nodes
    eta, xi, _ = _steady_rates(iface, phys)
    rate = np.concatenate([eta, xi])
    stage_vel = []

    def n_func(stage, y):
        s = _ifft_real(y[:nb])
        phi = _ifft_real(y[nb:])
        if np.any(s <= 0) or not np.all(np.isfinite(s)):
            raise BlowupError(state.step + 1, "stage state degenerate inside RK4")
        stage_if = InterfaceState(s, phi, iface.ref_points, iface.length)
        stage_curve = reconstruct_curve(stage_if, drift_tol=np.inf)
        u_n, u_t = steady_interface_velocity(stage_if, stage_curve, phys, grid, cfg)
        ds, dth = _rhs_interface(stage_if, u_n, u_t)
        ds, dth = _maybe_dealias(cfg, ds, dth)
        # anchor velocities (x, y) at the two reference nodes for this stage
        th = stage_if.theta
        vel = np.empty((2, 2))
        for row, j in enumerate((0, nb // 2)):
            vel[row, 0] = u_t[j] * np.cos(th[j]) - u_n[j] * np.sin(th[j])
            vel[row, 1] = u_t[j] * np.sin(th[j]) + u_n[j] * np.cos(th[j])
        stage_vel.append(vel)
        return np.concatenate([_fft(ds) + eta * y[:nb], _fft(dth) + xi * y[nb:]])

    y0 = np.concatenate([_fft(iface.s_alpha), _fft(iface.phi)])
    y1 = _ifrk4_diagonal(y0, rate, dt, n_func)
    s_new = _ifft_real(y1[:nb])
    phi_new = _ifft_real(y1[nb:])
    # the anchors ride the same RK4 stages (classical weights), keeping the
    # reconstruction at the accuracy of the interface update
    k1, k2, k3, k4 = stage_vel
    refs = iface.ref_points + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _finish(state, cfg, s_new, phi_new, refs)


def _circulant_from_multiplier(mult):
    """Real circulant matrix applying a conjugate-symmetric Fourier multiplier."""
    n = len(mult)
    return np.real(np.fft.ifft(mult[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0))


def _derivative_matrix(n, period):
    kappa = spectral.wavenumbers(n, period)
    mult = 1j * kappa
    mult[n // 2] = 0.0
    return np.real(np.fft.ifft(mult[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0))


def _dense_solve(a, b, step_index):
    stokes.counters["dense_solves"] += 1
    x = np.linalg.solve(a, b)
    resid = np.linalg.norm(a @ x - b)
    if not np.isfinite(resid) or resid > 1e-8 * max(np.linalg.norm(b), 1e-30):
        if np.linalg.cond(a) >= 1e14:
            raise SolverStallError(f"singular implicit system at step {step_index}")
        raise SolverStallError(f"dense solve residual {resid:.2e} at step {step_index}")
    return x


def _log_circulant(nb, length):
    """Circulant of g -> int ln(sigma(a-a')) g da' (periodized ln|a-a'|)."""
    kappa = spectral.wavenumbers(nb, length)
    mult = np.zeros(nb)
    nz = kappa != 0
    mult[nz] = -np.pi / np.abs(kappa[nz])
    mult[0] = length * np.log(length / TWO_PI)
    return _circulant_from_multiplier(mult)


def step_ssd2_steady(state, phys, grid, cfg):
    iface = state.interface
    dt = cfg.dt
    nb = iface.n_nodes
    sb, mu = phys.elastic, phys.mu
    u_n, u_t = steady_interface_velocity(iface, state.curve, phys, grid, cfg)
    dth = theta_derivative(iface)
    eta, xi, _ = _steady_rates(iface, phys)
    lam_abs = _circulant_from_multiplier(eta)         # (S_b/4mu)|kappa|
    log_mat = _log_circulant(nb, iface.length)
    c = sb / (4.0 * np.pi * mu)

    # s system: ds/dt = -(S_b/4mu) H D s - theta_a * U_lead(s) + explicit pair
    # with U_lead(s) = -c * int ln|a-a'| (s-1) theta_a da'
    def t_lead(s):
        return -(lam_abs @ s) + c * dth * (log_mat @ ((s - 1.0) * dth))

    t_lin = -lam_abs + c * (dth[:, None] * log_mat * dth[None, :])
    rhs_expl = spectral.derivative_1d(u_t, 1, period=iface.length) - dth * u_n
    a_s = np.eye(nb) / dt - t_lin
    b_s = iface.s_alpha / dt + rhs_expl - t_lead(iface.s_alpha) + (t_lead(np.zeros(nb)))
    s_new = _dense_solve(a_s, b_s, state.step + 1)

    # angle system: implicit gamma|kappa| part plus implicit transport
    # (V/s^{n+1}) D theta^{n+1}
    xi_mat = _circulant_from_multiplier(xi)
    dmat = _derivative_matrix(nb, iface.length)
    w = u_t / s_new
    a_p = np.eye(nb) / dt + xi_mat - w[:, None] * dmat
    du = spectral.derivative_1d(u_n, 1, period=iface.length)
    b_p = iface.phi / dt + du / s_new + w * (TWO_PI / iface.length) + xi_mat @ iface.phi
    phi_new = _dense_solve(a_p, b_p, state.step + 1)
    refs = update_reference_points(iface, u_n, u_t, dt)
    return _finish(state, cfg, s_new, phi_new, refs)


def _solve_linear(apply_lin, b, nb, cfg, step_index):
    """Solve (I - dt*W)x = b given the affine-free linear map, dense or Krylov."""
    if nb <= cfg.dense_max:
        stokes.counters["dense_solves"] += 1
        a = np.empty((nb, nb))
        eye = np.eye(nb)
        for j in range(nb):
            a[:, j] = apply_lin(eye[:, j])
        x = np.linalg.solve(a, b)
        resid = np.linalg.norm(a @ x - b)
        if not np.isfinite(resid) or resid > max(cfg.tol, 1e-12) * max(np.linalg.norm(b), 1e-30):
            raise SolverStallError(f"implicit solve residual {resid:.2e} at step {step_index}")
        return x
    op = LinearOperator((nb, nb), matvec=apply_lin)
    restart = min(50, nb)
    maxiter = max(1, (10 * nb) // restart)
    x, info = gmres(op, b, rtol=cfg.tol, atol=0.0, restart=restart, maxiter=maxiter)
    if info != 0:
        raise SolverStallError(f"GMRES stalled (info={info}) at step {step_index}")
    return x


def _force_linear_part(s, tau, nrm, dth_n, elastic, length):
    """Elastic force as a function of s_alpha with the angle frozen."""
    ds = spectral.derivative_1d(s, 1, period=length)
    return elastic * (ds[:, None] * tau + (s * dth_n)[:, None] * nrm)


def step_stable_steady(state, phys, grid, cfg):
    iface = state.interface
    dt = cfg.dt
    nb = iface.n_nodes
    tau, nrm = tangent_normal(iface)
    dth = theta_derivative(iface)
    curve = state.curve

    def velocity_of_force(force):
        f_grid = coupling.spread(curve, force, grid)
        fl = steady_stokes_grid_solve(f_grid, phys.mu, grid, drop_mean=True)
        return coupling.interpolate(curve, _grid_uv(fl), grid)

    # Step 1: implicit s_alpha through F(s^{n+1}, theta^n)
    def w_of_force(force):
        uv = velocity_of_force(force)
        u_nc, u_tc = _project_velocity(uv, tau, nrm)
        return spectral.derivative_1d(u_tc, 1, period=iface.length) - dth * u_nc

    def apply_lin_s(s):
        return s - dt * w_of_force(_force_linear_part(s, tau, nrm, dth, phys.elastic, iface.length))

    f_const = -phys.elastic * dth[:, None] * nrm
    b = iface.s_alpha + dt * w_of_force(f_const)
    s_new = _solve_linear(apply_lin_s, b, nb, cfg, state.step + 1)

    # recover the Step-1 velocities at the solution for the reference points
    force_full = _force_linear_part(s_new, tau, nrm, dth, phys.elastic, iface.length) + f_const
    uv1 = velocity_of_force(force_full)
    u_n1, u_t1 = _project_velocity(uv1, tau, nrm)

    # Step 2: implicit angle through F(s^{n+1}, theta^{n+1})
    scale = dt / s_new

    def apply_lin_phi(phi):
        dphi = spectral.derivative_1d(phi, 1, period=iface.length)
        force = phys.elastic * ((s_new - 1.0) * dphi)[:, None] * nrm
        uv = velocity_of_force(force)
        u_nc, u_tc = _project_velocity(uv, tau, nrm)
        return phi - scale * (spectral.derivative_1d(u_nc, 1, period=iface.length) + dth * u_tc)

    ds_new = spectral.derivative_1d(s_new, 1, period=iface.length)
    force0 = phys.elastic * (ds_new[:, None] * tau
                             + ((s_new - 1.0) * (TWO_PI / iface.length))[:, None] * nrm)
    uv0 = velocity_of_force(force0)
    u_n0, u_t0 = _project_velocity(uv0, tau, nrm)
    b_phi = iface.phi + scale * (spectral.derivative_1d(u_n0, 1, period=iface.length)
                                 + dth * u_t0)
    phi_new = _solve_linear(apply_lin_phi, b_phi, nb, cfg, state.step + 1)
    refs = update_reference_points(iface, u_n1, u_t1, dt)
    return _finish(state, cfg, s_new, phi_new, refs)


# ---------------------------------------------------------------------------
# unsteady schemes
# ---------------------------------------------------------------------------

def _interp_split(curve, fluid, grid, tau, nrm):
    uv = coupling.interpolate(curve, _grid_uv(fluid), grid)
    return _project_velocity(uv, tau, nrm)


def step_explicit_unsteady(state, phys, grid, cfg):
    iface = state.interface
    tau, nrm = tangent_normal(iface)
    force = elastic_force(iface, phys.elastic)
    f_grid = coupling.spread(state.curve, force, grid)
    fluid1 = unsteady_stokes_step(state.fluid, f_grid, phys.rho, phys.mu, cfg.dt, grid)
    u_n, u_t = _interp_split(state.curve, fluid1, grid, tau, nrm)
    ds, dth = _rhs_interface(iface, u_n, u_t)
    ds, dth = _maybe_dealias(cfg, ds, dth)
    refs = update_reference_points(iface, u_n, u_t, cfg.dt)
    return _finish(state, cfg, iface.s_alpha + cfg.dt * ds, iface.phi + cfg.dt * dth,
                   refs, fluid1)


def _rescale_coefficient(observed, leading, label):
    denom = float(np.max(np.abs(leading)))
    if denom < 1e-14 * max(1.0, float(np.max(np.abs(observed)))) or denom == 0.0:
        warnings.warn(f"rescaling disabled for {label}: leading term is zero",
                      RuntimeWarning, stacklevel=3)
        return 1.0
    return float(np.max(np.abs(observed))) / denom


def _velocity_level_lead(symbol, kappa, phi, s_min):
    """Leading-order normal velocity implied by an angle-equation symbol.

    The angle equation reads theta_t = (1/s) D U + ..., so a leading term
    symbol(kappa) acting on phi corresponds to the velocity
    u_hat = s_min * symbol(kappa) * phi_hat / (i kappa).
    """
    n = len(kappa)
    out = np.zeros(n, dtype=complex)
    nz = kappa != 0
    out[nz] = s_min * symbol[nz] * _fft(phi)[nz] / (1j * kappa[nz])
    out[n // 2] = 0.0
    return _ifft_real(out)


def compute_rescaling_coefficients(dv_star, u_first, t_of_s0, s_of_phi0):
    """First-step rescaling ratios C_V, C_U of the SSD leading terms.

    C_V compares the observed tangential-velocity derivative with the
    leading-order prediction applied to the initial s_alpha; C_U compares the
    implicit-solve normal velocity with the leading term of the initial
    angle.  A vanishing denominator disables rescaling for that variable
    (coefficient 1) with a warning.
    """
    return (_rescale_coefficient(dv_star, t_of_s0, "C_V"),
            _rescale_coefficient(u_first, s_of_phi0, "C_U"))


def _ssd_star_solve(state, phys, grid, cfg):
    """Shared first stage of the unsteady SSD schemes: the explicit-force
    fluid solve, its interface velocities, and the symbol parameters."""
    iface = state.interface
    tau, nrm = tangent_normal(iface)
    force = elastic_force(iface, phys.elastic)
    f_grid = coupling.spread(state.curve, force, grid)
    fluid_star = unsteady_stokes_step(state.fluid, f_grid, phys.rho, phys.mu, cfg.dt, grid)
    u_n_star, u_t_star = _interp_split(state.curve, fluid_star, grid, tau, nrm)
    p = SsdSymbolParams.from_state(iface.s_alpha, phys.elastic, phys.mu, phys.rho, cfg.dt)
    kappa = _symbol_wavenumbers(iface)
    return tau, nrm, u_n_star, u_t_star, p, kappa


def step_ssd1_unsteady(state, phys, grid, cfg):
    iface = state.interface
    dt = cfg.dt
    tau, nrm, u_n_star, u_t_star, p, kappa = _ssd_star_solve(state, phys, grid, cfg)
    t_hat = ssd_symbol_t(kappa, p)
    s_hat_sym = ssd_symbol_s(kappa, p)
    dth = theta_derivative(iface)
    dv_star = spectral.derivative_1d(u_t_star, 1, period=iface.length)
    rhs_s = dv_star - dth * u_n_star
    (rhs_s,) = _maybe_dealias(cfg, rhs_s)

    if cfg.c_v is None:
        if cfg.rescale:
            t_of_s0 = _ifft_real(t_hat * _fft(iface.s_alpha))
            cfg.c_v = _rescale_coefficient(dv_star, t_of_s0, "C_V")
        else:
            cfg.c_v = 1.0
    s_hat = _fft(iface.s_alpha)
    s_new = _ifft_real((s_hat / dt + _fft(rhs_s) - cfg.c_v * t_hat * s_hat)
                       / (1.0 / dt - cfg.c_v * t_hat))

    force1 = _force_linear_part(s_new, tau, nrm, dth, phys.elastic, iface.length) \
        - phys.elastic * dth[:, None] * nrm
    fluid1 = unsteady_stokes_step(state.fluid, coupling.spread(state.curve, force1, grid),
                                  phys.rho, phys.mu, dt, grid)
    u_n1, u_t1 = _interp_split(state.curve, fluid1, grid, tau, nrm)

    if cfg.c_u is None:
        if cfg.rescale:
            s_u = _velocity_level_lead(s_hat_sym, kappa, iface.phi, p.s_min)
            cfg.c_u = _rescale_coefficient(u_n1, s_u, "C_U")
        else:
            cfg.c_u = 1.0
    rhs_phi = (spectral.derivative_1d(u_n1, 1, period=iface.length) + u_t1 * dth) / s_new
    (rhs_phi,) = _maybe_dealias(cfg, rhs_phi)
    # the leading angle operator is S/min(s); the explicit counterpart must
    # carry the same factor or the homogeneous high-k multiplier becomes
    # min(s) != 1 and the update amplifies node-scale modes
    s_min_new = float(np.min(s_new))
    lead = cfg.c_u * s_hat_sym / s_min_new
    p_hat = _fft(iface.phi)
    phi_new = _ifft_real((p_hat / dt + _fft(rhs_phi) - lead * p_hat) / (1.0 / dt - lead))
    refs = update_reference_points(iface, u_n1, u_t1, dt)
    return _finish(state, cfg, s_new, phi_new, refs, fluid1)


def step_ssd2_unsteady(state, phys, grid, cfg):
    iface = state.interface
    dt = cfg.dt
    nb = iface.n_nodes
    tau, nrm, u_n_star, u_t_star, p, kappa = _ssd_star_solve(state, phys, grid, cfg)
    t_hat = ssd_symbol_t(kappa, p)
    s_hat_sym = ssd_symbol_s(kappa, p)
    dth = theta_derivative(iface)
    beta = p.lam * p.s_min

    # dense correction: convolution with the smooth kernel K0(beta|d|) + ln|d|
    # (the log singularities cancel; this is the combination appearing in the
    # second fundamental solution) acting on D^2((s-1) theta_a)
    mult = np.zeros(nb)
    nz = kappa != 0
    mult[nz] = np.pi / np.sqrt(beta**2 + kappa[nz] ** 2) - np.pi / np.abs(kappa[nz])
    mult[0] = np.pi / beta + iface.length * np.log(iface.length / TWO_PI)
    kernel = _circulant_from_multiplier(mult)
    d2 = _circulant_from_multiplier(-kappa**2)
    t_mat = _circulant_from_multiplier(t_hat)
    pref = -(phys.elastic * dt) / (2.0 * np.pi)
    coef = dth / iface.s_alpha**2

    def t2_lead(s):
        return t_mat @ s + pref * coef * (kernel @ (d2 @ ((s - 1.0) * dth)))

    t2_lin = t_mat + pref * (coef[:, None] * (kernel @ (d2 * dth[None, :])))
    dv_star = spectral.derivative_1d(u_t_star, 1, period=iface.length)
    if cfg.c_v is None:
        cfg.c_v = _rescale_coefficient(dv_star, t2_lead(iface.s_alpha), "C_V") \
            if cfg.rescale else 1.0
    rhs_s = dv_star - dth * u_n_star
    a_s = np.eye(nb) / dt - cfg.c_v * t2_lin
    b_s = iface.s_alpha / dt + rhs_s - cfg.c_v * (t2_lead(iface.s_alpha) - t2_lead(np.zeros(nb)))
    s_new = _dense_solve(a_s, b_s, state.step + 1)

    force1 = _force_linear_part(s_new, tau, nrm, dth, phys.elastic, iface.length) \
        - phys.elastic * dth[:, None] * nrm
    fluid1 = unsteady_stokes_step(state.fluid, coupling.spread(state.curve, force1, grid),
                                  phys.rho, phys.mu, dt, grid)
    u_n1, u_t1 = _interp_split(state.curve, fluid1, grid, tau, nrm)

    if cfg.c_u is None:
        if cfg.rescale:
            s_u = _velocity_level_lead(s_hat_sym, kappa, iface.phi, p.s_min)
            cfg.c_u = _rescale_coefficient(u_n1, s_u, "C_U")
        else:
            cfg.c_u = 1.0
    # angle system: diagonal leading term plus implicit transport (V/s) D theta
    s_min_new = float(np.min(s_new))
    s_mat = _circulant_from_multiplier(cfg.c_u * s_hat_sym / s_min_new)
    dmat = _derivative_matrix(nb, iface.length)
    w = u_t1 / s_new
    a_p = np.eye(nb) / dt - s_mat - w[:, None] * dmat
    du1 = spectral.derivative_1d(u_n1, 1, period=iface.length)
    b_p = iface.phi / dt + du1 / s_new + w * (TWO_PI / iface.length) \
        - s_mat @ iface.phi
    phi_new = _dense_solve(a_p, b_p, state.step + 1)
    refs = update_reference_points(iface, u_n1, u_t1, dt)
    return _finish(state, cfg, s_new, phi_new, refs, fluid1)


def step_stable_unsteady(state, phys, grid, cfg):
    iface = state.interface
    dt = cfg.dt
    nb = iface.n_nodes
    tau, nrm = tangent_normal(iface)
    dth = theta_derivative(iface)
    curve = state.curve

    def solve_force_only(force):
        """Velocity response to a force with zero initial field (linear part)."""
        zero = FluidState.rest(grid.n)
        fl = unsteady_stokes_step(zero, coupling.spread(curve, force, grid),
                                  phys.rho, phys.mu, dt, grid)
        return coupling.interpolate(curve, _grid_uv(fl), grid)

    fluid_hom = unsteady_stokes_step(state.fluid, np.zeros((grid.n, grid.n, 2)),
                                     phys.rho, phys.mu, dt, grid)
    uv_hom = coupling.interpolate(curve, _grid_uv(fluid_hom), grid)

    def w_of_uv(uv):
        u_nc, u_tc = _project_velocity(uv, tau, nrm)
        return spectral.derivative_1d(u_tc, 1, period=iface.length) - dth * u_nc

    def apply_lin_s(s):
        force = _force_linear_part(s, tau, nrm, dth, phys.elastic, iface.length)
        return s - dt * w_of_uv(solve_force_only(force))

    f_const = -phys.elastic * dth[:, None] * nrm
    b = iface.s_alpha + dt * w_of_uv(uv_hom + solve_force_only(f_const))
    s_new = _solve_linear(apply_lin_s, b, nb, cfg, state.step + 1)

    force_full = _force_linear_part(s_new, tau, nrm, dth, phys.elastic, iface.length) + f_const
    fluid1 = unsteady_stokes_step(state.fluid, coupling.spread(curve, force_full, grid),
                                  phys.rho, phys.mu, dt, grid)
    u_n1, u_t1 = _interp_split(curve, fluid1, grid, tau, nrm)

    scale = dt / s_new

    def apply_lin_phi(phi):
        dphi = spectral.derivative_1d(phi, 1, period=iface.length)
        force = phys.elastic * ((s_new - 1.0) * dphi)[:, None] * nrm
        uv = solve_force_only(force)
        u_nc, u_tc = _project_velocity(uv, tau, nrm)
        return phi - scale * (spectral.derivative_1d(u_nc, 1, period=iface.length) + dth * u_tc)

    ds_new = spectral.derivative_1d(s_new, 1, period=iface.length)
    force0 = phys.elastic * (ds_new[:, None] * tau
                             + ((s_new - 1.0) * (TWO_PI / iface.length))[:, None] * nrm)
    uv0 = uv_hom + solve_force_only(force0)
    u_n0, u_t0 = _project_velocity(uv0, tau, nrm)
    b_phi = iface.phi + scale * (spectral.derivative_1d(u_n0, 1, period=iface.length)
                                 + dth * u_t0)
    phi_new = _solve_linear(apply_lin_phi, b_phi, nb, cfg, state.step + 1)
    refs = update_reference_points(iface, u_n1, u_t1, dt)
    return _finish(state, cfg, s_new, phi_new, refs, fluid1)


def step_second_order_unsteady(state, phys, grid, cfg):
    """Midpoint/trapezoidal scheme: a half step of the first-order method
    provides the midpoint state; the full step then advances through
    midpoint unknowns with the second-order leading symbols."""
    iface = state.interface
    dt = cfg.dt

    # fractional step to t + dt/2 with the first-order scheme; the midpoint
    # scheme runs unrescaled (the first-step rescaling heuristic under-damps
    # it and is unnecessary at second-order accuracy)
    half_cfg = SchemeConfig(scheme="ssd1_unsteady", dt=0.5 * dt, tol=cfg.tol,
                            rescale=False, c_v=1.0, c_u=1.0,
                            dealias=cfg.dealias, blowup_factor=cfg.blowup_factor,
                            drift_tol=cfg.drift_tol)
    half = step_ssd1_unsteady(state, phys, grid, half_cfg)
    cfg.c_v, cfg.c_u = 1.0, 1.0
    iface_h = half.interface
    curve_h = half.curve
    tau_h, nrm_h = tangent_normal(iface_h)
    dth_h = theta_derivative(iface_h)

    lam_bar = np.sqrt(2.0 * phys.rho / (phys.mu * dt))
    p2 = SsdSymbolParams(elastic=phys.elastic, mu=phys.mu, rho=phys.rho, dt=dt,
                         lam=lam_bar, s_min=float(np.min(iface_h.s_alpha)),
                         s_max_excess=float(np.max(iface_h.s_alpha - 1.0)),
                         gamma=float(np.max(1.0 - 1.0 / iface_h.s_alpha)))
    kappa = _symbol_wavenumbers(iface)
    t2_hat, s2_hat = ssd_symbol_second_order(kappa, p2)
    t2_hat = cfg.c_v * t2_hat
    s2_hat = cfg.c_u * s2_hat

    # trapezoidal explicit-force solve anchored at the midpoint curve
    force_h = elastic_force(iface_h, phys.elastic)
    fluid_star = unsteady_stokes_step(state.fluid, coupling.spread(curve_h, force_h, grid),
                                      phys.rho, phys.mu, dt, grid, theta=0.5)
    uv_bar_star = 0.5 * (_grid_uv(fluid_star) + _grid_uv(state.fluid))
    uvs = coupling.interpolate(curve_h, uv_bar_star, grid)
    u_n_star, u_t_star = _project_velocity(uvs, tau_h, nrm_h)

    rhs_s = spectral.derivative_1d(u_t_star, 1, period=iface.length) - dth_h * u_n_star
    (rhs_s,) = _maybe_dealias(cfg, rhs_s)
    s_hat = _fft(iface.s_alpha)
    sh_hat = _fft(iface_h.s_alpha)
    s_new = _ifft_real((s_hat * (1.0 / dt + 0.5 * t2_hat) + _fft(rhs_s) - t2_hat * sh_hat)
                       / (1.0 / dt - 0.5 * t2_hat))

    s_bar = 0.5 * (s_new + iface.s_alpha)
    force_bar = _force_linear_part(s_bar, tau_h, nrm_h, dth_h, phys.elastic, iface.length) \
        - phys.elastic * dth_h[:, None] * nrm_h
    fluid1 = unsteady_stokes_step(state.fluid, coupling.spread(curve_h, force_bar, grid),
                                  phys.rho, phys.mu, dt, grid, theta=0.5)
    uv_bar = 0.5 * (_grid_uv(fluid1) + _grid_uv(state.fluid))
    uvb = coupling.interpolate(curve_h, uv_bar, grid)
    u_n_bar, u_t_bar = _project_velocity(uvb, tau_h, nrm_h)

    # the angle leading operator carries 1/min(s) on both the implicit
    # midpoint term and its explicit counterpart so the pair cancels to
    # O(dt^3); a pointwise 1/s on one side only would degrade the order
    s_min_h = float(np.min(iface_h.s_alpha))
    lead = s2_hat / s_min_h
    s_lead_h = _ifft_real(lead * _fft(iface_h.phi))
    rhs_phi = (spectral.derivative_1d(u_n_bar, 1, period=iface.length)
               + u_t_bar * dth_h) / iface_h.s_alpha - s_lead_h
    (rhs_phi,) = _maybe_dealias(cfg, rhs_phi)
    p_hat = _fft(iface.phi)
    phi_new = _ifft_real((p_hat * (1.0 / dt + 0.5 * lead) + _fft(rhs_phi))
                         / (1.0 / dt - 0.5 * lead))

    # midpoint predictor for the anchors, velocities from the centered field
    refs = update_reference_points(iface_h, u_n_bar, u_t_bar, dt)
    refs = iface.ref_points + (refs - iface_h.ref_points)
    return _finish(state, cfg, s_new, phi_new, refs, fluid1)


_STEPPERS = {
    "explicit_steady": step_explicit_steady,
    "ssd1_steady": step_ssd1_steady,
    "ssd2_steady": step_ssd2_steady,
    "ifrk4_steady": step_ifrk4_steady,
    "stable_steady": step_stable_steady,
    "explicit_unsteady": step_explicit_unsteady,
    "ssd1_unsteady": step_ssd1_unsteady,
    "ssd2_unsteady": step_ssd2_unsteady,
    "stable_unsteady": step_stable_unsteady,
    "second_order_unsteady": step_second_order_unsteady,
}


def step(state, phys, grid, cfg):
    """Advance one step with the configured scheme."""
    return _STEPPERS[cfg.scheme](state, phys, grid, cfg)


def initial_state(phys, grid, a=0.32, b=0.24, center=(0.5, 0.5)):
    """Ellipse interface (rest radius from phys.interface_length) in a fluid
    at rest; steady schemes ignore the fluid field."""
    from .geometry import init_ellipse

    rest_radius = phys.interface_length / TWO_PI
    state, curve = init_ellipse(a, b, center, grid.n_boundary, rest_radius=rest_radius)
    return StepState(state, curve, FluidState.rest(grid.n), 0.0, 0, None)


def simulate(state, phys, grid, cfg, n_steps):
    """Yield successive StepStates; blowups propagate as BlowupError."""
    for _ in range(n_steps):
        state = step(state, phys, grid, cfg)
        yield state
