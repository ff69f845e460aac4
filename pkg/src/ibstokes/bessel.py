"""Modified Bessel functions K0/K1/K2, the unsteady fundamental-solution
tensor, and the Fourier symbols of the implicit leading-order operators."""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, SingularPointError

# beyond this argument K_n underflows in double precision
_UNDERFLOW_X = 700.0


def bessel_k(order, x):
    """K_order(x) for order 0, 1 or 2 and x > 0.

    Relative error <= 1e-10 on [1e-6, 700]; underflows to 0 beyond.
    """
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("K_n diverges at 0 and is not defined for x <= 0")
    if order == 0:
        out = special.k0(x)
    elif order == 1:
        out = special.k1(x)
    else:
        # upward recurrence K2 = K0 + 2 K1 / x
        out = special.k0(x) + 2.0 * special.k1(x) / x
    out = np.where(x > _UNDERFLOW_X, 0.0, out)
    return float(out) if out.ndim == 0 else out


def k0_convolution_symbol(beta, k):
    """Fourier multiplier 1/sqrt(beta^2 + k^2) of f -> (1/pi) int K0(beta|a-a'|) f da'."""
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    k = np.asarray(k, dtype=float)
    out = 1.0 / np.sqrt(beta * beta + k * k)
    return float(out) if out.ndim == 0 else out


def unsteady_kernel_g(r, lam):
    """2x2 tensor of the time-discrete unsteady Stokes fundamental solution.

    G_ij = d_ij/|r|^2 - 2 r_i r_j/|r|^4
           + (lam^2/2)(K0 + K2)(lam|r|) r_i r_j/|r|^2
           - lam K1(lam|r|) (d_ij/|r| - r_i r_j/|r|^3)

    For lam|r| > 700 the Bessel terms have underflowed and only the
    Stokeslet-like part remains.
    """
    r = np.asarray(r, dtype=float)
    rr = float(np.hypot(r[0], r[1]))
    if rr == 0.0:
        raise SingularPointError("kernel evaluated at zero separation")
    if lam <= 0:
        raise DomainError(f"lam must be positive, got {lam}")
    eye = np.eye(2)
    outer = np.outer(r, r)
    g = eye / rr**2 - 2.0 * outer / rr**4
    x = lam * rr
    if x <= _UNDERFLOW_X:
        k0 = bessel_k(0, x)
        k1 = bessel_k(1, x)
        k2 = bessel_k(2, x)
        g += 0.5 * lam**2 * (k0 + k2) * outer / rr**2
        g -= lam * k1 * (eye / rr - outer / rr**3)
    return g


@dataclass
class SsdSymbolParams:
    """Per-step inputs of the implicit leading-order symbols.

    lam is 1/sqrt(mu*dt/rho); s_min = min_a s_a; s_max_excess = max_a(s_a - 1);
    gamma = max_a(1 - 1/s_a).  The integrator recomputes these each step from
    the previous state.
    """

    elastic: float
    mu: float
    rho: float
    dt: float
    lam: float
    s_min: float
    s_max_excess: float
    gamma: float

    def __post_init__(self):
        if not (self.lam > 0 and self.s_min > 0):
            raise DomainError("need lam > 0 and s_min > 0")
        if not (self.gamma < 1):
            raise DomainError("gamma = max(1 - 1/s_a) must be < 1")
        for name in ("elastic", "mu", "rho", "dt", "lam", "s_min", "s_max_excess", "gamma"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} is not finite")

    @classmethod
    def from_state(cls, s_alpha, elastic, mu, rho, dt):
        lam = 1.0 / np.sqrt(mu * dt / rho)
        s_min = float(np.min(s_alpha))
        return cls(elastic=elastic, mu=mu, rho=rho, dt=dt, lam=lam,
                   s_min=s_min,
                   s_max_excess=float(np.max(s_alpha - 1.0)),
                   gamma=float(np.max(1.0 - 1.0 / s_alpha)))


def _bracket_t(k, beta):
    # ((beta k)^2 ... ) written to avoid overflow at large |k|
    k = np.abs(np.asarray(k, dtype=float))
    return (beta**2 * k**2 + k**4) / np.sqrt(beta**2 + k**2) - k**3


def _bracket_s(k, beta):
    k = np.abs(np.asarray(k, dtype=float))
    return k**3 - k**4 / np.sqrt(beta**2 + k**2)


def ssd_symbol_t(k, p):
    """Leading-order multiplier of the implicit s_alpha update (first order).

    Nonpositive for all k; 0 at k = 0.
    """
    beta = p.lam * p.s_min
    out = -(p.elastic * p.dt) / (2.0 * p.rho * p.s_min**2) * _bracket_t(k, beta)
    return float(out) if np.ndim(out) == 0 else out


def ssd_symbol_s(k, p):
    """Leading-order multiplier of the implicit tangent-angle update (first order).

    Sign matches -sgn(s_max_excess); 0 at k = 0.
    """
    beta = p.lam * p.s_min
    out = -(p.elastic * p.dt * p.s_max_excess) / (2.0 * p.rho * p.s_min**2) \
        * _bracket_s(k, beta)
    return float(out) if np.ndim(out) == 0 else out


def ssd_symbol_second_order(k, p):
    """Midpoint-rule leading-order multipliers (T, S) of the second-order scheme.

    Call with p built from lam_bar = sqrt(2 rho / (mu dt)) and the half-step
    state.  The S prefactor carries s_min^3 (vs s_min^2 at first order).
    """
    beta = p.lam * p.s_min
    t = -(p.elastic * p.dt) / (4.0 * p.rho * p.s_min**2) * _bracket_t(k, beta)
    s = -(p.elastic * p.dt * p.s_max_excess) / (4.0 * p.rho * p.s_min**3) \
        * _bracket_s(k, beta)
    if np.ndim(t) == 0:
        return float(t), float(s)
    return t, s
