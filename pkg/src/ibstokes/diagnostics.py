"""Energy, area and stability instrumentation plus the temporal
convergence-study harness."""

from dataclasses import dataclass

import numpy as np

from .coupling import inner_product_gamma, inner_product_omega
from .errors import BlowupError, SolverStallError
from .geometry import enclosed_area
from .schemes import step


def kinetic_energy(fluid, rho, h):
    """K = (rho/2) <u, u> on the grid; zero when there is no fluid state."""
    if fluid is None:
        return 0.0
    return 0.5 * rho * (inner_product_omega(fluid.u, fluid.u, h)
                        + inner_product_omega(fluid.v, fluid.v, h))


def potential_energy(s_alpha, elastic, dalpha):
    """P = (S_b/2) sum (s_alpha - 1)^2 dalpha."""
    dev = np.asarray(s_alpha) - 1.0
    return 0.5 * elastic * inner_product_gamma(dev, dev, dalpha)


@dataclass
class DiagnosticsRecord:
    step: int
    t: float
    kinetic: float
    potential: float
    total: float
    area: float
    max_u: float
    min_salpha: float
    max_salpha: float
    stable: bool = True

    CSV_HEADER = "step,t,K,P,E,area,max_u,min_salpha,max_salpha,stable"

    def csv_row(self):
        nums = (self.t, self.kinetic, self.potential, self.total, self.area,
                self.max_u, self.min_salpha, self.max_salpha)
        return f"{self.step}," + ",".join(format(v, ".17g") for v in nums) \
            + f",{int(self.stable)}"


def record_state(state, phys, grid, stable=True):
    k = kinetic_energy(state.fluid, phys.rho, grid.h)
    p = potential_energy(state.interface.s_alpha, phys.elastic, state.interface.dalpha)
    max_u = state.fluid.max_speed() if state.fluid is not None else 0.0
    return DiagnosticsRecord(
        step=state.step, t=state.t, kinetic=k, potential=p, total=k + p,
        area=enclosed_area(state.curve), max_u=max_u,
        min_salpha=float(np.min(state.interface.s_alpha)),
        max_salpha=float(np.max(state.interface.s_alpha)),
        stable=stable)


def _curve_in_box(curve, length):
    lo, hi = -length, 2.0 * length
    return bool(np.all((curve.x >= lo) & (curve.x <= hi)
                       & (curve.y >= lo) & (curve.y <= hi)))


def stability_probe(state, phys, grid, cfg, n_steps):
    """Run the scheme and classify the trajectory.

    Unstable iff the total energy ever exceeds 10x its initial value, any
    field goes non-finite, or the curve leaves the wrapped domain box by more
    than one domain length.  Returns (verdict, records, final_state) where
    final_state is None after a detected failure.
    """
    records = [record_state(state, phys, grid)]
    e0 = records[0].total
    for _ in range(n_steps):
        try:
            state = step(state, phys, grid, cfg)
        except (BlowupError, SolverStallError):
            records.append(DiagnosticsRecord(records[-1].step + 1, np.nan, np.nan,
                                             np.nan, np.nan, np.nan, np.nan,
                                             np.nan, np.nan, stable=False))
            return "unstable", records, None
        rec = record_state(state, phys, grid)
        if (not np.isfinite(rec.total)) or rec.total > 10.0 * e0 \
                or not _curve_in_box(state.curve, grid.length):
            rec.stable = False
            records.append(rec)
            return "unstable", records, state
        records.append(rec)
    return "stable", records, state


def curve_l2_norm(values, dalpha):
    """Interface l2 norm of (N, 2) samples with dalpha weights."""
    return float(np.sqrt(np.sum(values**2) * dalpha))


def grid_l2_norm(field, h):
    """Grid l2 norm of stacked (N, N, c) components with h^2 weights."""
    return float(np.sqrt(np.sum(field**2) * h * h))


def fit_rate(dts, errors):
    """Least-squares slope of log(error) vs log(dt), plus per-pair ratios."""
    dts = np.asarray(dts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    logd, loge = np.log(dts), np.log(errors)
    slope = np.polyfit(logd, loge, 1)[0]
    pair_rates = np.log2(errors[:-1] / errors[1:]).tolist()
    return float(slope), pair_rates


def run_convergence_study(run_fn, dt_list):
    """Successive-refinement temporal errors e(dt) = ||q(T; dt) - q(T; dt/2)||.

    run_fn(dt) returns a dict mapping observable name to (values, weight)
    where the norm is sqrt(sum(values^2) * weight).  dt_list must be a
    halving chain; one extra run at dt_list[-1]/2 provides the last pair.
    Returns {observable: {"dts", "errors", "rate", "pair_rates"}}.
    """
    dt_list = list(dt_list)
    for a, b in zip(dt_list[:-1], dt_list[1:]):
        if abs(a / b - 2.0) > 1e-12:
            raise ValueError("dt list must halve at each entry")
    all_dts = dt_list + [dt_list[-1] / 2.0]
    solutions = [run_fn(dt) for dt in all_dts]
    names = solutions[0].keys()
    out = {}
    for name in names:
        errs = []
        for sol, finer in zip(solutions[:-1], solutions[1:]):
            vals, w = sol[name]
            vals_f, _ = finer[name]
            errs.append(float(np.sqrt(np.sum((vals - vals_f) ** 2) * w)))
        rate, pair_rates = fit_rate(dt_list, errs)
        out[name] = {"dts": dt_list, "errors": errs, "rate": rate,
                     "pair_rates": pair_rates}
    return out
