"""Pulse optimization: multi-start derivative-free search plus box polish.

The search stage minimizes the working-point cost (infidelity plus weighted
propagator-derivative norms); the optional polish stage then pushes the
worst-case infidelity over a declared validation box down with a smooth
p-norm surrogate. Determinism comes from the seed fan-out.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .composite import CompositePulse, error_hamiltonian_stacks
from .fidelity import gate_infidelity
from .shaped import ShapedPulse, selective_composite_unitary
from .vanloan import chain_first_derivative, van_loan_segments


@dataclass(frozen=True)
class CostSpec:
    """Working points and penalty weights for pulse costs.

    Broadband pulses use `working_points` (detunings), per-point weights,
    derivative orders, and the weight base c scaling order-k terms by c^-k.
    Selective pulses use the resonant samples (infidelity to the target),
    detuned samples (infidelity to identity), amplitude-derivative samples,
    and the three region weights.
    """

    working_points: tuple = (-0.25, 0.0, 0.25)
    weights: tuple = None
    derivative_orders: tuple = 1
    derivative_weight_base: float = 10.0
    eps_working_points: tuple = (0.0,)
    rr_samples: tuple = (0.0, 0.02, 0.04, 0.06)
    dr_samples: tuple = tuple(float(k) for k in range(1, 21))
    eps_derivative_samples: tuple = (0.0, 0.04)
    selective_weights: tuple = (1.0, 1.0, 1.0e-4)

    def point_weights(self):
        if self.weights is None:
            return np.ones(len(self.working_points))
        return np.asarray(self.weights, float)

    def orders(self):
        if np.isscalar(self.derivative_orders):
            return [int(self.derivative_orders)] * len(self.working_points)
        return [int(k) for k in self.derivative_orders]


@dataclass
class OptimizeReport:
    cost: float
    met_target: bool
    worst_infidelity: float = np.nan
    n_evaluations: int = 0
    notes: dict = field(default_factory=dict)


def _derivative_penalty(pulse, delta, order, base):
    """Sum_k c^-k || d^k U / d delta^k ||_F at the working point."""
    h0, hd, _, durations = error_hamiltonian_stacks(pulse, delta=delta, eps=0.0)
    if order == 1:
        _, d1 = chain_first_derivative(h0, hd, durations)
        return np.linalg.norm(d1) / base
    _, derivs = van_loan_segments(h0, [hd], durations, order=order)
    return sum(
        np.linalg.norm(derivs[("0",) * k]) / base**k for k in range(1, order + 1)
    )


def broadband_cost(pulse, cost_spec):
    """Working-point cost G for a composite pulse against its own target."""
    target = pulse.target()
    wps = np.asarray(cost_spec.working_points, float)
    eps = np.asarray(cost_spec.eps_working_points, float)
    dmesh, emesh = np.meshgrid(wps, eps, indexing="ij")
    infs = gate_infidelity(pulse.unitary(dmesh, emesh), target)
    weights = cost_spec.point_weights()
    total = float(np.sum(weights[:, None] * infs) / max(len(eps), 1))
    for wp, w, order in zip(wps, weights, cost_spec.orders()):
        if order > 0:
            total += w * _derivative_penalty(pulse, wp, order, cost_spec.derivative_weight_base)
    return total


def _composite_from_vector(x, kind, rabi, global_phase=0.0):
    if kind == "pi":
        return CompositePulse(phases=tuple(x), rabi=rabi, kind=kind, global_phase=global_phase)
    return CompositePulse(
        phases=tuple(x[1:]), rabi=rabi, kind=kind, nutation=float(x[0]), global_phase=global_phase
    )


def _composite_vector(pulse):
    if pulse.kind == "pi":
        return np.asarray(pulse.phases)
    return np.concatenate([[pulse.nutation], pulse.phases])


def _box_infidelities(make_pulse, x, box, coarse=True):
    nd, ne = (21, 9) if coarse else (41, 25)
    dmesh, emesh = np.meshgrid(
        np.linspace(-box["delta_max"], box["delta_max"], nd),
        np.linspace(-box["eps_max"], box["eps_max"], ne),
        indexing="ij",
    )
    pulse = make_pulse(x)
    return gate_infidelity(pulse.unitary(dmesh, emesh), pulse.target()).ravel()


def _box_polish(make_pulse, x0, box, stages=(4, 8, 16, 32), maxiter=3000):
    x = np.asarray(x0, float)
    evals = 0
    for p in stages:

        def cost(v, _p=p):
            infs = _box_infidelities(make_pulse, v, box)
            return float(np.mean(infs**_p) ** (1.0 / _p)) * 1e5

        res = minimize(
            cost, x, method="L-BFGS-B", options={"maxiter": maxiter, "ftol": 1e-16, "gtol": 1e-14}
        )
        x = res.x
        evals += res.nfev
    return x, evals


def optimize_composite(
    target="pi",
    n_phases=10,
    rabi=2 * np.pi * 30e6,
    cost_spec=CostSpec(),
    seeds=8,
    rng_seed=0,
    x0_seeds=(),
    maxiter=4000,
    validation_box=None,
    polish=True,
):
    """Multi-start composite-pulse search; returns (pulse, report).

    Starts Nelder-Mead from `x0_seeds` plus `seeds` random phase vectors and
    keeps the lowest working-point cost. With a `validation_box`
    ({delta_max, eps_max, max_infidelity}) the best candidate is polished
    against the box and the report flags whether the box target was met.
    """
    if n_phases < 2:
        raise ValueError("need at least two phases")
    rng = np.random.default_rng(rng_seed)
    dof = n_phases if target == "pi" else n_phases + 1

    def make(x):
        return _composite_from_vector(x, target, rabi)

    def nm_cost(x):
        return broadband_cost(make(x), cost_spec)

    starts = [np.asarray(s, float) for s in x0_seeds]
    while len(starts) < len(x0_seeds) + seeds:
        x = rng.uniform(-0.5, 1.5, size=dof) * np.pi
        if target == "pi_half":
            x[0] = rng.uniform(0.3, 0.7) * np.pi
        starts.append(x)

    best_x, best_cost, nfev = None, np.inf, 0
    for x0 in starts:
        res = minimize(
            nm_cost,
            x0,
            method="Nelder-Mead",
            options={"maxiter": maxiter, "maxfev": maxiter, "xatol": 1e-12, "fatol": 1e-13, "adaptive": True},
        )
        nfev += res.nfev
        if res.fun < best_cost:
            best_cost, best_x = res.fun, res.x

    worst = np.nan
    met = validation_box is None
    if validation_box is not None:
        if polish:
            best_x, extra = _box_polish(make, best_x, validation_box)
            nfev += extra
        worst = float(_box_infidelities(make, best_x, validation_box, coarse=False).max())
        met = worst < validation_box.get("max_infidelity", 1e-5)
    pulse = make(best_x)
    report = OptimizeReport(cost=float(broadband_cost(pulse, cost_spec)), met_target=met,
                            worst_infidelity=worst, n_evaluations=nfev)
    if not met:
        report.notes["flag"] = "target box not met"
    return pulse, report


def selective_cost(shaped, cost_spec, target_angle=np.pi, n_slices=400):
    """Region cost: DR identity infidelity, RR target infidelity, eps slope."""
    c1, c2, c3 = cost_spec.selective_weights
    sx = np.array([[0, 1], [1, 0]], complex)
    tgt = np.cos(target_angle / 2) * np.eye(2) - 1j * np.sin(target_angle / 2) * sx
    rr = np.asarray(cost_spec.rr_samples, float)
    dr = np.asarray(cost_spec.dr_samples, float)
    u_rr = selective_composite_unitary(shaped, rr, 0.0, n_slices=n_slices)
    u_dr = selective_composite_unitary(shaped, dr, 0.0, n_slices=n_slices)
    cost = c1 * float(np.mean(gate_infidelity(u_dr, np.eye(2))))
    cost += c2 * float(np.mean(gate_infidelity(u_rr, tgt)))
    if c3:
        slopes = []
        for dpt in cost_spec.eps_derivative_samples:
            h0, hd, dt = shaped.hamiltonian_stacks(delta=dpt, eps=0.0, n_slices=n_slices)
            _, d1 = chain_first_derivative(h0, hd, np.full(h0.shape[0], dt))
            slopes.append(np.linalg.norm(d1))
        cost += c3 * float(np.mean(slopes))
    return cost


def optimize_shaped(
    target_angle=np.pi,
    series_lengths=(6, 6),
    template=None,
    cost_spec=CostSpec(),
    seeds=8,
    rng_seed=0,
    x0_seeds=(),
    maxiter=4000,
    validation_box=None,
    polish=True,
    n_slices_search=400,
):
    """Multi-start shaped-pulse search; returns (pulse, report).

    `template` fixes omega0, duration, envelope width, and final slice count;
    the optimizer works on the sine coefficients (a, b). Search runs on a
    reduced slice grid, validation on the template grid.
    """
    if template is None:
        omega0 = 2 * np.pi * 2.28e6
        template = ShapedPulse(
            a=(1.0,), b=(1.0,), omega0=omega0, duration=24 * np.pi / omega0,
            sigma_env=2.4 * np.pi / omega0, n_slices=1500,
        )
    na, nb = series_lengths
    rng = np.random.default_rng(rng_seed)

    def make(x, n_slices=None):
        return ShapedPulse(
            a=tuple(x[:na]), b=tuple(x[na : na + nb]), omega0=template.omega0,
            duration=template.duration, sigma_env=template.sigma_env,
            n_slices=n_slices or template.n_slices,
        )

    def nm_cost(x):
        return selective_cost(make(x), cost_spec, target_angle, n_slices=n_slices_search)

    starts = [np.asarray(s, float) for s in x0_seeds]
    while len(starts) < len(x0_seeds) + seeds:
        starts.append(rng.uniform(-5.0, 5.0, size=na + nb))

    best_x, best_cost, nfev = None, np.inf, 0
    for x0 in starts:
        res = minimize(
            nm_cost,
            x0,
            method="Nelder-Mead",
            options={"maxiter": maxiter, "maxfev": maxiter, "xatol": 1e-12, "fatol": 1e-14, "adaptive": True},
        )
        nfev += res.nfev
        if res.fun < best_cost:
            best_cost, best_x = res.fun, res.x

    sx = np.array([[0, 1], [1, 0]], complex)
    tgt = np.cos(target_angle / 2) * np.eye(2) - 1j * np.sin(target_angle / 2) * sx
    worst = np.nan
    met = validation_box is None
    if validation_box is not None:
        if polish:
            best_x, extra = _shaped_box_polish(
                make, best_x, validation_box, tgt, cost_spec, n_slices_search
            )
            nfev += extra
        pulse = make(best_x)
        dmesh, emesh = np.meshgrid(
            np.linspace(-validation_box["delta_max"], validation_box["delta_max"], 41),
            np.linspace(-validation_box["eps_max"], validation_box["eps_max"], 25),
            indexing="ij",
        )
        worst = float(gate_infidelity(selective_composite_unitary(pulse, dmesh, emesh), tgt).max())
        met = worst < validation_box.get("max_infidelity", 1e-5)
    pulse = make(best_x)
    report = OptimizeReport(
        cost=float(selective_cost(pulse, cost_spec, target_angle, n_slices=n_slices_search)),
        met_target=met, worst_infidelity=worst, n_evaluations=nfev,
    )
    if not met:
        report.notes["flag"] = "target box not met"
    return pulse, report


def _shaped_box_polish(make, x0, box, target, cost_spec, n_slices, stages=(4, 8, 16), maxiter=1500):
    dmesh, emesh = np.meshgrid(
        np.linspace(-box["delta_max"], box["delta_max"], 11),
        np.linspace(-box["eps_max"], box["eps_max"], 5),
        indexing="ij",
    )
    dr = np.asarray(cost_spec.dr_samples, float)
    x = np.asarray(x0, float)
    evals = 0
    for p in stages:

        def cost(v, _p=p):
            pulse = make(v, n_slices=n_slices)
            rr_inf = gate_infidelity(selective_composite_unitary(pulse, dmesh, emesh), target).ravel()
            dr_inf = gate_infidelity(selective_composite_unitary(pulse, dr, 0.0), np.eye(2)).ravel()
            allinf = np.concatenate([rr_inf, dr_inf])
            return float(np.mean(allinf**_p) ** (1.0 / _p)) * 1e5

        res = minimize(cost, x, method="L-BFGS-B",
                       options={"maxiter": maxiter, "ftol": 1e-16, "gtol": 1e-14})
        x = res.x
        evals += res.nfev
    return x, evals
