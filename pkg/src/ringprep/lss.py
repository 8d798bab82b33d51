"""Randomized least-squares selection of collective-pulse subsets.

For rings too large for the two-pulse solution, subsets of the pulse catalog
are sampled at random, the reduced system is solved in the least-squares
sense, and solutions passing the positivity, residual, and duration filters
are kept, cleaned of negligible segments, and compiled to minimize the pulse
count.
"""

from dataclasses import dataclass

import numpy as np

from .collective import (
    collective_order_count,
    couplings_at_order,
    expand_to_segments,
    pulse_catalog,
)
from .sequence import compile_sequence


@dataclass(frozen=True)
class LSSLimits:
    sigma0: float = 0.1
    T0: float = None
    tau_min: float = None
    max_tries: int = 100_000

    def resolved(self, g1):
        t1 = 2 * np.pi / g1
        return (
            self.sigma0,
            self.T0 if self.T0 is not None else 10.0 * t1,
            self.tau_min if self.tau_min is not None else 1e-5 * t1,
        )


@dataclass(frozen=True)
class LSSCandidate:
    """A surviving pulse-class subset with its durations and compiled form."""

    classes: tuple
    tau: np.ndarray
    residual: float
    total_time: float
    pi_count: int
    sequence: object  # compiled PulseSequence

    @property
    def labels(self):
        return tuple(c.label() for c in self.classes)

    def sort_key(self):
        return (self.pi_count, self.total_time)

    def recomputed_residual(self, g1=1.0):
        """Residual rebuilt from the stored classes and durations."""
        if not self.classes:
            return np.inf
        L = collective_order_count(self.classes[0].n_spins)
        rows = np.array([c.modulation_vector() for c in self.classes], float).T
        target = np.zeros(L)
        target[0] = np.pi / g1
        return float(np.linalg.norm(rows @ self.tau - target) / np.linalg.norm(target))

    def satisfies(self, limits, g1=1.0):
        """Idempotent acceptance check on the stored candidate."""
        sigma0, t_max, _ = limits.resolved(g1)
        return (
            np.all(self.tau >= 0.0)
            and self.recomputed_residual(g1) <= sigma0 + 1e-12
            and self.total_time <= t_max + 1e-12 * t_max
        )


def ideal_preparation_fidelity(n_spins, segments, g_per_order=None, g1=1.0):
    """Ideal-pulse cluster fidelity of a segment list on the ring.

    Pulses are instantaneous, so the protocol unitary is diagonal with pair
    phases theta_p = g_p sum_k f_p(k) tau_k; the fidelity compares against pi
    on every NN pair starting from the all-|+> state.
    """
    L = collective_order_count(n_spins)
    if g_per_order is None:
        g_per_order = [g1] + [0.0] * (L - 1)
    dim = 2**n_spins
    idx = np.arange(dim)
    zvals = [1.0 - 2.0 * ((idx >> (n_spins - i)) & 1) for i in range(1, n_spins + 1)]
    phase = np.zeros(dim)
    target = np.zeros(dim)
    for ell in range(1, L + 1):
        g = g_per_order[ell - 1]
        for (i, j) in couplings_at_order(n_spins, ell):
            zz = zvals[i - 1] * zvals[j - 1]
            theta = g * sum(
                (-1 if len({i, j} & set(seg.flip_set)) % 2 else 1) * seg.tau
                for seg in segments
            )
            phase += theta / 4.0 * zz
            if ell == 1:
                target += np.pi / 4.0 * zz
    amp = np.exp(-1j * (phase - target)).mean()
    return float(abs(amp) ** 2)


def lss_search(
    n_spins,
    catalog=None,
    limits=LSSLimits(),
    g1=1.0,
    seed=0,
    n_choose=None,
    max_candidates=64,
):
    """Randomized subset search over the collective pulse catalog.

    Samples n_choose = L classes uniformly without replacement, keeps
    least-squares solutions with nonnegative durations, relative residual at
    most sigma0, and total duration at most T0, then drops segments shorter
    than tau_min and compiles with greedy reordering. Candidates are
    deduplicated by class subset and sorted by (pi count, duration). An empty
    result is not an error.
    """
    if catalog is None:
        catalog = pulse_catalog(n_spins)
    sigma0, t_max, tau_min = limits.resolved(g1)
    L = collective_order_count(n_spins)
    if n_choose is None:
        n_choose = L
    if n_choose > len(catalog):
        raise ValueError("catalog smaller than the sample size")
    rng = np.random.default_rng(seed)
    mods = np.array([cls.modulation_vector() for cls in catalog], dtype=float).T
    mults = np.array([cls.multiplicity for cls in catalog], dtype=float)
    target = np.zeros(L)
    target[0] = np.pi / g1
    tnorm = np.linalg.norm(target)

    seen = set()
    found = []
    for _ in range(int(limits.max_tries)):
        pick = tuple(sorted(rng.choice(len(catalog), size=n_choose, replace=False)))
        if pick in seen:
            continue
        seen.add(pick)
        sub = mods[:, pick]
        tau, *_ = np.linalg.lstsq(sub, target, rcond=None)
        if np.any(tau < -1e-12 * t_max):
            continue
        tau = np.clip(tau, 0.0, None)
        if np.linalg.norm(sub @ tau - target) / tnorm > sigma0:
            continue
        if float(mults[list(pick)] @ tau) > t_max:
            continue
        keep = tau >= tau_min
        classes = tuple(catalog[pick[q]] for q in range(n_choose) if keep[q])
        tau_kept = tau[keep]
        if not classes:
            continue
        segments = expand_to_segments(classes, tau_kept)
        compiled = compile_sequence(segments, drop_below=None, reorder=True)
        rows = np.array([c.modulation_vector() for c in classes], float).T
        found.append(
            LSSCandidate(
                classes=classes,
                tau=tau_kept,
                residual=float(np.linalg.norm(rows @ tau_kept - target) / tnorm),
                total_time=float(sum(c.multiplicity * t for c, t in zip(classes, tau_kept))),
                pi_count=compiled.pi_count,
                sequence=compiled,
            )
        )
    found.sort(key=LSSCandidate.sort_key)
    return found[:max_candidates]
