"""Ring-symmetric collective pulses and the reduced modulation system.

On an equally spaced ring the couplings group into collective orders l (ring
distance), and simultaneous multi-spin pulse classes related by rotation
modulate each order by an integer factor: the sum of the per-member signs.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .sequence import PulseSegment, SynthesisError, compile_sequence, modulation_factor


def collective_order_count(n_spins):
    """Number of distinct coupling orders L on the ring."""
    return n_spins // 2 if n_spins % 2 == 0 else (n_spins - 1) // 2


def couplings_at_order(n_spins, ell):
    """All pairs at ring distance ell, 1-based and sorted."""
    pairs = set()
    for i in range(1, n_spins + 1):
        j = (i + ell - 1) % n_spins + 1
        pairs.add(tuple(sorted((i, j))))
    return sorted(pairs)


def chord_distance(gap, n_spins, nn_distance=1.0):
    """Euclidean chord between ring sites `gap` steps apart, in NN units."""
    return nn_distance * np.sin(np.pi * gap / n_spins) / np.sin(np.pi / n_spins)


@dataclass(frozen=True)
class CollectivePulseClass:
    """Rotation orbit of a flip-set shape on the ring."""

    n_spins: int
    members: tuple  # tuple of sorted flip tuples

    @property
    def multiplicity(self):
        return len(self.members)

    @property
    def spins_per_pulse(self):
        return len(self.members[0]) if self.members else 0

    @property
    def internal_distance(self):
        if self.spins_per_pulse < 2:
            return 0.0
        rep = self.members[0]
        return float(
            sum(
                chord_distance(rep[q + 1] - rep[q], self.n_spins)
                for q in range(len(rep) - 1)
            )
        )

    def modulation_vector(self):
        """Summed sign on a representative coupling of each order l = 1..L."""
        L = collective_order_count(self.n_spins)
        out = np.zeros(L, dtype=np.int64)
        for ell in range(1, L + 1):
            pair = (1, 1 + ell)
            out[ell - 1] = sum(modulation_factor(m, pair) for m in self.members)
        return out

    def label(self):
        if self.spins_per_pulse == 0:
            return "G0"
        rep = self.members[0]
        gaps = ",".join(str(rep[q + 1] - rep[q]) for q in range(len(rep) - 1))
        return f"G{self.spins_per_pulse}({gaps})"


def _orbit(shape, n_spins):
    members = set()
    for r in range(n_spins):
        members.add(tuple(sorted((s - 1 + r) % n_spins + 1 for s in shape)))
    return tuple(sorted(members))


def empty_pulse_class(n_spins):
    return CollectivePulseClass(n_spins, ((),))


def two_spin_class(n_spins, k):
    """G^(k): all two-spin pulses at ring distance k."""
    if not 1 <= k <= n_spins // 2:
        raise SynthesisError("two-spin class distance out of range")
    return CollectivePulseClass(n_spins, _orbit((1, 1 + k), n_spins))


def pulse_catalog(n_spins, max_spins_per_pulse=3):
    """All collective pulse classes with up to `max_spins_per_pulse` spins.

    Classes are rotation orbits of flip-set shapes, listed by spins per pulse
    and then by internal distance; the empty pulse comes first.
    """
    seen = set()
    classes = [empty_pulse_class(n_spins)]
    for m in range(2, max_spins_per_pulse + 1):
        for shape in itertools.combinations(range(1, n_spins + 1), m):
            orbit = _orbit(shape, n_spins)
            if orbit in seen:
                continue
            seen.add(orbit)
            classes.append(CollectivePulseClass(n_spins, orbit))
    classes[1:] = sorted(
        classes[1:], key=lambda c: (c.spins_per_pulse, c.internal_distance, c.members)
    )
    return classes


def table_factor(n_spins, ell, k):
    """Closed-form modulation factor of order-ell coupling under G^(k).

    k = 0 is the empty pulse. On an odd ring every f equals N-4 (ell = k) or
    N-8; on an even ring the last class k = L = N/2 gives N/2 (ell = L) or
    N/2 - 4.
    """
    L = collective_order_count(n_spins)
    if not (1 <= ell <= L) or not (0 <= k <= L):
        raise SynthesisError("order out of range")
    if k == 0:
        return 1
    if n_spins % 2 == 0 and k == L:
        return n_spins // 2 if ell == L else n_spins // 2 - 4
    return n_spins - 4 if ell == k else n_spins - 8


@dataclass(frozen=True)
class CollectiveProblem:
    """Reduced system: coupling rows over classes plus a duration row.

    The duration row holds each class multiplicity N_k (a class segment lasts
    N_k tau_k since its member pulses sandwich their own free evolutions); it
    is bookkeeping for T_c, not part of the least-squares residual.
    """

    matrix: np.ndarray
    classes: tuple
    target: np.ndarray

    @property
    def coupling_rows(self):
        return self.matrix[:-1]

    @property
    def duration_row(self):
        return self.matrix[-1]


def build_collective_problem(classes, g1=1.0):
    classes = tuple(classes)
    if not classes:
        raise SynthesisError("no pulse classes given")
    n_spins = classes[0].n_spins
    L = collective_order_count(n_spins)
    mat = np.zeros((L + 1, len(classes)))
    for c, cls in enumerate(classes):
        mat[:L, c] = cls.modulation_vector()
        mat[L, c] = cls.multiplicity
    target = np.zeros(L + 1)
    target[0] = np.pi / g1
    return CollectiveProblem(matrix=mat, classes=classes, target=target)


def expand_to_segments(classes, taus):
    """Flatten class segments into per-pulse segments (one per member)."""
    segments = []
    for cls, tau in zip(classes, taus):
        for member in cls.members:
            segments.append(PulseSegment(member, float(tau)))
    return segments


def collective_reduction(n_spins, g1=1.0):
    """Two-pulse ring solution: empty pulse plus all NN pair flips.

    Valid for N <= 8 where the empty-pulse weight (8-N) pi / 4 g1 stays
    nonnegative; larger rings need the randomized search. Returns the reduced
    problem over (G^(0), G^(1)), the durations, and the compiled sequence.
    """
    if n_spins < 3:
        raise SynthesisError("ring needs at least three spins")
    if n_spins > 8:
        raise SynthesisError("two-pulse solution needs N <= 8; use the LSS search")
    classes = (empty_pulse_class(n_spins), two_spin_class(n_spins, 1))
    problem = build_collective_problem(classes, g1=g1)
    taus = np.array([(8 - n_spins) * np.pi / (4 * g1), np.pi / (4 * g1)])
    # expand in ring-adjacent order so plain compilation cancels maximally
    segments = [PulseSegment((), taus[0])]
    for i in range(1, n_spins + 1):
        segments.append(PulseSegment(tuple(sorted((i, i % n_spins + 1))), taus[1]))
    compiled = compile_sequence(segments, drop_below=None)
    return problem, taus, compiled
