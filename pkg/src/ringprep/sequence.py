"""Decoupling-sequence synthesis: factor matrices, exact solves, compilation.

A sequence is a list of flip sets (1-based spin tuples). Segment k applies
pi pulses on its flip set, evolves freely for tau_k, then applies the inverse
pulses; the modulation factor of coupling (i, j) in that segment is
(-1)^|{i,j} n flip set|. Stacking one row per coupling plus an all-ones
duration row yields the linear system M tau = alpha.
"""

from dataclasses import dataclass, field

import numpy as np


class SynthesisError(ValueError):
    pass


def modulation_factor(flip_set, pair):
    """Sign picked up by coupling `pair` in a segment flipping `flip_set`."""
    i, j = pair
    if i == j:
        raise SynthesisError("coupling needs two distinct spins")
    return -1 if len({i, j} & set(flip_set)) % 2 else 1


def default_coupling_order(n_spins):
    """Ring-style order: all pairs grouped by ring distance, then by index."""
    pairs = []
    for ell in range(1, n_spins // 2 + 1):
        for i in range(1, n_spins + 1):
            j = i + ell
            if j <= n_spins:
                pair = (i, j)
            else:
                pair = (j - n_spins, i)
            if pair not in pairs and min(ell, n_spins - ell) == ell:
                pairs.append(pair)
    # fall back to plain lexicographic for anything not reached (non-ring N)
    for i in range(1, n_spins + 1):
        for j in range(i + 1, n_spins + 1):
            if (i, j) not in pairs:
                pairs.append((i, j))
    return pairs


@dataclass(frozen=True)
class SynthesisProblem:
    """Factor matrix with its row layout: coupling rows then the duration row."""

    matrix: np.ndarray
    coupling_order: tuple
    sequence: tuple

    @property
    def n_couplings(self):
        return len(self.coupling_order)


def build_factor_matrix(sequence_indices, n_spins, coupling_order=None):
    """(n_g+1) x m integer matrix of modulation factors plus an all-ones row."""
    sequence = tuple(tuple(sorted(f)) for f in sequence_indices)
    for f in sequence:
        if any(not (1 <= s <= n_spins) for s in f):
            raise SynthesisError(f"flip index out of range in {f}")
        if len(set(f)) != len(f):
            raise SynthesisError(f"repeated index in flip set {f}")
    if coupling_order is None:
        coupling_order = default_coupling_order(n_spins)
    coupling_order = tuple(tuple(p) for p in coupling_order)
    m = len(sequence)
    mat = np.ones((len(coupling_order) + 1, m), dtype=np.int64)
    for r, pair in enumerate(coupling_order):
        for c, flip in enumerate(sequence):
            mat[r, c] = modulation_factor(flip, pair)
    return SynthesisProblem(matrix=mat, coupling_order=coupling_order, sequence=sequence)


def solve_exact(problem, alpha, negative_tol_scale=1e-12):
    """Solve M tau = alpha for a square factor matrix.

    Components below -tol (tol = negative_tol_scale * T_c) mark the target as
    infeasible for this sequence; tiny negatives are clamped to zero.
    """
    mat = np.asarray(problem.matrix, float)
    alpha = np.asarray(alpha, float)
    if mat.shape[0] != mat.shape[1]:
        raise SynthesisError("solve_exact needs m = n_g + 1 segments")
    if alpha.shape != (mat.shape[0],):
        raise SynthesisError("alpha length must match the row count")
    try:
        tau = np.linalg.solve(mat, alpha)
    except np.linalg.LinAlgError:
        raise SynthesisError("sequence does not span phase space") from None
    t_c = alpha[-1]
    tol = negative_tol_scale * max(abs(t_c), 1.0e-30)
    if np.any(tau < -tol):
        return None
    return np.clip(tau, 0.0, None)


def general_four_spin_solution(alpha):
    """Closed-form durations for the standard four-spin seven-segment sequence.

    `alpha` is laid out as (a12, a23, a34, a14, a13, a24, T_c).
    """
    a12, a23, a34, a14, a13, a24, t_c = np.asarray(alpha, float)
    return 0.25 * np.array(
        [
            a12 + a23 + a34 + a14,
            t_c - a12 - a14 + a24,
            a12 + a34 - a13 - a24,
            t_c - a12 - a23 + a13,
            a23 + a14 - a13 - a24,
            t_c - a23 - a34 + a24,
            t_c - a34 - a14 + a13,
        ]
    )


# Solvable-system presets. Coupling orders are grouped by ring distance;
# these fix both the matrix row layout and the alpha layout.

FOUR_SPIN_SEQUENCE = ((), (1,), (1, 2), (2,), (2, 3), (3,), (4,))
FOUR_SPIN_COUPLING_ORDER = ((1, 2), (2, 3), (3, 4), (1, 4), (1, 3), (2, 4))

FIVE_SPIN_SEQUENCE_SINGLES = (
    (), (1,), (1, 2), (2,), (2, 3), (3,), (3, 4), (4,), (4, 5), (5,), (1, 5),
)
FIVE_SPIN_SEQUENCE_PAIRS = (
    (), (1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (1, 4), (2, 4), (2, 5), (3, 5), (1, 3),
)
FIVE_SPIN_COUPLING_ORDER = (
    (1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (1, 3), (2, 4), (3, 5), (1, 4), (2, 5),
)

SIX_SPIN_SEQUENCE = (
    (), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6), (1, 3), (1, 4), (4, 6),
    (2, 4), (2, 6), (3, 6), (3, 5), (1, 5), (2, 5),
)
SIX_SPIN_COUPLING_ORDER = (
    (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6),
    (1, 3), (2, 4), (3, 5), (4, 6), (1, 5), (2, 6),
    (1, 4), (2, 5), (3, 6),
)

PRESETS = {
    4: (FOUR_SPIN_SEQUENCE, FOUR_SPIN_COUPLING_ORDER),
    5: (FIVE_SPIN_SEQUENCE_PAIRS, FIVE_SPIN_COUPLING_ORDER),
    6: (SIX_SPIN_SEQUENCE, SIX_SPIN_COUPLING_ORDER),
}


def ring_two_spin_sequence(n_spins):
    """Empty segment plus all NN pair flips around the ring."""
    seq = [()]
    for i in range(1, n_spins + 1):
        j = i % n_spins + 1
        seq.append(tuple(sorted((i, j))))
    return tuple(seq)


def cluster_alpha(coupling_order, couplings, t_c, ring_pairs=None):
    """Target phases for cluster preparation: pi on NN couplings, zero else.

    `couplings` maps (i, j) to g_ij; `ring_pairs` defaults to the pairs at ring
    distance one for N inferred from the order.
    """
    n = max(max(p) for p in coupling_order)
    if ring_pairs is None:
        ring_pairs = {tuple(sorted((i, i % n + 1))) for i in range(1, n + 1)}
    alpha = []
    for pair in coupling_order:
        if tuple(pair) in ring_pairs:
            alpha.append(np.pi / couplings[tuple(pair)])
        else:
            alpha.append(0.0)
    alpha.append(t_c)
    return np.asarray(alpha)


@dataclass(frozen=True)
class PulseSegment:
    flip_set: tuple
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "flip_set", tuple(sorted(self.flip_set)))
        if self.tau < 0:
            raise SynthesisError("negative segment duration")
        if len(set(self.flip_set)) != len(self.flip_set):
            raise SynthesisError("repeated spin in flip set")


@dataclass(frozen=True)
class PulseSequence:
    """Compiled sequence: merged segments plus the flattened gate list.

    `slots[k]` holds the (spin, sign) pi pulses executed after free evolution
    k-1 (slot 0 runs before the first free evolution, the last slot after the
    final one); sign +1 is a pi_x, -1 its inverse. Pulses within a slot run in
    ascending spin order.
    """

    segments: tuple
    slots: tuple
    total_time: float = field(default=0.0)
    pi_count: int = field(default=0)

    def durations(self):
        return np.array([s.tau for s in self.segments])


def merge_segments(segments):
    """Combine repeated flip sets; each pulse set may appear at most once."""
    merged = {}
    order = []
    for seg in segments:
        key = tuple(sorted(seg.flip_set))
        if key in merged:
            merged[key] += seg.tau
        else:
            merged[key] = seg.tau
            order.append(key)
    return [PulseSegment(k, merged[k]) for k in order]


def _greedy_order(segments):
    """Reorder commuting segments to raise flip overlap between neighbors."""
    rest = list(segments)
    rest.sort(key=lambda s: (len(s.flip_set), s.flip_set))
    ordered = [rest.pop(0)]
    while rest:
        cur = set(ordered[-1].flip_set)
        best = min(
            range(len(rest)),
            key=lambda q: (len(cur ^ set(rest[q].flip_set)), rest[q].flip_set),
        )
        ordered.append(rest.pop(best))
    return ordered


def compile_sequence(segments, drop_below=0.0, reorder=False):
    """Cancel pulses between adjacent segments and count the survivors.

    Segment order is preserved unless `reorder` is set (the diagonal segment
    unitaries commute, so any order realizes the same phases). Segments with
    tau <= drop_below are removed before compilation; pass drop_below=None to
    keep zero-duration segments in the gate list.
    """
    segs = merge_segments(
        seg if isinstance(seg, PulseSegment) else PulseSegment(*seg) for seg in segments
    )
    if drop_below is not None:
        segs = [s for s in segs if s.tau > drop_below]
    if reorder and segs:
        segs = _greedy_order(segs)
    slots = []
    previous = ()
    for seg in segs:
        cur = set(seg.flip_set)
        prev = set(previous)
        slot = [(s, -1) for s in sorted(prev - cur)] + [(s, +1) for s in sorted(cur - prev)]
        slot.sort(key=lambda p: p[0])
        slots.append(tuple(slot))
        previous = seg.flip_set
    slots.append(tuple((s, -1) for s in sorted(previous)))
    pi_count = sum(len(s) for s in slots)
    return PulseSequence(
        segments=tuple(segs),
        slots=tuple(slots),
        total_time=float(sum(s.tau for s in segs)),
        pi_count=pi_count,
    )


def accumulated_phases(problem, tau):
    """theta_ij / g_ij for each coupling row given segment durations."""
    mat = np.asarray(problem.matrix[:-1], float)
    return mat @ np.asarray(tau, float)


def pulse_string(sequence):
    """Human-readable gate string in [tau_1-pi_1-...] notation."""
    parts = []
    if sequence.slots and sequence.slots[0]:
        parts.append(_slot_text(sequence.slots[0]))
    for k, seg in enumerate(sequence.segments):
        parts.append(f"tau{k + 1}")
        slot = sequence.slots[k + 1]
        if slot:
            parts.append(_slot_text(slot))
    return "[" + "-".join(parts) + "]"


def _slot_text(slot):
    return "".join(f"pi{s}" + ("+" if sign > 0 else "-") for s, sign in slot)


def sequence_to_json(segments, coupling_order=None):
    d = {"segments": [{"flip": list(s.flip_set), "tau_s": s.tau} for s in segments]}
    if coupling_order is not None:
        d["coupling_order"] = [list(p) for p in coupling_order]
    return d


def sequence_from_json(cfg):
    segs = [PulseSegment(tuple(e["flip"]), float(e["tau_s"])) for e in cfg["segments"]]
    order = cfg.get("coupling_order")
    return segs, (tuple(tuple(p) for p in order) if order else None)
