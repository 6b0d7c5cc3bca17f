"""Specification-property machinery: shadowing periodic points for weighted
backward shifts and the separated families they generate.

Given orbit segments [a_i, b_i] with targets y_i and a uniform gap N between
consecutive segments, the construction copies the target coordinates into a
pattern z (coordinate j covers time j-1, so segment i fills coordinates
a_i+1 .. b_i+N), then periodises z with forward-shift images to obtain a
point xi fixed by B_w^{b_s+N}.  At every segment time the orbit of xi agrees
with the target orbit on at least the first N coordinates, so the aggregated
metric deviation is at most 2^{-N} - 2^{-dim}; adding the exact truncation
tail 2^{-dim} certifies the strict bound 2^{-N} < eps.

Stacking single-time segments at times k*i*(N+1) over all target tuples in
anchors^n builds the m^n-point separated families behind the log(m)/(k(N+1))
entropy lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rules as rl
from .entropy import CompactSample, dyn_distance
from .errors import SampleSizeError, ScheduleError, ValidationError
from .operators import (
    BackwardShift,
    DenseMatrix,
    ForwardShift,
    Operator,
    OperatorPower,
    apply,
    batch_apply,
    orbit_block,
)
from .spaces import (
    FAggregate,
    Lp,
    SpaceSpec,
    Vector,
    faggregate_l2,
    norm_block,
    norm_tail_bound,
)

FAMILY_CAP = 100_000


def sp_constant(eps: float) -> int:
    """Smallest N >= 1 with 2^{-N} strictly below eps; defined for 0 < eps <= 1."""
    if not (0.0 < eps <= 1.0):
        raise ValidationError(f"eps must lie in (0, 1], got {eps}")
    N = 1
    while 2.0**-N >= eps:
        N += 1
    return N


@dataclass(frozen=True)
class SegmentSchedule:
    """Orbit segments (a_i, b_i, y_i) with uniform gap N between them."""

    segments: tuple[tuple[int, int, Vector], ...]
    gap: int

    def __post_init__(self):
        if self.gap < 1:
            raise ScheduleError(f"gap must be >= 1, got {self.gap}")
        if not self.segments:
            raise ScheduleError("schedule needs at least one segment")
        prev_b = None
        for a, b, y in self.segments:
            if a < 0 or b < a:
                raise ScheduleError(f"segment [{a}, {b}] is not ordered")
            if prev_b is not None:
                if a <= prev_b:
                    raise ScheduleError("segments must be strictly increasing")
                if a - prev_b < self.gap:
                    raise ScheduleError(
                        f"segment gap {a - prev_b} is below the required {self.gap}"
                    )
            if not isinstance(y, Vector):
                raise ScheduleError("segment targets must be vectors")
            prev_b = b
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def b_last(self) -> int:
        return self.segments[-1][1]

    @property
    def period(self) -> int:
        return self.b_last + self.gap


@dataclass(frozen=True)
class ShadowReport:
    """Constructed periodic point and its certified per-segment deviations."""

    xi: Vector
    period: int
    deviations: tuple[tuple[int, float], ...]  # (segment index, max deviation)
    tail_bound: float
    epsilon: float
    periodicity_exact: bool
    admissible: bool
    certified: bool


def _pattern(sched: SegmentSchedule, dim: int) -> np.ndarray:
    """Coordinates of z: segment i contributes target coordinates
    a_i+1 .. b_i+N (1-based)."""
    z = np.zeros(dim, dtype=complex)
    for a, b, y in sched.segments:
        lo, hi = a + 1, b + sched.gap  # 1-based coordinate range
        for j in range(lo, hi + 1):
            z[j - 1] = y.coord(j)
    return z


def _periodize(B: BackwardShift, z: np.ndarray, period: int) -> np.ndarray:
    """xi = sum_k F_w^{k*period} z by explicit iterated forward shifts."""
    F = ForwardShift(B.weights)
    dim = len(z)
    xi = z.copy()
    image = z[np.newaxis, :].copy()
    reps = dim // period + 1
    for _ in range(reps):
        for _ in range(period):
            image[:, -1] = 0.0  # truncation headroom: top coordinate falls away
            image = batch_apply(F, image)
        if not np.any(image):
            break
        xi = xi + image[0]
    return xi


def shadow_point(
    B_w: Operator,
    sched: SegmentSchedule,
    epsilon: float,
    space: SpaceSpec | None = None,
    dim: int | None = None,
) -> ShadowReport:
    """Build the periodic point shadowing the scheduled orbit segments.

    Verifies exact periodicity under B_w^{period} on the representable
    window and measures per-segment orbit deviations in the aggregated
    metric; `certified` additionally demands deviation + 2^{-dim} < epsilon
    strictly and an admissible weight sequence.
    """
    if not isinstance(B_w, BackwardShift):
        raise ValidationError("shadowing is built for weighted backward shifts")
    if not (0 < epsilon <= 1):
        raise ValidationError(f"epsilon must lie in (0, 1], got {epsilon}")
    space = faggregate_l2() if space is None else space
    if not isinstance(space, FAggregate):
        raise ValidationError("deviations are measured in the aggregated metric")
    period = sched.period
    min_dim = 2 * period
    for _, _, y in sched.segments:
        min_dim = max(min_dim, y.dim)
    dim = min_dim if dim is None else dim
    if dim < min_dim:
        raise ValidationError(
            f"dim = {dim} gives no headroom; need at least {min_dim}"
        )

    admissible = rl.weight_admissibility(B_w.weights).admissible
    z = _pattern(sched, dim)
    xi = _periodize(B_w, z, period)

    # exact periodicity on the window the truncation can represent
    orbit_xi = orbit_block(B_w, xi[np.newaxis, :], period + 1)[0]
    window = dim - period
    periodicity_exact = bool(np.array_equal(orbit_xi[period][:window], xi[:window]))

    space_id = xi_space_id = sched.segments[0][2].space_id
    tail = norm_tail_bound(dim, space)
    steps = sched.b_last + 1
    deviations = []
    certified = periodicity_exact and admissible
    for idx, (a, b, y) in enumerate(sched.segments):
        ypad = np.zeros(dim, dtype=complex)
        ypad[: y.dim] = y.coords
        orbit_y = orbit_block(B_w, ypad[np.newaxis, :], steps)[0]
        diffs = orbit_xi[a : b + 1] - orbit_y[a : b + 1]
        dev = float(norm_block(diffs, space).max())
        deviations.append((idx, dev))
        if not (dev + tail < epsilon):
            certified = False
    return ShadowReport(
        xi=Vector(xi, xi_space_id),
        period=period,
        deviations=tuple(deviations),
        tail_bound=tail,
        epsilon=epsilon,
        periodicity_exact=periodicity_exact,
        admissible=admissible,
        certified=certified,
    )


def fixed_vector(B_w: BackwardShift, dim: int, scale: complex = 1.0, space_id: str = "") -> Vector:
    """The fixed-point direction of the shift: x_1 = scale and
    x_{n+1} = x_n / w_{n+1}, exact on coordinates 1..dim-1."""
    return periodic_vector(B_w, head=(scale,), dim=dim, space_id=space_id)


def periodic_vector(
    B_w: BackwardShift, head, dim: int, space_id: str = ""
) -> Vector:
    """k-periodic point of the shift with prescribed first k coordinates:
    x_{n+k} = x_n / prod_{l=n+1..n+k} w_l, evaluated by sequential division."""
    head = tuple(complex(h) for h in head)
    k = len(head)
    if k < 1 or dim < k:
        raise ValidationError("need 1 <= len(head) <= dim")
    w = rl.values(B_w.weights, dim + 1)
    coords = np.zeros(dim, dtype=complex)
    coords[:k] = head
    for n in range(k, dim):
        # x_{n+1} = x_{n+1-k} / (w_{n-k+2} * ... * w_{n+1}), one factor at a time
        val = coords[n - k]
        for l in range(n - k + 1, n + 1):
            val = val / w[l]  # w[l] is w_{l+1}
        coords[n] = val
    return Vector(coords, space_id)


def sp_entropy_lower_bound(m: int, N: int, k: int = 1) -> float:
    """log(m) / (k (N+1)): the growth rate certified by an m-symbol family
    over period-k dynamics with gap N."""
    if m < 2 or N < 1 or k < 1:
        raise ValidationError("need m >= 2, N >= 1, k >= 1")
    return math.log(m) / (k * (N + 1))


@dataclass(frozen=True)
class SeparatedFamily:
    sample: CompactSample
    family_size: int
    schedule_times: tuple[int, ...]
    gap: int
    epsilon: float
    min_pairwise: float  # smallest verified pairwise dynamical distance
    verification: str  # "direct" or "certificate"


DIRECT_VERIFY_CAP = 2048


def _direct_min_pairwise(
    T: Operator, block: np.ndarray, steps: int, space: SpaceSpec
) -> float:
    orbits = orbit_block(T, block, steps)
    best = math.inf
    for i in range(block.shape[0] - 1):
        d = norm_block(orbits[i + 1 :] - orbits[i], space).max(axis=1)
        best = min(best, float(d.min()))
    return best


def sp_separated_family(
    B_w: Operator,
    anchors,
    n: int,
    epsilon: float,
    k: int = 1,
    space: SpaceSpec | None = None,
) -> SeparatedFamily:
    """Shadow every target tuple in anchors^n at times k*i*(N+1) and verify
    the resulting family is pairwise separated at scale epsilon.

    Anchors must be pairwise at least 3*epsilon apart in the aggregated
    metric and fixed under B_w^k on the truncation interior.  The returned
    sample is the family together with the anchors (duplicates collapsed).
    Verification computes pairwise dynamical distances directly up to a size
    cap; above it, certified triangle-inequality lower bounds stand in and
    any pair failing the bound is re-checked directly.
    """
    if not isinstance(B_w, BackwardShift):
        raise ValidationError("families are built over weighted backward shifts")
    if n < 1 or k < 1:
        raise ValidationError("need n >= 1 and k >= 1")
    space = faggregate_l2() if space is None else space
    anchors = tuple(anchors)
    m = len(anchors)
    if m < 1:
        raise ValidationError("need at least one anchor")
    if m**n > FAMILY_CAP:
        raise SampleSizeError(f"family size {m}**{n} exceeds {FAMILY_CAP}")
    N = sp_constant(epsilon)
    times = tuple(k * i * (N + 1) for i in range(n))
    b_last = times[-1]
    period = b_last + N
    dim = max(2 * period, max(a.dim for a in anchors))

    if m > 1:
        anchor_block = _padded(anchors, dim)
        for i in range(m):
            d = norm_block(anchor_block[i + 1 :] - anchor_block[i], space)
            if i + 1 < m and float(d.min()) < 3 * epsilon:
                raise ValidationError(
                    "anchors closer than 3*epsilon cannot certify separation"
                )

    import itertools

    reports = []
    vectors = []
    for combo in itertools.product(range(m), repeat=n):
        segs = tuple((t, t, anchors[c]) for t, c in zip(times, combo))
        rep = shadow_point(B_w, SegmentSchedule(segs, N), epsilon, space, dim=dim)
        if not rep.certified:
            raise ValidationError(
                f"shadow for tuple {combo} failed certification"
            )
        reports.append((combo, rep))
        vectors.append(rep.xi)

    family_block = np.stack([v.coords for v in vectors])
    anchor_block = _padded(anchors, dim)
    all_rows = np.concatenate([family_block, anchor_block], axis=0)
    # collapse duplicates, first occurrence wins (the all-zero tuple
    # reproduces the zero anchor); row_of maps original index -> kept row
    seen: dict[bytes, int] = {}
    keep: list[int] = []
    row_of: list[int] = []
    for idx in range(all_rows.shape[0]):
        key = all_rows[idx].tobytes()
        if key in seen:
            row_of.append(seen[key])
        else:
            seen[key] = len(keep)
            row_of.append(len(keep))
            keep.append(idx)
    dedup = all_rows[keep]

    T_eff: Operator = B_w if k == 1 else OperatorPower(B_w, k)
    steps = (n - 1) * (N + 1) + 1  # Bowen window in T^k steps
    if dedup.shape[0] <= DIRECT_VERIFY_CAP:
        min_pair = _direct_min_pairwise(T_eff, dedup, steps, space)
        verification = "direct"
        if not (min_pair > epsilon):
            raise ValidationError(
                f"family separation failed: min pairwise distance {min_pair:.6g} <= {epsilon}"
            )
    else:
        anchor_rows = [row_of[len(vectors) + a] for a in range(m)]
        min_pair = _certificate_min_pairwise(
            T_eff, dedup, anchor_rows, reports, anchors, dim, steps, space, epsilon
        )
        verification = "certificate"

    space_id = anchors[0].space_id
    pts = tuple(Vector(row, space_id) for row in dedup)
    sample = CompactSample(
        pts,
        resolution=max(epsilon / 2, 1e-300),
        label=f"sp-family(m={m},n={n},N={N},k={k})",
    )
    return SeparatedFamily(
        sample=sample,
        family_size=len(vectors),
        schedule_times=times,
        gap=N,
        epsilon=epsilon,
        min_pairwise=min_pair,
        verification=verification,
    )


def _padded(vectors, dim: int) -> np.ndarray:
    block = np.zeros((len(vectors), dim), dtype=complex)
    for i, v in enumerate(vectors):
        if v.dim > dim:
            raise ValidationError("vector longer than the working truncation")
        block[i, : v.dim] = v.coords
    return block


def _certificate_min_pairwise(
    T: Operator,
    dedup: np.ndarray,
    anchor_rows: list[int],
    reports,
    anchors,
    dim: int,
    steps: int,
    space: SpaceSpec,
    epsilon: float,
) -> float:
    """Certified lower bound on every pairwise dynamical distance.

    Two shadows with tuples differing at schedule position p satisfy, at
    that time, d >= d(anchor, anchor') - dev - dev' - drift - drift', every
    term a computed number.  The family-wide bound uses the worst of each
    term; anchor-vs-family pairs are checked directly (linear cost).  Falls
    back to the full direct scan when the global bound fails.
    """
    m = len(anchors)
    anchor_block = _padded(anchors, dim)
    orbits_a = orbit_block(T, anchor_block, steps)
    drift_max = 0.0
    for t in range(steps):
        drift_max = max(
            drift_max, float(norm_block(orbits_a[:, t, :] - anchor_block, space).max())
        )
    d_min_anchor = math.inf
    for a in range(m - 1):
        d = norm_block(anchor_block[a + 1 :] - anchor_block[a], space)
        d_min_anchor = min(d_min_anchor, float(d.min()))
    dev_max = max(max(d for _, d in rep.deviations) for _, rep in reports)
    global_bound = d_min_anchor - 2.0 * dev_max - 2.0 * drift_max
    if not (global_bound > epsilon):
        # certificate too weak: fall back to the exact (slow) scan
        direct = _direct_min_pairwise(T, dedup, steps, space)
        if not (direct > epsilon):
            raise ValidationError(
                f"family separation failed: min pairwise distance {direct:.6g} <= {epsilon}"
            )
        return direct

    # anchors against everything, directly
    orbits_all = orbit_block(T, dedup, steps)
    best_direct = math.inf
    for r in anchor_rows:
        d = norm_block(orbits_all - orbits_all[r], space).max(axis=1)
        d[r] = math.inf
        best_direct = min(best_direct, float(d.min()))
    if not (best_direct > epsilon):
        raise ValidationError(
            f"family separation failed: anchor-related distance {best_direct:.6g}"
        )
    return min(global_bound, best_direct)


NULLSPACE_RTOL = 1e-10


def linear_periodic_points(A: DenseMatrix, k: int) -> np.ndarray:
    """Orthonormal basis of N(A^k - I); empty when 0 is the only k-periodic
    point."""
    if k < 1:
        raise ValidationError("period must be >= 1")
    if not isinstance(A, DenseMatrix):
        raise ValidationError("periodic subspaces are computed for dense matrices")
    d = A.d
    M = np.linalg.matrix_power(A.entries, k) - np.eye(d)
    _, sv, vh = np.linalg.svd(M)
    scale = max(float(sv[0]) if sv.size else 0.0, 1.0)
    rank = int(np.sum(sv > NULLSPACE_RTOL * scale))
    return vh[rank:].conj().T
