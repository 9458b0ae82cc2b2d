"""Critical-point search: exact cell enumeration for the real classical case,
multi-start Newton over complex coordinates in general.

The classical (rank 1, real sorted z, negative exponent parameters) problem
has one critical orbit per assignment of the l points to the n-1 open
intervals between consecutive z's; each cell carries a strictly convex
electrostatic energy, so a damped Newton run from Chebyshev-spaced starts is
a complete enumeration.  Everything else is heuristic multi-start search,
reported against the dimension bound.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels, master
from .master import (DEFAULT_QUANTUM, DEFAULT_TOL, CriticalPoint,
                     SingularConfiguration, canonicalize, coords_to_groups,
                     flatten, unflatten)
from .rootdata import d_dimension, is_separating

DENOMINATOR_MARGIN = 1e-8


class NotClassicalCase(ValueError):
    """Preconditions of the real Stieltjes solver are violated."""


class ConvergenceFailure(RuntimeError):
    def __init__(self, cell, detail=""):
        super().__init__(f"cell {cell} failed to converge {detail}".rstrip())
        self.cell = cell


class BoundViolation(AssertionError):
    """More orbits than the dimension bound on separating data."""


class NotCritical(ValueError):
    def __init__(self, residual):
        norm = float(np.abs(residual).max()) if len(residual) else 0.0
        super().__init__(f"point is not critical (residual max {norm:.3e})")
        self.residual = residual


class InvariantViolation(ValueError):
    def __init__(self, clause, detail):
        super().__init__(f"off-diagonal clause {clause} violated: {detail}")
        self.clause = clause


@dataclass(frozen=True)
class OrbitSet:
    """Deduplicated orbit representatives plus the search audit trail."""

    orbits: tuple
    bound: int
    saturated: bool
    search_log: dict

    def __len__(self):
        return len(self.orbits)

    def canonical_keys(self):
        return [cp.canonical_key for cp in self.orbits]

    def to_json(self):
        return {
            "orbits": [cp.to_json() for cp in self.orbits],
            "bound": self.bound,
            "saturated": self.saturated,
            "search_log": self.search_log,
        }


def _bound(ws):
    if ws.n == 1:
        return 1 if ws.l_total == 0 else 0
    return d_dimension(ws.n - 1, ws.r, ws.l)


def _invariant_margins(ws, groups, margin=DENOMINATOR_MARGIN):
    """Return the violated off-diagonal clause, or None when all margins hold."""
    a = ws.pair_matrix()
    zc = ws.z_array()
    for i, grp in enumerate(groups):
        for j in range(len(grp)):
            for k in range(j + 1, len(grp)):
                if abs(grp[j] - grp[k]) < margin:
                    return "(i)", f"t^({i + 1})_{j + 1} ~ t^({i + 1})_{k + 1}"
        if i + 1 < ws.r:
            for j, tv in enumerate(grp):
                for k, uv in enumerate(groups[i + 1]):
                    if abs(tv - uv) < margin:
                        return "(ii)", f"t^({i + 1})_{j + 1} ~ t^({i + 2})_{k + 1}"
        for j, tv in enumerate(grp):
            for s in range(ws.n):
                if a[s, i] != 0 and abs(tv - zc[s]) < margin:
                    return "(iii)", f"t^({i + 1})_{j + 1} ~ z_{s + 1}"
    return None


def _classify_multiplicity(ws, groups):
    if ws.l_total == 0:
        return 1
    J = master.bae_jacobian(ws, groups)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[-1] > 1e-6 * sv[0]:
        return 1
    return "degenerate"


def certify_orbit(ws, t, tol=DEFAULT_TOL, quantum=DEFAULT_QUANTUM):
    """Polish an approximate critical point and audit its invariants.

    At most 5 Newton iterations; raises NotCritical if the residual stays
    above tol, InvariantViolation if a denominator margin fails.
    """
    groups = coords_to_groups(ws, t)
    if ws.l_total == 0:
        return CriticalPoint.from_coords(ws, groups, 0.0, 1, quantum)
    z, a, color, W = _kernels.make_layout(ws)
    flat = flatten(groups)
    flat, rnorm, _, status = _kernels.newton(flat, z, a, color, W, tol, 5, 40)
    if status not in (_kernels.OK,) or rnorm > tol:
        res = _kernels.residual(flat, z, a, color, W)
        raise NotCritical(res)
    groups = unflatten(ws, flat)
    bad = _invariant_margins(ws, groups)
    if bad is not None:
        raise InvariantViolation(*bad)
    mult = _classify_multiplicity(ws, groups)
    return CriticalPoint.from_coords(ws, groups, rnorm, mult, quantum)


# ---------------------------------------------------------------------------
# real classical case
# ---------------------------------------------------------------------------

def _cells(l, n_intervals):
    """Compositions of l into n_intervals nonnegative parts."""
    if n_intervals == 1:
        yield (l,)
        return
    for head in range(l + 1):
        for rest in _cells(l - head, n_intervals - 1):
            yield (head,) + rest


def _chebyshev_fill(zs, cell, shrink=0.9):
    t = []
    for s, count in enumerate(cell):
        lo, hi = zs[s], zs[s + 1]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo) * shrink
        # descending cos order keeps each interval's points sorted ascending
        for k in range(count, 0, -1):
            t.append(mid + half * math.cos(math.pi * (2 * k - 1) / (2 * count)))
    return np.array(t, dtype=np.float64)


def _cell_bounds(zs, cell):
    lo, hi = [], []
    for s, count in enumerate(cell):
        lo.extend([zs[s]] * count)
        hi.extend([zs[s + 1]] * count)
    return np.array(lo), np.array(hi)


def _in_cell(t, lo, hi, cell):
    if np.any(t <= lo) or np.any(t >= hi):
        return False
    pos = 0
    for count in cell:
        for k in range(count - 1):
            if t[pos + k] >= t[pos + k + 1]:
                return False
        pos += count
    return True


def _energy(t, zs, ms):
    """-log|Phi| for real classical data (finite inside a cell)."""
    acc = 0.0
    for tj in t:
        for z, m in zip(zs, ms):
            acc += m * math.log(abs(tj - z))
    for j in range(len(t)):
        for k in range(j + 1, len(t)):
            acc -= 2.0 * math.log(abs(t[j] - t[k]))
    return acc


def _bisection_sweeps(t, zs, ms, lo, hi, layout, tol, max_sweeps=500):
    """Coordinate-wise zero finding; each residual entry is strictly
    decreasing in its own coordinate inside the cell."""
    z, a, color, W = layout
    t = t.copy()
    for _ in range(max_sweeps):
        res = _kernels.residual(t.astype(np.complex128), z, a, color, W).real
        if np.abs(res).max() <= tol:
            return t
        for j in range(t.size):
            lo_j = max(lo[j], t[j - 1] if j > 0 and lo[j - 1] == lo[j] else lo[j])
            hi_j = min(hi[j], t[j + 1] if j + 1 < t.size and hi[j + 1] == hi[j] else hi[j])
            a_end, b_end = lo_j, hi_j
            for _ in range(80):
                mid = 0.5 * (a_end + b_end)
                tt = t.copy()
                tt[j] = mid
                rj = _kernels.residual(
                    tt.astype(np.complex128), z, a, color, W).real[j]
                if rj > 0:
                    a_end = mid
                else:
                    b_end = mid
            t[j] = 0.5 * (a_end + b_end)
    return t


def solve_stieltjes_real(ws, tol=DEFAULT_TOL, quantum=DEFAULT_QUANTUM):
    """Complete enumeration of critical orbits for the real classical case.

    One orbit per assignment of the l points to the open intervals between
    consecutive singular points; returns exactly binomial(l+n-2, l) orbits.
    """
    if not ws.is_classical_real():
        raise NotClassicalCase(
            "need r=1, real sorted distinct z, and negative classical exponents")
    l = ws.l[0]
    zs = [v.real for v in ws.z_array()]
    ms = [v.real for v in ws.pair_matrix()[:, 0]]  # the classical m_s < 0
    layout = _kernels.make_layout(ws)
    z, a, color, W = layout
    orbits = []
    attempted = converged = 0
    if ws.n < 2 and l > 0:
        raise NotClassicalCase("need at least two singular points when l > 0")
    for cell in _cells(l, ws.n - 1) if l > 0 else [()]:
        attempted += 1
        if l == 0:
            orbits.append(certify_orbit(ws, ((),) , tol, quantum))
            converged += 1
            continue
        t = _chebyshev_fill(zs, cell)
        lo, hi = _cell_bounds(zs, cell)
        energy = _energy(t, zs, ms)
        ok = False
        for _ in range(200):
            res = _kernels.residual(t.astype(np.complex128), z, a, color, W).real
            rnorm = np.abs(res).max()
            if rnorm <= tol:
                ok = True
                break
            J = _kernels.jacobian(t.astype(np.complex128), z, a, color, W).real
            try:
                step = np.linalg.solve(J, res)
            except np.linalg.LinAlgError:
                break
            lam, improved = 1.0, False
            for _ in range(40):
                tn = t - lam * step
                if _in_cell(tn, lo, hi, cell):
                    en = _energy(tn, zs, ms)
                    if en < energy:
                        t, energy, improved = tn, en, True
                        break
                lam *= 0.5
            if not improved:
                break
        if not ok:
            t = _bisection_sweeps(t, zs, ms, lo, hi, layout, tol)
            res = _kernels.residual(t.astype(np.complex128), z, a, color, W).real
            if np.abs(res).max() > tol:
                raise ConvergenceFailure(cell)
        converged += 1
        orbits.append(certify_orbit(ws, (tuple(map(complex, t)),), tol, quantum))
    keys = [cp.canonical_key for cp in orbits]
    if len(set(keys)) != len(keys):
        raise ConvergenceFailure("duplicate", "two cells reached the same orbit")
    bound = _bound(ws)
    orbits.sort(key=lambda cp: cp.canonical_key)
    log = {"starts": attempted, "converged": converged,
           "rejected": {"duplicate": 0, "invariant": 0, "diverged": 0}}
    return OrbitSet(tuple(orbits), bound, len(orbits) == bound, log)


# ---------------------------------------------------------------------------
# multi-start search
# ---------------------------------------------------------------------------

def _start_pool(ws, count, rng):
    zc = ws.z_array()
    center = zc.mean() if zc.size else 0.0
    scale = max(1.0, float(np.abs(zc - center).max()) if zc.size else 1.0)
    l = ws.l_total
    starts = []
    if ws.is_classical_real():
        zs = [v.real for v in zc]
        cells = list(_cells(ws.l[0], ws.n - 1))
        for cell in cells:
            base = _chebyshev_fill(zs, cell).astype(np.complex128)
            noise = (rng.standard_normal(l) + 1j * rng.standard_normal(l))
            starts.append(base + 0.01 * scale * noise)
    while len(starts) < count:
        pts = center + scale * 0.8 * (
            rng.standard_normal(l) + 1j * rng.standard_normal(l))
        starts.append(pts.astype(np.complex128))
    return starts[:max(count, len(starts))]


def solve_multistart(ws, starts=None, seed=0, tol=DEFAULT_TOL,
                     quantum=DEFAULT_QUANTUM, max_iter=200):
    """Seeded multi-start Newton over complex coordinates.

    Deterministic for fixed (ws, starts, seed).  Orbits are deduplicated by
    canonical key and reported against the dimension bound; exceeding the
    bound on separating data fails loudly.
    """
    _kernels.apply_thread_cap()
    bound = _bound(ws)
    separating, witness = is_separating(ws)
    if not separating:
        warnings.warn(
            f"weight data is not separating (witness {witness}); "
            "the critical set may be infinite", stacklevel=2)
    log = {"starts": 0, "converged": 0,
           "rejected": {"duplicate": 0, "invariant": 0, "diverged": 0}}
    if ws.l_total == 0:
        orbit = certify_orbit(ws, tuple(() for _ in range(ws.r)), tol, quantum)
        log["starts"] = log["converged"] = 1
        return OrbitSet((orbit,), bound, bound == 1, log)
    if starts is None:
        starts = 50 * max(bound, 1)
    rng = np.random.default_rng(seed)
    pool = _start_pool(ws, starts, rng)
    layout = _kernels.make_layout(ws)
    z, a, color, W = layout
    found = {}
    for t0 in pool:
        log["starts"] += 1
        t, rnorm, _, status = _kernels.newton(
            t0, z, a, color, W, tol, max_iter, 40)
        if status != _kernels.OK:
            log["rejected"]["diverged"] += 1
            continue
        groups = unflatten(ws, t)
        if _invariant_margins(ws, groups) is not None:
            log["rejected"]["invariant"] += 1
            continue
        key = canonicalize(groups, quantum)
        if key in found:
            log["rejected"]["duplicate"] += 1
            continue
        try:
            cp = certify_orbit(ws, groups, tol, quantum)
        except (NotCritical, InvariantViolation, SingularConfiguration):
            log["rejected"]["invariant"] += 1
            continue
        found[cp.canonical_key] = cp
        log["converged"] += 1
    orbits = tuple(found[k] for k in sorted(found))
    if separating and len(orbits) > bound:
        raise BoundViolation(
            f"{len(orbits)} orbits exceed the bound {bound} on separating data")
    return OrbitSet(orbits, bound, len(orbits) == bound, log)
