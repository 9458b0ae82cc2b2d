"""Master function, Bethe residual system, and critical-point bookkeeping.

Coordinates come grouped by color: ``t[i]`` holds the l_{i+1} variables
attached to simple root alpha_{i+1}.  All evaluation happens through the
log of the master function and its derivatives; the function itself is
multi-valued and never formed.

Sign convention: ``bae_residual`` returns the gradient of log Phi (the
components of Phi^{-1} dPhi/dt), which is the negative of the textbook
left-hand sides.  Both vanish exactly at critical points.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._scalars import as_complex

DEFAULT_TOL = 1e-10
DEFAULT_QUANTUM = 1e-6


class SingularConfiguration(ValueError):
    """A denominator of the residual system (or a log argument) vanishes."""

    def __init__(self, factor):
        super().__init__(f"vanishing factor: {factor}")
        self.factor = factor


def coords_to_groups(ws, t):
    """Normalize input coordinates to a tuple of per-color complex tuples."""
    groups = tuple(tuple(complex(v) for v in grp) for grp in t)
    if len(groups) != ws.r:
        raise ValueError(f"expected {ws.r} coordinate groups, got {len(groups)}")
    for i, grp in enumerate(groups):
        if len(grp) != ws.l[i]:
            raise ValueError(
                f"group {i + 1} must have {ws.l[i]} coordinates, got {len(grp)}")
    return groups


def flatten(groups):
    return np.array([v for grp in groups for v in grp], dtype=np.complex128)


def unflatten(ws, flat):
    out = []
    pos = 0
    for li in ws.l:
        out.append(tuple(complex(v) for v in flat[pos:pos + li]))
        pos += li
    return tuple(out)


def check_denominators(ws, groups, margin=0.0):
    """Raise SingularConfiguration when any residual denominator is within
    ``margin`` of zero (exactly zero by default)."""
    a = ws.pair_matrix()
    zc = ws.z_array()
    for i, grp in enumerate(groups):
        for j, tv in enumerate(grp):
            for s in range(ws.n):
                if a[s, i] != 0 and abs(tv - zc[s]) <= margin:
                    raise SingularConfiguration(
                        f"t^({i + 1})_{j + 1} - z_{s + 1}")
            for k in range(j + 1, len(grp)):
                if abs(tv - grp[k]) <= margin:
                    raise SingularConfiguration(
                        f"t^({i + 1})_{j + 1} - t^({i + 1})_{k + 1}")
        if i + 1 < ws.r:
            for j, tv in enumerate(grp):
                for k, uv in enumerate(groups[i + 1]):
                    if abs(tv - uv) <= margin:
                        raise SingularConfiguration(
                            f"t^({i + 1})_{j + 1} - t^({i + 2})_{k + 1}")


def log_master(ws, t):
    """A branch of log Phi, principal branch per factor.

    exp(Re(log_master)) = |Phi| independently of branch choices.
    """
    groups = coords_to_groups(ws, t)
    check_denominators(ws, groups)
    a = ws.pair_matrix()
    zc = ws.z_array()
    total = 0.0 + 0.0j
    for i, grp in enumerate(groups):
        for tv in grp:
            for s in range(ws.n):
                if a[s, i] != 0:
                    total -= a[s, i] * cmath.log(tv - zc[s])
        for j in range(len(grp)):
            for k in range(j + 1, len(grp)):
                total += 2.0 * cmath.log(grp[j] - grp[k])
        if i + 1 < ws.r:
            for tv in grp:
                for uv in groups[i + 1]:
                    total -= cmath.log(tv - uv)
    return total


def bae_residual(ws, t):
    """Gradient of log Phi, ordered by (color, index)."""
    groups = coords_to_groups(ws, t)
    check_denominators(ws, groups)
    z, a, color, W = _kernels.make_layout(ws)
    return _kernels.residual(flatten(groups), z, a, color, W)


def bae_jacobian(ws, t):
    """Hessian of log Phi (symmetric by construction)."""
    groups = coords_to_groups(ws, t)
    check_denominators(ws, groups)
    z, a, color, W = _kernels.make_layout(ws)
    return _kernels.jacobian(flatten(groups), z, a, color, W)


def canonicalize(t, quantum=DEFAULT_QUANTUM):
    """Ordering-invariant fingerprint of a coordinate tuple.

    Each group is quantized to the given grid and sorted, so points in the
    same S_l orbit (same-color permutations only) share a key.
    """
    key = []
    for grp in t:
        q = sorted(
            (round(complex(v).real / quantum), round(complex(v).imag / quantum))
            for v in grp)
        key.append(tuple(q))
    return tuple(key)


@dataclass(frozen=True)
class CriticalPoint:
    """A certified solution of the residual system.

    multiplicity is 1 for numerically nondegenerate points and the string
    "degenerate" when the Jacobian is rank-deficient at the point (the true
    multiplicity is then >= 2 but undetermined).
    """

    coords: tuple
    residual_norm: float
    multiplicity: object
    canonical_key: tuple

    @classmethod
    def from_coords(cls, ws, t, residual_norm, multiplicity,
                    quantum=DEFAULT_QUANTUM):
        groups = coords_to_groups(ws, t)
        return cls(groups, float(residual_norm), multiplicity,
                   canonicalize(groups, quantum))

    def flat(self):
        return flatten(self.coords)

    def to_json(self):
        return {
            "coords": [[[v.real, v.imag] for v in grp] for grp in self.coords],
            "residual_norm": self.residual_norm,
            "multiplicity": self.multiplicity,
        }

    @classmethod
    def from_json(cls, ws, obj, quantum=DEFAULT_QUANTUM):
        groups = tuple(
            tuple(complex(re, im) for re, im in grp) for grp in obj["coords"])
        return cls.from_coords(ws, groups, obj.get("residual_norm", float("nan")),
                               obj.get("multiplicity", 1), quantum)
