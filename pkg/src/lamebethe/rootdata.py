"""Root-system combinatorics for gl(r+1) weight data.

Weights are kept in gl coordinates: row s of the exponent matrix holds
<Lambda_s, e_{i,i}> for i = 1..r+1.  The simple root alpha_i acts through
differences of adjacent coordinates, and the scalar product on the weight
space is the one with (e*_{a,a}, e*_{b,b}) = delta_{a,b}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._scalars import QC, as_complex, as_scalar, pair_to_scalar, scalar_to_pair

DEFAULT_SEPARATING_CAP = 10 ** 7
DEFAULT_CONVOLUTION_CAP = 10 ** 8

INT_TOL = 1e-9


class NonAdmissible(ValueError):
    """The weight data does not resolve to a nonnegative integer multidegree."""


class ResourceLimit(RuntimeError):
    """An exhaustive loop would exceed its configured cap."""


def _near_int(v, tol=INT_TOL):
    """Integer value of a (possibly complex) scalar, or None."""
    if isinstance(v, QC):
        if v.im != 0 or v.re.denominator != 1:
            return None
        return int(v.re)
    c = complex(v)
    if abs(c.imag) >= tol:
        return None
    k = round(c.real)
    if abs(c.real - k) >= tol:
        return None
    return k


@dataclass(frozen=True)
class Multidegree:
    """Nonnegative integer grading vector (l_1, ..., l_r)."""

    entries: tuple

    def __post_init__(self):
        ent = tuple(int(e) for e in self.entries)
        if any(e < 0 for e in ent):
            raise ValueError(f"multidegree entries must be >= 0, got {ent}")
        object.__setattr__(self, "entries", ent)

    @property
    def total(self):
        return sum(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def pair_weight_root(m_row, i):
    """Scalar product (Lambda, alpha_i) = m_i - m_{i+1} for a gl weight row.

    `i` is 1-based, 1 <= i <= len(m_row) - 1.
    """
    if not 1 <= i <= len(m_row) - 1:
        raise IndexError(f"root index {i} out of range 1..{len(m_row) - 1}")
    return m_row[i - 1] - m_row[i]


def admissible_from_sequences(m, m_inf):
    """Solve sum_i l_i alpha_i = sum_s Lambda_s - Lambda_inf for the multidegree.

    Succeeds iff every l_i is a nonnegative integer (within 1e-9 on floats).
    Raises NonAdmissible otherwise.
    """
    m = [[as_scalar(v) for v in row] for row in m]
    m_inf = [as_scalar(v) for v in m_inf]
    width = len(m_inf)
    if any(len(row) != width for row in m):
        raise ValueError("weight rows and m_inf must have equal length")
    # Telescoping: m_inf[i] = sum_s m[s][i] - l_i + l_{i-1}, l_0 = 0.
    ls = []
    prev = 0
    for i in range(width):
        col = sum((row[i] for row in m), start=0)
        li = prev + col - m_inf[i]
        k = _near_int(li)
        if k is None:
            raise NonAdmissible(f"l_{i + 1} = {li} is not an integer")
        ls.append(k)
        prev = k
    if ls[-1] != 0:
        raise NonAdmissible(
            "difference is not in the root lattice (coordinate sums disagree)")
    ls = ls[:-1]
    if any(k < 0 for k in ls):
        raise NonAdmissible(f"negative multidegree {tuple(ls)}")
    return Multidegree(tuple(ls))


@dataclass(frozen=True)
class WeightSystem:
    """Full problem datum: singular points, exponent matrix, multidegree.

    Fields
    ------
    r : rank (the differential operators have order r+1)
    z : n pairwise-distinct singular points
    m : n x (r+1) matrix, m[s][i] = <Lambda_s, e_{i+1,i+1}>
    l : multidegree (l_1, ..., l_r), one entry per simple root
    m_inf : derived coordinates of Lambda_inf (never an input)
    """

    r: int
    z: tuple
    m: tuple
    l: tuple
    m_inf: tuple = field(init=False)
    exact: bool = field(init=False)

    def __post_init__(self):
        r = int(self.r)
        if r < 1:
            raise ValueError("rank r must be >= 1")
        z = tuple(as_scalar(v) for v in self.z)
        m = tuple(tuple(as_scalar(v) for v in row) for row in self.m)
        l = tuple(int(v) for v in self.l)
        if len(l) != r:
            raise ValueError(f"multidegree must have {r} entries, got {len(l)}")
        if any(v < 0 for v in l):
            raise ValueError("multidegree entries must be >= 0")
        if len(m) != len(z):
            raise ValueError("one weight row per singular point required")
        if any(len(row) != r + 1 for row in m):
            raise ValueError(f"weight rows must have length {r + 1}")
        exact = all(isinstance(v, QC) for v in z) and all(
            isinstance(v, QC) for row in m for v in row)
        zc = [as_complex(v) for v in z]
        for a, b in itertools.combinations(range(len(zc)), 2):
            if zc[a] == zc[b]:
                raise ValueError(f"singular points must be distinct: z[{a}] == z[{b}]")
        # Lambda_inf from the admissibility identity, with l_0 = l_{r+1} = 0.
        m_inf = []
        for i in range(r + 1):
            col = sum((row[i] for row in m), start=0)
            li = l[i] if i < r else 0
            lim1 = l[i - 1] if i >= 1 else 0
            m_inf.append(col - li + lim1)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "m_inf", tuple(m_inf))
        object.__setattr__(self, "exact", exact)

    # -- basic views ----------------------------------------------------------

    @property
    def n(self):
        return len(self.z)

    @property
    def l_total(self):
        return sum(self.l)

    def pairing(self, s, i):
        """(Lambda_s, alpha_i), 1-based i."""
        return pair_weight_root(self.m[s], i)

    def pairing_inf(self, i):
        return pair_weight_root(self.m_inf, i)

    def pair_matrix(self):
        """n x r complex array of (Lambda_s, alpha_i) values."""
        return np.array(
            [[as_complex(self.pairing(s, i + 1)) for i in range(self.r)]
             for s in range(self.n)],
            dtype=np.complex128,
        ).reshape(self.n, self.r)

    def z_array(self):
        return np.array([as_complex(v) for v in self.z], dtype=np.complex128)

    # -- classical (second-order) encoding -------------------------------------

    @classmethod
    def from_classical(cls, z, m_s, l):
        """Second-order problem with exponent parameters m_s at each z_s.

        Encodes rows (0, -m_s), so (Lambda_s, alpha_1) = m_s, the first
        quasi-factor is trivial, and the prescribed exponents at z_s come out
        as {0, m_s + 1}.
        """
        rows = [(0, -as_scalar(v)) for v in m_s]
        return cls(1, tuple(z), tuple(rows), (int(l),))

    def classical_exponents(self):
        """Recover the m_s parameters of the classical encoding (r=1 only)."""
        if self.r != 1:
            raise ValueError("classical exponents only exist for rank 1")
        return tuple(self.pairing(s, 1) for s in range(self.n))

    def is_classical_real(self, tol=INT_TOL):
        """Real sorted z with all classical m_s < 0 (Heine-Stieltjes regime)."""
        if self.r != 1:
            return False
        zc = [as_complex(v) for v in self.z]
        if any(abs(v.imag) > tol for v in zc):
            return False
        zs = [v.real for v in zc]
        if any(zs[i] >= zs[i + 1] for i in range(len(zs) - 1)):
            return False
        for s in range(self.n):
            a = as_complex(self.pairing(s, 1))
            if abs(a.imag) > tol or a.real >= 0:
                return False  # m_s = (Lambda_s, alpha_1) must be negative
        return True

    # -- JSON -------------------------------------------------------------------

    @classmethod
    def from_json(cls, obj):
        z = [pair_to_scalar(v) for v in obj["z"]]
        m = [[pair_to_scalar(v) for v in row] for row in obj["m"]]
        return cls(int(obj["r"]), tuple(z), tuple(m), tuple(obj["l"]))

    def to_json(self):
        return {
            "r": self.r,
            "z": [scalar_to_pair(v) for v in self.z],
            "m": [[scalar_to_pair(v) for v in row] for row in self.m],
            "l": list(self.l),
        }


def is_dominant_integral(m_row, tol=INT_TOL):
    """All (Lambda, alpha_i) nonnegative integers."""
    for i in range(1, len(m_row)):
        k = _near_int(pair_weight_root(m_row, i), tol)
        if k is None or k < 0:
            return False
    return True


def is_separating(ws, cap=DEFAULT_SEPARATING_CAP):
    """Exhaustively test the separating condition over 0 <= c_i <= l_i.

    Returns (True, None) when the quadratic expression
    (2 Lambda_inf + sum c_i alpha_i, sum c_i alpha_i) + 2 sum c_i
    stays away from zero for every nonzero integer vector c, and
    (False, c) with the first violating vector otherwise.
    """
    r = ws.r
    total = 1
    for li in ws.l:
        total *= li + 1
    if total - 1 > cap:
        raise ResourceLimit(
            f"separating check needs {total - 1} vectors, cap is {cap}")
    minf = [as_complex(v) for v in ws.m_inf]
    for c in itertools.product(*(range(li + 1) for li in ws.l)):
        if not any(c):
            continue
        # v = sum_i c_i alpha_i has gl coordinates v_j = c_j - c_{j-1}.
        expr = 2.0 * sum(c)
        for j in range(r + 1):
            cj = c[j] if j < r else 0
            cjm1 = c[j - 1] if j >= 1 else 0
            vj = cj - cjm1
            expr += (2 * minf[j] + vj) * vj
        if abs(expr) <= 1e-9:
            return False, c
    return True, None


def _positive_root_vectors(r):
    """Multidegree increments of the root vectors e_{a,b}, a > b."""
    out = []
    for b in range(1, r + 1):
        for a in range(b + 1, r + 2):
            v = [0] * r
            for j in range(b, a):
                v[j - 1] = 1
            out.append(tuple(v))
    return out


def _box_iter(l):
    return itertools.product(*(range(li + 1) for li in l))


def kostant_partitions(r, l):
    """Number of PBW monomials of U(n_-) in weight l.

    Counts multisets of positive roots of gl(r+1) summing to l, by dynamic
    programming over the roots (exact integer arithmetic throughout).
    """
    l = tuple(Multidegree(tuple(l)))
    dims = [li + 1 for li in l]
    size = 1
    for d in dims:
        size *= d
    strides = [0] * len(dims)
    acc = 1
    for i in range(len(dims) - 1, -1, -1):
        strides[i] = acc
        acc *= dims[i]
    dp = [0] * size
    dp[0] = 1
    for v in _positive_root_vectors(r):
        voff = sum(vi * st for vi, st in zip(v, strides))
        for w in _box_iter(l):
            if any(wi < vi for wi, vi in zip(w, v)):
                continue
            woff = sum(wi * st for wi, st in zip(w, strides))
            dp[woff] += dp[woff - voff]
    return dp[size - 1]


def d_dimension(k, r, l, cap=DEFAULT_CONVOLUTION_CAP):
    """dim of the weight-l part of the k-th tensor power of U(n_-).

    Convolution power of the Kostant partition table over the box 0..l.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    l = tuple(Multidegree(tuple(l)))
    dims = [li + 1 for li in l]
    size = 1
    for d in dims:
        size *= d
    if k * size * size > cap:
        raise ResourceLimit(
            f"convolution needs ~{k * size * size} terms, cap is {cap}")
    box = list(_box_iter(l))
    index = {w: i for i, w in enumerate(box)}
    kost = [0] * size
    for w in box:
        kost[index[w]] = kostant_partitions(r, w)
    cur = list(kost)
    for _ in range(k - 1):
        new = [0] * size
        for w in box:
            iw = index[w]
            if not any(w):
                new[iw] = cur[iw] * kost[0]
                continue
            acc = 0
            for v in _box_iter(w):
                cv = cur[index[v]]
                if cv:
                    kv = kost[index[tuple(wi - vi for wi, vi in zip(w, v))]]
                    if kv:
                        acc += cv * kv
            new[iw] = acc
        cur = new
    return cur[size - 1]


def sl2_multiplicity(m_s, m_inf):
    """Multiplicity of L_{m_inf} in the sl2 tensor product of the L_{m_s}.

    Iterated Clebsch-Gordan: fuse one factor at a time, keeping a multiset
    of highest weights.
    """
    m_s = [int(v) for v in m_s]
    m_inf = int(m_inf)
    if any(v < 0 for v in m_s) or m_inf < 0:
        raise ValueError("sl2 highest weights must be nonnegative integers")
    if (sum(m_s) - m_inf) % 2 != 0 or sum(m_s) < m_inf:
        return 0
    weights = {0: 1}
    for m in m_s:
        new = {}
        for h, mult in weights.items():
            for c in range(abs(h - m), h + m + 1, 2):
                new[c] = new.get(c, 0) + mult
        weights = new
    return weights.get(m_inf, 0)
