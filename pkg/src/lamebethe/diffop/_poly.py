"""Polynomials, rational functions, and quasi-polynomials over complex scalars.

Coefficients are either exact Gaussian rationals (QC) or plain complex
floats; a container is exact only when every scalar is.  Rational functions
keep their denominator as a multiset of factors: in the exact path the
fraction is collapsed and fully reduced by gcd after every operation, while
in the float path factors are never cancelled (silent float cancellation is
unsound), only tracked -- which also keeps degrees from compounding.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

import numpy as np

from .._scalars import QC, as_complex, as_scalar, exactify, scalar_to_pair


class ZeroInput(ValueError):
    """Logarithmic derivative of an identically zero function."""


def _normalize(coeffs):
    vals = [as_scalar(c) for c in coeffs]
    if not all(isinstance(v, QC) for v in vals):
        vals = [as_complex(v) for v in vals]
    while vals and not vals[-1]:
        vals.pop()
    return tuple(vals)


class Poly:
    """Dense univariate polynomial, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _normalize(coeffs)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def one(cls, exact=True):
        return cls((QC(1),) if exact else ((1 + 0j),))

    @classmethod
    def const(cls, c):
        return cls((c,))

    @classmethod
    def x(cls, exact=True):
        if exact:
            return cls((QC(0), QC(1)))
        return cls((0j, 1 + 0j))

    @classmethod
    def from_roots(cls, roots):
        p = None
        vals = [as_scalar(v) for v in roots]
        exact = all(isinstance(v, QC) for v in vals)
        p = cls.one(exact)
        for root in vals:
            p = p * cls((-root, QC(1) if exact else (1 + 0j)))
        return p

    # -- structure ------------------------------------------------------------

    @property
    def exact(self):
        return all(isinstance(c, QC) for c in self.coeffs)

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def to_float(self):
        return Poly(tuple(as_complex(c) for c in self.coeffs)) \
            if self.exact else self

    def coeffs_complex(self):
        return np.array([as_complex(c) for c in self.coeffs] or [0j],
                        dtype=np.complex128)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    # -- arithmetic -----------------------------------------------------------

    def _pair(self, other):
        if isinstance(other, Poly):
            a, b = self, other
        else:
            a, b = self, Poly((other,))
        if a.exact != b.exact:
            a, b = a.to_float(), b.to_float()
        return a, b

    def __add__(self, other):
        a, b = self._pair(other)
        n = max(len(a.coeffs), len(b.coeffs))
        out = []
        for i in range(n):
            ca = a.coeffs[i] if i < len(a.coeffs) else 0
            cb = b.coeffs[i] if i < len(b.coeffs) else 0
            out.append(ca + cb)
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        a, b = self._pair(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        if a.is_zero or b.is_zero:
            return Poly.zero()
        out = [a.coeffs[0] * 0] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, ca in enumerate(a.coeffs):
            for j, cb in enumerate(b.coeffs):
                out[i + j] = out[i + j] + ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def scale(self, c):
        return Poly(tuple(v * c for v in self.coeffs))

    def derivative(self):
        return Poly(tuple(self.coeffs[k] * k for k in range(1, len(self.coeffs))))

    def monic(self):
        if self.is_zero:
            return self
        lead = self.leading
        return Poly(tuple(c / lead for c in self.coeffs))

    def __divmod__(self, other):
        a, b = self._pair(other)
        if b.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(a.coeffs)
        db, lb = b.degree, b.leading
        if a.degree < db:
            return Poly.zero(), a
        quot = [a.coeffs[0] * 0] * (a.degree - db + 1)
        for k in range(a.degree - db, -1, -1):
            c = rem[k + db] / lb
            quot[k] = c
            if c:
                for j in range(db + 1):
                    rem[k + j] = rem[k + j] - c * b.coeffs[j]
        return Poly(quot), Poly(rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    # -- evaluation -----------------------------------------------------------

    def __call__(self, x):
        if self.is_zero:
            return QC(0) if (self.exact and exactify(x) is not None) else 0j
        xq = exactify(x)
        if self.exact and xq is not None:
            acc = QC(0)
            for c in reversed(self.coeffs):
                acc = acc * xq + c
            return acc
        xc = as_complex(x)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * xc + as_complex(c)
        return acc

    def evalv(self, xs):
        xs = np.asarray(xs, dtype=np.complex128)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = acc * xs + as_complex(c)
        return acc

    def ord_at(self, w):
        """Exact vanishing order at w (exact coefficients only)."""
        if not self.exact:
            raise ValueError("ord_at needs exact coefficients")
        wq = exactify(w)
        if wq is None:
            raise ValueError("ord_at needs an exact point")
        p, k = self, 0
        while not p.is_zero and p(wq) == QC(0):
            p = p.deflate(wq)
            k += 1
        return k

    def deflate(self, root):
        """Synthetic division by (x - root); remainder is dropped."""
        out = []
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * root + c
            out.append(acc)
        return Poly(tuple(reversed(out[:-1])))

    def roots(self, polish=True):
        """All complex roots (numpy companion matrix, Newton-polished)."""
        if self.degree < 1:
            return np.zeros(0, dtype=np.complex128)
        c = self.coeffs_complex()
        rts = np.roots(c[::-1])
        if polish:
            d = self.derivative()
            for _ in range(3):
                pv = self.evalv(rts)
                dv = d.evalv(rts)
                mask = np.abs(dv) > 1e-300
                rts = np.where(mask, rts - pv / np.where(mask, dv, 1), rts)
        return rts

    def to_json(self):
        return [scalar_to_pair(c) for c in self.coeffs]


def poly_gcd(a, b):
    """Monic gcd of exact polynomials (Euclid with monic normalization)."""
    if not (a.exact and b.exact):
        raise ValueError("gcd is exact-path only")
    while not b.is_zero:
        a, b = b, (a % b)
        if not b.is_zero:
            b = b.monic()
    if a.is_zero:
        return a
    return a.monic()


class RationalFn:
    """Quotient of polynomials with a factored denominator.

    den_factors maps factor polynomials to positive integer powers.  Exact
    instances collapse to a single fully reduced factor after every
    operation; float instances never cancel.
    """

    __slots__ = ("num", "den_factors")

    def __init__(self, num, den_factors=None, reduce=True):
        if not isinstance(num, Poly):
            num = Poly((num,))
        if den_factors is None:
            den_factors = {}
        if isinstance(den_factors, Poly):
            den_factors = {den_factors: 1}
        clean = {}
        for f, e in den_factors.items():
            if f.is_zero:
                raise ZeroDivisionError("zero denominator factor")
            if e < 0:
                raise ValueError("denominator powers must be positive")
            if e and f.degree >= 1:
                clean[f] = clean.get(f, 0) + e
            elif e:  # constant factor: fold into the numerator
                num = num * RationalFn._const_inverse(f.coeffs[0], e)
        self.num = num
        self.den_factors = clean
        if reduce and self.exact:
            self._reduce_exact()

    @staticmethod
    def _const_inverse(c, e):
        inv = 1 / c if not isinstance(c, QC) else QC(1) / c
        out = inv
        for _ in range(e - 1):
            out = out * inv
        return out

    # -- structure ------------------------------------------------------------

    @property
    def exact(self):
        return self.num.exact and all(f.exact for f in self.den_factors)

    @property
    def den(self):
        """Expanded denominator polynomial."""
        out = Poly.one(self.exact)
        for f, e in self.den_factors.items():
            for _ in range(e):
                out = out * f
        return out

    def _reduce_exact(self):
        den = self.den
        num = self.num
        if num.is_zero:
            self.den_factors = {}
            return
        g = poly_gcd(num, den)
        if g.degree >= 1:
            num = num // g
            den = den // g
        if den.degree >= 1:
            lead = den.leading
            den = den.monic()
            num = num.scale(QC(1) / lead)
            self.den_factors = {den: 1}
        else:
            num = num.scale(QC(1) / den.coeffs[0]) if not den.is_zero else num
            self.den_factors = {}
        self.num = num

    def is_zero(self):
        return self.num.is_zero

    def to_float(self):
        if not self.exact:
            return self
        return RationalFn(self.num.to_float(),
                          {f.to_float(): e for f, e in self.den_factors.items()},
                          reduce=False)

    # -- arithmetic -----------------------------------------------------------

    def _common(self, other):
        """Numerators over the union denominator (max powers per factor)."""
        union = dict(self.den_factors)
        for f, e in other.den_factors.items():
            union[f] = max(union.get(f, 0), e)
        def lift(rf):
            num = rf.num
            for f, e in union.items():
                missing = e - rf.den_factors.get(f, 0)
                for _ in range(missing):
                    num = num * f
            return num
        return lift(self), lift(other), union

    def _pair(self, other):
        if not isinstance(other, RationalFn):
            other = RationalFn(other if isinstance(other, Poly) else Poly((other,)))
        a, b = self, other
        if a.exact != b.exact:
            a, b = a.to_float(), b.to_float()
        return a, b

    def __add__(self, other):
        a, b = self._pair(other)
        na, nb, union = a._common(b)
        return RationalFn(na + nb, union)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, dict(self.den_factors), reduce=False)

    def __sub__(self, other):
        a, b = self._pair(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        union = dict(a.den_factors)
        for f, e in b.den_factors.items():
            union[f] = union.get(f, 0) + e
        return RationalFn(a.num * b.num, union)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._pair(other)
        if b.num.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        if b.num.degree >= 1:
            inv = RationalFn(b.den, {b.num: 1})
        else:
            inv = RationalFn(b.den.scale(
                RationalFn._const_inverse(b.num.coeffs[0], 1)), {})
        return a * inv

    def derivative(self):
        """(N / prod F^e)' without expanding the denominator."""
        if not self.den_factors:
            return RationalFn(self.num.derivative(), {})
        prod_f = Poly.one(self.exact)
        for f in self.den_factors:
            prod_f = prod_f * f
        term = self.num.derivative() * prod_f
        for f, e in self.den_factors.items():
            rest = Poly.one(self.exact)
            for g in self.den_factors:
                if g != f:
                    rest = rest * g
            term = term - self.num.scale(e) * f.derivative() * rest
        new_den = {f: e + 1 for f, e in self.den_factors.items()}
        return RationalFn(term, new_den)

    # -- evaluation -----------------------------------------------------------

    def __call__(self, x):
        num = self.num(x)
        den = None
        for f, e in self.den_factors.items():
            v = f(x)
            for _ in range(e):
                den = v if den is None else den * v
        if den is None:
            return num
        return num / den

    def evalv(self, xs):
        xs = np.asarray(xs, dtype=np.complex128)
        num = self.num.evalv(xs)
        den = np.ones_like(xs)
        for f, e in self.den_factors.items():
            den = den * f.evalv(xs) ** e
        return num / den

    def pole_candidates(self):
        """Float locations where the (unreduced) denominator vanishes."""
        out = []
        for f in self.den_factors:
            out.extend(f.roots())
        return np.array(out, dtype=np.complex128)

    def near_common_roots(self, tol=1e-8):
        """Float-path diagnostic: numerator roots within tol of a pole.

        These are reported, never cancelled.
        """
        if self.exact or self.num.degree < 1:
            return []
        nroots = self.num.roots()
        out = []
        for p in self.pole_candidates():
            d = np.abs(nroots - p)
            if d.size and d.min() < tol:
                out.append(complex(p))
        return out

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    def __repr__(self):
        return f"RationalFn({self.num!r} / {self.den!r})"


class QuasiPoly:
    """f(x) * prod_s (x - z_s)^{lam_s} with a polynomial factor f."""

    __slots__ = ("z", "lam", "poly")

    def __init__(self, z, lam, poly=None):
        self.z = tuple(as_scalar(v) for v in z)
        self.lam = tuple(as_scalar(v) for v in lam)
        if len(self.z) != len(self.lam):
            raise ValueError("one exponent per base point required")
        zc = [as_complex(v) for v in self.z]
        if len(set(zc)) != len(zc):
            raise ValueError("base points must be distinct")
        self.poly = poly if poly is not None else Poly.one(
            all(isinstance(v, QC) for v in self.z + self.lam))

    @property
    def exact(self):
        return (self.poly.exact
                and all(isinstance(v, QC) for v in self.z)
                and all(isinstance(v, QC) for v in self.lam))

    def log_derivative(self):
        """f'/f + sum_s lam_s / (x - z_s), as an exact rational function."""
        if self.poly.is_zero:
            raise ZeroInput("log-derivative of the zero quasi-polynomial")
        exact = self.exact
        one = QC(1) if exact else (1 + 0j)
        total = RationalFn(Poly.zero())
        if self.poly.degree >= 1:
            total = total + RationalFn(self.poly.derivative(), {self.poly: 1})
        for zs, lam in zip(self.z, self.lam):
            if lam == 0:
                continue
            lin = Poly((-zs, one))
            total = total + RationalFn(Poly((lam,)), {lin: 1})
        return total

    def eval_principal(self, x):
        """Value with the principal branch of every power factor."""
        xc = complex(x) if not isinstance(x, QC) else as_complex(x)
        acc = as_complex(self.poly(xc))
        for zs, lam in zip(self.z, self.lam):
            base = xc - as_complex(zs)
            if base == 0:
                raise ZeroDivisionError("evaluation at a base point")
            acc *= cmath.exp(as_complex(lam) * cmath.log(base))
        return acc

    def __repr__(self):
        return f"QuasiPoly(z={self.z!r}, lam={self.lam!r}, poly={self.poly!r})"
