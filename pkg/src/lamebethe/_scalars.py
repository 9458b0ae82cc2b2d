"""Scalar coercion rules: exact Gaussian rationals vs complex floats.

Every container in the package (weight data, polynomial coefficients) is
either *exact* (all scalars are `QC`, complex numbers with Fraction parts)
or *float* (plain `complex`).  Exactness is decided at construction time:
ints and Fractions stay exact, anything float-valued demotes the whole
container to complex arithmetic.
"""

from __future__ import annotations

from fractions import Fraction


class QC:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QC):
            return other
        if isinstance(other, (int, Fraction)):
            return QC(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        return QC(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other
        return QC(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self)
        return QC(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        return QC(self.re * o.re - self.im * o.im,
                  self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero QC")
        return QC((self.re * o.re + self.im * o.im) / n,
                  (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return complex(self) ** k
        out, base = QC(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparisons / conversions ------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) == other
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"QC({self.re})"
        return f"QC({self.re}, {self.im})"

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def conjugate(self):
        return QC(self.re, -self.im)


def exactify(v):
    """Return v as a QC if it is exactly representable, else None."""
    if isinstance(v, QC):
        return v
    if isinstance(v, (int, Fraction)):
        return QC(v)
    if isinstance(v, bool):
        return QC(int(v))
    return None


def as_scalar(v):
    """Coerce a user-supplied number to a package scalar (QC or complex)."""
    q = exactify(v)
    if q is not None:
        return q
    return complex(v)


def as_complex(v):
    """Down-convert any package scalar to a plain complex float."""
    if isinstance(v, QC):
        return complex(v)
    return complex(v)


def all_exact(values):
    return all(isinstance(v, QC) for v in values)


def pair_to_scalar(pair):
    """[re, im] JSON pair (or bare number) -> QC when both parts are ints."""
    if isinstance(pair, (list, tuple)):
        if len(pair) != 2:
            raise ValueError(f"complex value must be a [re, im] pair, got {pair!r}")
        re, im = pair
    else:
        re, im = pair, 0
    if isinstance(re, int) and isinstance(im, int):
        return QC(re, im)
    return complex(re, im)


def scalar_to_pair(v):
    """Package scalar -> [re, im] JSON pair (floats)."""
    c = as_complex(v)
    return [c.real, c.imag]
