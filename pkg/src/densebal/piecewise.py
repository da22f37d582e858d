"""Continuous piecewise-linear functions on the real line with affine tails.

Coordinates are exact Fractions whenever every input is an int or Fraction,
and floats otherwise; all operations preserve the mode (mixed operands drop
to float).  Exactness matters because the tree recursions compound many
compositions and the oracles they feed are exact rationals.

Breakpoint growth is kept in check by merging collinear segments after every
operation; a hard cap triggers coarsening and sets the `coarsened` flag (the
function is then an approximation, also in exact mode).
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction

MAX_BREAKPOINTS = 100_000


def _normalize(vals):
    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    if exact:
        return [Fraction(v) for v in vals], True
    return [float(v) for v in vals], False


class PiecewiseLinear:
    """y = f(x), linear between breakpoints, affine beyond them."""

    __slots__ = ("xs", "ys", "lo_slope", "hi_slope", "exact", "coarsened")

    def __init__(self, xs, ys, lo_slope, hi_slope, coarsened=False):
        if len(xs) != len(ys) or not xs:
            raise ValueError("need matching non-empty breakpoint lists")
        coords, exact = _normalize(list(xs) + list(ys) + [lo_slope, hi_slope])
        k = len(xs)
        self.xs = coords[:k]
        self.ys = coords[k:2 * k]
        self.lo_slope = coords[2 * k]
        self.hi_slope = coords[2 * k + 1]
        self.exact = exact
        self.coarsened = coarsened
        for a, b in zip(self.xs, self.xs[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")
        self._simplify()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def identity(cls) -> "PiecewiseLinear":
        return cls([0], [0], 1, 1)

    @classmethod
    def constant(cls, c) -> "PiecewiseLinear":
        return cls([0], [c], 0, 0)

    @classmethod
    def affine_fn(cls, a, b) -> "PiecewiseLinear":
        """x -> a x + b."""
        return cls([0], [b], a, a)

    # -- evaluation ------------------------------------------------------------

    def __call__(self, x):
        xs, ys = self.xs, self.ys
        if x <= xs[0]:
            return ys[0] + self.lo_slope * (x - xs[0])
        if x >= xs[-1]:
            return ys[-1] + self.hi_slope * (x - xs[-1])
        i = bisect_right(xs, x) - 1
        t = (x - xs[i]) / (xs[i + 1] - xs[i])
        return ys[i] + t * (ys[i + 1] - ys[i])

    def piece_slopes(self):
        """Slopes left tail, interior pieces, right tail."""
        inner = [(y2 - y1) / (x2 - x1)
                 for (x1, x2, y1, y2) in zip(self.xs, self.xs[1:], self.ys, self.ys[1:])]
        return [self.lo_slope] + inner + [self.hi_slope]

    def is_nondecreasing(self) -> bool:
        return all(s >= 0 for s in self.piece_slopes())

    def is_strictly_increasing(self) -> bool:
        return all(s > 0 for s in self.piece_slopes())

    # -- algebra ---------------------------------------------------------------

    def _rebuild(self, xs, ys, lo, hi, coarsened):
        return PiecewiseLinear(xs, ys, lo, hi, coarsened=coarsened)

    def add(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        xs = sorted(set(self.xs) | set(other.xs))
        ys = [self(x) + other(x) for x in xs]
        return self._rebuild(xs, ys, self.lo_slope + other.lo_slope,
                             self.hi_slope + other.hi_slope,
                             self.coarsened or other.coarsened)

    def __add__(self, other):
        return self.add(other)

    def affine(self, a, b) -> "PiecewiseLinear":
        """Pointwise a * f + b (a may be negative or zero)."""
        ys = [a * y + b for y in self.ys]
        return self._rebuild(list(self.xs), ys, a * self.lo_slope, a * self.hi_slope,
                             self.coarsened)

    def clamp(self, lo=0, hi=1) -> "PiecewiseLinear":
        """Pointwise min(hi, max(lo, f)); inserts the band-crossing breakpoints."""
        cand = set(self.xs)
        pieces = []
        pieces.append((self.xs[0], self.ys[0], self.lo_slope, "lo"))
        for (x1, x2, y1, y2) in zip(self.xs, self.xs[1:], self.ys, self.ys[1:]):
            pieces.append(((x1, x2), (y1, y2), None, "mid"))
        pieces.append((self.xs[-1], self.ys[-1], self.hi_slope, "hi"))
        for level in (lo, hi):
            for p in pieces:
                if p[3] == "mid":
                    (x1, x2), (y1, y2) = p[0], p[1]
                    if (y1 - level) * (y2 - level) < 0:
                        cand.add(x1 + (level - y1) * (x2 - x1) / (y2 - y1))
                else:
                    x0, y0, s = p[0], p[1], p[2]
                    if s != 0:
                        xc = x0 + (level - y0) / s
                        if (p[3] == "lo" and xc < x0) or (p[3] == "hi" and xc > x0):
                            cand.add(xc)
        xs = sorted(cand)
        ys = [min(hi, max(lo, self(x))) for x in xs]
        return self._rebuild(xs, ys, 0 * self.lo_slope, 0 * self.hi_slope, self.coarsened)

    def inverse(self) -> "PiecewiseLinear":
        if not self.is_strictly_increasing():
            raise ValueError("inverse requires a strictly increasing function")
        return self._rebuild(list(self.ys), list(self.xs),
                             1 / self.lo_slope, 1 / self.hi_slope, self.coarsened)

    def compose(self, inner: "PiecewiseLinear") -> "PiecewiseLinear":
        """self(inner(x)); inner must be a strictly increasing bijection of R."""
        inner_inv = inner.inverse()
        cand = set(inner.xs)
        for bx in self.xs:
            cand.add(inner_inv(bx))
        xs = sorted(cand)
        ys = [self(inner(x)) for x in xs]
        return self._rebuild(xs, ys, self.lo_slope * inner.lo_slope,
                             self.hi_slope * inner.hi_slope,
                             self.coarsened or inner.coarsened)

    def root(self):
        """The unique zero of a strictly monotone function."""
        slopes = self.piece_slopes()
        increasing = all(s >= 0 for s in slopes)
        decreasing = all(s <= 0 for s in slopes)
        if not (increasing or decreasing) or all(s == 0 for s in slopes):
            raise ValueError("root requires a strictly monotone function")
        xs, ys = self.xs, self.ys
        sgn = 1 if increasing else -1
        if sgn * ys[0] >= 0:
            if self.lo_slope == 0:
                if ys[0] == 0:
                    return xs[0]
                raise ValueError("no zero on the left tail")
            return xs[0] - ys[0] / self.lo_slope
        for i in range(len(xs) - 1):
            if sgn * ys[i + 1] >= 0:
                return xs[i] + (0 - ys[i]) * (xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i])
        if self.hi_slope == 0:
            raise ValueError("no zero on the right tail")
        return xs[-1] - ys[-1] / self.hi_slope

    # -- maintenance -----------------------------------------------------------

    def _collinear(self, s1, s2):
        if self.exact:
            return s1 == s2
        return abs(s1 - s2) <= 1e-13 * (1 + abs(s1) + abs(s2))

    def _simplify(self):
        if len(self.xs) > 1:
            keep_x, keep_y = self.xs, self.ys
            # drop interior points whose neighboring slopes agree
            xs2, ys2 = [keep_x[0]], [keep_y[0]]
            for i in range(1, len(keep_x) - 1):
                s1 = (keep_y[i] - ys2[-1]) / (keep_x[i] - xs2[-1])
                s2 = (keep_y[i + 1] - keep_y[i]) / (keep_x[i + 1] - keep_x[i])
                if not self._collinear(s1, s2):
                    xs2.append(keep_x[i])
                    ys2.append(keep_y[i])
            xs2.append(keep_x[-1])
            ys2.append(keep_y[-1])
            # trim endpoints collinear with their tails
            while len(xs2) > 1 and self._collinear((ys2[1] - ys2[0]) / (xs2[1] - xs2[0]),
                                                   self.lo_slope):
                xs2.pop(0)
                ys2.pop(0)
            while len(xs2) > 1 and self._collinear((ys2[-1] - ys2[-2]) / (xs2[-1] - xs2[-2]),
                                                   self.hi_slope):
                xs2.pop()
                ys2.pop()
            self.xs, self.ys = xs2, ys2
        if len(self.xs) > MAX_BREAKPOINTS:
            step = -(-len(self.xs) // MAX_BREAKPOINTS)
            idx = list(range(0, len(self.xs) - 1, step)) + [len(self.xs) - 1]
            self.xs = [self.xs[i] for i in idx]
            self.ys = [self.ys[i] for i in idx]
            self.coarsened = True

    def to_float(self) -> "PiecewiseLinear":
        return PiecewiseLinear([float(x) for x in self.xs], [float(y) for y in self.ys],
                               float(self.lo_slope), float(self.hi_slope),
                               coarsened=self.coarsened)

    def as_json(self) -> dict:
        return {
            "x": [float(v) for v in self.xs],
            "y": [float(v) for v in self.ys],
            "lo_slope": float(self.lo_slope),
            "hi_slope": float(self.hi_slope),
            "exact": self.exact,
            "coarsened": self.coarsened,
        }

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"PiecewiseLinear({len(self.xs)} breakpoints, {mode})"
