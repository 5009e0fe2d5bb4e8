"""Builtin functions callable from model expressions.

Arguments may be integers, exact rationals (from decimal literals) or, for
``dist``, coordinate tuples taken from array rows.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from gtnmc.errors import EvalFault


def round_half_up_sqrt(n: int) -> int:
    """``floor(sqrt(n) + 1/2)`` computed exactly for a non-negative integer."""
    r = math.isqrt(n)
    # sqrt(n) > r + 1/2  <=>  n > r*r + r + 1/4  <=>  n - r*r > r   (integers)
    return r + 1 if n - r * r > r else r


def dist(*args) -> int:
    """Integer Euclidean distance, rounded half-up.

    ``dist(p, q)`` with two coordinate rows or ``dist(x1, y1, x2, y2)``.
    """
    if len(args) == 2:
        p, q = args
        if not isinstance(p, tuple) or not isinstance(q, tuple) or len(p) != len(q):
            raise EvalFault("dist expects two coordinate rows of equal length")
        coords = list(zip(p, q))
    elif len(args) == 4:
        coords = [(args[0], args[2]), (args[1], args[3])]
    else:
        raise EvalFault("dist expects 2 rows or 4 scalars")
    sq = 0
    for a, b in coords:
        d = a - b
        sq += d * d
    if isinstance(sq, int):
        return round_half_up_sqrt(sq)
    return math.floor(math.sqrt(sq) + 0.5)


def floor_(x) -> int:
    if isinstance(x, int):
        return x
    return math.floor(x)


def ceil_(x) -> int:
    if isinstance(x, int):
        return x
    return math.ceil(x)


def power(base, exp):
    """``base ^ exp``: exact for integer exponents, float otherwise."""
    if isinstance(exp, int) or (isinstance(exp, Fraction) and exp.denominator == 1):
        exp = int(exp)
        if exp >= 0:
            return base**exp
        if base == 0:
            raise EvalFault("zero raised to a negative power")
        return Fraction(base) ** exp
    if base < 0:
        raise EvalFault("negative base with fractional exponent")
    return float(base) ** float(exp)


def log_(x, base=None):
    if x <= 0:
        raise EvalFault("logarithm of a non-positive value")
    if base is None:
        return math.log(x)
    if base <= 0 or base == 1:
        raise EvalFault("invalid logarithm base")
    return math.log(x) / math.log(base)


def exp_(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def div(a, b):
    """Division: truncating for integers (C#-style), exact for rationals."""
    if b == 0:
        raise EvalFault("division by zero")
    if isinstance(a, int) and isinstance(b, int):
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return Fraction(a) / b


def mod(a, b):
    """Remainder with the sign of the dividend."""
    if b == 0:
        raise EvalFault("modulo by zero")
    if isinstance(a, int) and isinstance(b, int):
        return a - b * div(a, b)
    return math.fmod(a, b)


def _min(*xs):
    return min(xs)


def _max(*xs):
    return max(xs)


def _abs(x):
    return abs(x)


def _sqrt(x):
    if x < 0:
        raise EvalFault("square root of a negative value")
    if isinstance(x, int):
        r = math.isqrt(x)
        if r * r == x:
            return r
    return math.sqrt(x)


# name -> (callable, min arity, max arity)
BUILTINS = {
    "floor": (floor_, 1, 1),
    "ceil": (ceil_, 1, 1),
    "abs": (_abs, 1, 1),
    "min": (_min, 2, 16),
    "max": (_max, 2, 16),
    "pow": (power, 2, 2),
    "log": (log_, 1, 2),
    "exp": (exp_, 1, 1),
    "sqrt": (_sqrt, 1, 1),
    "dist": (dist, 2, 4),
}

# builtins accepting array rows as arguments
ROW_ARGS = {"dist"}


def to_int(x) -> int:
    """Coerce an evaluated value to the integer stored in a variable (floor)."""
    if type(x) is int:
        return x
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, Rational):
        return math.floor(x)
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            raise EvalFault(f"cannot store {x} in an integer variable")
        return math.floor(x)
    raise EvalFault(f"cannot store {x!r} in an integer variable")
