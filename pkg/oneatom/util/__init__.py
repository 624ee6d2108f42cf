"""Phase arithmetic done in extended precision.

Fast phases such as Omega12*t reach hundreds of radians while the quantities of
interest are differences of a few tenths of a radian, so products are formed and
reduced with mpmath before returning to double precision.

Each thread works in its own mpmath context; the shared ``mpmath.mp`` precision
is never touched, so the helpers are safe under the experiment thread pools.
"""
import math
import threading

from mpmath import MPContext

PRECISION_DIGITS = 40
TWO_PI = 2.0 * math.pi

_local = threading.local()


def _context() -> MPContext:
    ctx = getattr(_local, "context", None)
    if ctx is None:
        ctx = MPContext()
        ctx.dps = PRECISION_DIGITS
        _local.context = ctx
    return ctx


def reduce_phase(*terms) -> float:
    """Sum of ``(factor, factor)`` products or plain numbers, reduced to [0, 2pi)."""
    ctx = _context()
    total = ctx.mpf(0)
    for term in terms:
        if isinstance(term, tuple):
            product = ctx.mpf(1)
            for factor in term:
                product *= ctx.mpf(factor)
            total += product
        else:
            total += ctx.mpf(term)
    reduced = ctx.fmod(total, 2 * ctx.pi)
    if reduced < 0:
        reduced += 2 * ctx.pi
    return float(reduced)


def wrap_phase(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, TWO_PI)
    if wrapped == -math.pi:
        return math.pi
    return wrapped


def phase_distance(a: float, b: float, period: float = TWO_PI) -> float:
    """Circular distance between two angles on a circle of the given period."""
    d = math.fmod(abs(a - b), period)
    return min(d, period - d)


def scaled_sine(amplitude: float, rate: float, t: float) -> float:
    """amplitude * sin(rate * t) with the argument formed in extended precision."""
    ctx = _context()
    return float(ctx.mpf(amplitude) * ctx.sin(ctx.mpf(rate) * ctx.mpf(t)))


def reduced_angle(rate: float, t: float) -> float:
    """rate * t reduced to [0, 2pi)."""
    return reduce_phase((rate, t))


def excess_over_sine(amplitude: float, rate: float, t: float) -> float:
    """amplitude * (x - sin x) with x = rate * t; non-negative for amplitude >= 0."""
    ctx = _context()
    x = ctx.mpf(rate) * ctx.mpf(t)
    return float(ctx.mpf(amplitude) * (x - ctx.sin(x)))
