"""Continued-fraction digit processes: exact tails, Monte Carlo, transfer operators."""

from fractions import Fraction

from . import _core
from ._core import (
    DomainError,
    InsufficientDigits,
    Refused,
    UnresolvedOrbit,
    entry_return,
    khinchin_stats,
    renewal_profile,
    returning_deviation,
    sample_digits,
    stopping_profile,
    z_tail,
)

__version__ = _core.__version__


def _s(x):
    return str(Fraction(x)) if not isinstance(x, str) else x


def cf_digits(x, max_len=64):
    return _core.cf_digits(_s(x), max_len)


def gauss_map(x):
    return Fraction(_core.gauss_map(_s(x)))


def farey_map(x):
    return Fraction(_core.farey_map(_s(x)))


def cylinder(word):
    lo, hi = _core.cylinder(list(word))
    return Fraction(lo), Fraction(hi)


def child_tail_measure(word, k):
    return Fraction(_core.child_tail_measure(list(word), k))


def exact_event_tail(event, n, x, y=0, cap=26):
    return Fraction(_core.exact_event_tail(event, n, _s(x), _s(y), cap))


def mc_event_tail(event, n, x, y=0, samples=100_000, seed=42, workers=0, family_a=1.0):
    return _core.mc_event_tail(event, n, _s(x), _s(y), samples, seed, workers, family_a)


def limit_constant(event, x, y=0):
    return _core.limit_constant(event, _s(x), _s(y))
