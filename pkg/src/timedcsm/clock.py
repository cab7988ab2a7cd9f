"""Clock constraints, exact clock valuations and the region abstraction.

Valuations are plain ``dict`` objects mapping clock names to
``fractions.Fraction``.  Regions are canonical and hashable; fractional
classes are kept greatest fractional part first.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ConstantExceedsBound, NegativeDelta, TcsmError, UnknownClock

OPS = ("<", "<=", ">", ">=")


@dataclass(frozen=True, slots=True)
class Bound:
    clock: str
    op: str
    const: int

    def __post_init__(self):
        if self.op not in OPS:
            raise TcsmError(f"unknown comparison {self.op!r}")
        if not isinstance(self.const, int) or isinstance(self.const, bool) or self.const < 0:
            raise TcsmError(f"clock constants must be natural numbers, got {self.const!r}")

    def holds(self, value) -> bool:
        if self.op == "<":
            return value < self.const
        if self.op == "<=":
            return value <= self.const
        if self.op == ">":
            return value > self.const
        return value >= self.const

    def __str__(self):
        return f"{self.clock} {self.op} {self.const}"


@dataclass(frozen=True, slots=True)
class ClockConstraint:
    """Conjunction of simple bounds; the empty conjunction means no constraint."""

    bounds: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(self.bounds))

    @property
    def clocks(self) -> frozenset:
        return frozenset(b.clock for b in self.bounds)

    def __and__(self, other: "ClockConstraint") -> "ClockConstraint":
        return ClockConstraint(self.bounds + other.bounds)

    def restrict(self, clocks) -> "ClockConstraint":
        return ClockConstraint(tuple(b for b in self.bounds if b.clock in clocks))

    def __str__(self):
        if not self.bounds:
            return "true"
        return " & ".join(str(b) for b in self.bounds)


NO_CONSTRAINT = ClockConstraint(())

_BOUND_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*(<=|>=|<|>)\s*(\S+)\s*\Z")


def parse_constraint(text: str) -> ClockConstraint:
    """Parse ``true`` or ``&``-joined ``clock OP NAT`` atoms."""
    text = text.strip()
    if text in ("", "true"):
        return NO_CONSTRAINT
    bounds = []
    for part in text.split("&"):
        m = _BOUND_RE.match(part)
        if not m:
            raise TcsmError(f"malformed clock bound {part.strip()!r}")
        clock, op, const = m.groups()
        if not re.fullmatch(r"[0-9]+", const):
            raise TcsmError(f"non-integer constant {const!r} in clock bound (rescale the model)")
        bounds.append(Bound(clock, op, int(const)))
    return ClockConstraint(tuple(bounds))


def eval_constraint(pi: ClockConstraint, nu: Mapping) -> bool:
    for b in pi.bounds:
        if b.clock not in nu:
            raise UnknownClock(f"valuation has no value for clock {b.clock!r}")
        if not b.holds(nu[b.clock]):
            return False
    return True


def transform(nu: Mapping, delta=0, resets: Iterable = ()) -> dict:
    """nu + delta, then reset the clocks in ``resets`` to zero."""
    delta = Fraction(delta)
    if delta < 0:
        raise NegativeDelta(f"delay must be nonnegative, got {delta}")
    resets = frozenset(resets)
    unknown = resets - nu.keys()
    if unknown:
        raise UnknownClock(f"cannot reset unknown clocks {sorted(unknown)}")
    return {x: Fraction(0) if x in resets else Fraction(v) + delta for x, v in nu.items()}


def _frac(v):
    return v - math.floor(v)


@dataclass(frozen=True)
class Region:
    """A clock region.

    ``ints`` covers exactly the clocks not in ``beyond``; ``fracs`` lists
    classes of equal nonzero fractional part, greatest first.
    """

    bounds: tuple
    ints: tuple
    zero: frozenset
    fracs: tuple
    beyond: frozenset

    @classmethod
    def make(cls, bounds: Mapping, ints: Mapping, zero=(), fracs=(), beyond=()):
        region = cls(
            tuple(sorted(bounds.items())),
            tuple(sorted(ints.items())),
            frozenset(zero),
            tuple(frozenset(c) for c in fracs),
            frozenset(beyond),
        )
        region.validate()
        return region

    @property
    def clocks(self) -> frozenset:
        return frozenset(x for x, _ in self.bounds)

    @property
    def bounds_map(self) -> dict:
        return dict(self.bounds)

    @property
    def ints_map(self) -> dict:
        return dict(self.ints)

    def validate(self):
        clocks = self.clocks
        parts = [self.zero, self.beyond, *self.fracs]
        if any(not c for c in self.fracs):
            raise TcsmError("empty fractional class")
        if sum(len(p) for p in parts) != len(clocks) or frozenset().union(*parts) != clocks:
            raise TcsmError("region sets do not partition the clocks")
        bounds = self.bounds_map
        ints = self.ints_map
        if set(ints) != clocks - self.beyond:
            raise TcsmError("integral parts must cover exactly the bounded clocks")
        for x, n in ints.items():
            if not 0 <= n <= bounds[x]:
                raise TcsmError(f"integral part of {x!r} out of range")
            if n == bounds[x] and x not in self.zero:
                raise TcsmError(f"clock {x!r} at its bound with a fractional part is beyond")

    def descriptor(self) -> str:
        ints = ",".join(f"{x}:{n}" for x, n in self.ints)
        zero = ",".join(sorted(self.zero))
        order = "".join("(" + ",".join(sorted(c)) + ")" for c in self.fracs)
        beyond = ",".join(sorted(self.beyond))
        return f"ints={ints} zero={zero} order={order} beyond={beyond}"

    def __str__(self):
        return self.descriptor()


_DESC_RE = re.compile(r"ints=(\S*) zero=(\S*) order=(\S*) beyond=(\S*)\Z")


def parse_descriptor(text: str, bounds: Mapping) -> Region:
    m = _DESC_RE.match(text.strip())
    if not m:
        raise TcsmError(f"malformed region descriptor {text!r}")
    ints_s, zero_s, order_s, beyond_s = m.groups()

    def names(s):
        return [x for x in s.split(",") if x]

    ints = {}
    for item in names(ints_s):
        x, _, n = item.partition(":")
        if not n.isdigit():
            raise TcsmError(f"malformed integral part {item!r}")
        ints[x] = int(n)
    fracs = []
    if order_s:
        if not (order_s.startswith("(") and order_s.endswith(")")):
            raise TcsmError(f"malformed fractional order {order_s!r}")
        fracs = [names(c) for c in order_s[1:-1].split(")(")]
    unknown = (set(ints) | set(names(zero_s)) | set(names(beyond_s))
               | {x for c in fracs for x in c}) - set(bounds)
    if unknown:
        raise UnknownClock(f"region mentions undeclared clocks {sorted(unknown)}")
    return Region.make(bounds, ints, names(zero_s), fracs, names(beyond_s))


def zero_region(bounds: Mapping) -> Region:
    return Region.make(bounds, {x: 0 for x in bounds}, zero=bounds.keys())


def region_of(nu: Mapping, bounds: Mapping) -> Region:
    if set(nu) != set(bounds):
        raise UnknownClock(
            f"valuation clocks {sorted(nu)} differ from bounded clocks {sorted(bounds)}"
        )
    beyond, zero, ints = set(), set(), {}
    by_frac = {}
    for x, v in nu.items():
        v = Fraction(v)
        if v > bounds[x]:
            beyond.add(x)
            continue
        ints[x] = math.floor(v)
        f = _frac(v)
        if f == 0:
            zero.add(x)
        else:
            by_frac.setdefault(f, set()).add(x)
    fracs = [by_frac[f] for f in sorted(by_frac, reverse=True)]
    return Region.make(bounds, ints, zero, fracs, beyond)


def representative(region: Region) -> dict:
    """A valuation inside ``region`` (fractions k/(m+1), beyond clocks at c+1)."""
    m = len(region.fracs)
    ints = region.ints_map
    nu = {}
    for x in region.zero:
        nu[x] = Fraction(ints[x])
    for k, cls in enumerate(region.fracs, start=1):
        for x in cls:
            nu[x] = ints[x] + Fraction(m - k + 1, m + 1)
    bounds = region.bounds_map
    for x in region.beyond:
        nu[x] = Fraction(bounds[x] + 1)
    return nu


def time_successor(region: Region) -> Region:
    """The next region reached by letting time pass (the region itself once all clocks are beyond)."""
    bounds = region.bounds_map
    ints = region.ints_map
    if region.zero:
        at_bound = {x for x in region.zero if ints[x] == bounds[x]}
        moving = region.zero - at_bound
        for x in at_bound:
            del ints[x]
        fracs = list(region.fracs)
        if moving:
            fracs.append(moving)
        return Region.make(bounds, ints, (), fracs, region.beyond | at_bound)
    if not region.fracs:
        return region
    top = region.fracs[0]
    for x in top:
        ints[x] += 1
    return Region.make(bounds, ints, top, region.fracs[1:], region.beyond)


def reset_region(region: Region, clocks: Iterable) -> Region:
    clocks = frozenset(clocks)
    if not clocks:
        return region
    unknown = clocks - region.clocks
    if unknown:
        raise UnknownClock(f"cannot reset unknown clocks {sorted(unknown)}")
    ints = region.ints_map
    for x in clocks:
        ints[x] = 0
    fracs = [c - clocks for c in region.fracs]
    return Region.make(
        region.bounds_map,
        ints,
        region.zero | clocks,
        [c for c in fracs if c],
        region.beyond - clocks,
    )


def project_region(region: Region, clocks: Iterable) -> Region:
    """Restrict ``region`` to a subset of its clocks, dropping emptied classes."""
    clocks = frozenset(clocks)
    unknown = clocks - region.clocks
    if unknown:
        raise UnknownClock(f"cannot project onto unknown clocks {sorted(unknown)}")
    fracs = [c & clocks for c in region.fracs]
    return Region.make(
        {x: c for x, c in region.bounds if x in clocks},
        {x: n for x, n in region.ints if x in clocks},
        region.zero & clocks,
        [c for c in fracs if c],
        region.beyond & clocks,
    )


def _bound_agrees(b: Bound, region: Region, ints: dict) -> bool:
    x = b.clock
    if b.op in ("<", ">="):
        lt = x not in region.beyond and ints[x] < b.const
        return lt if b.op == "<" else not lt
    le = x not in region.beyond and (
        ints[x] < b.const or (ints[x] == b.const and x in region.zero)
    )
    return le if b.op == "<=" else not le


def constraint_agrees(pi: ClockConstraint, region: Region) -> bool:
    """Whether every valuation in ``region`` satisfies ``pi``."""
    bounds = region.bounds_map
    ints = region.ints_map
    for b in pi.bounds:
        if b.clock not in bounds:
            raise UnknownClock(f"constraint mentions unknown clock {b.clock!r}")
        if b.const > bounds[b.clock]:
            raise ConstantExceedsBound(
                f"constant {b.const} exceeds bound {bounds[b.clock]} of clock {b.clock!r}"
            )
        if not _bound_agrees(b, region, ints):
            return False
    return True


def nat_extend(region: Region, op: str, clock: str, n: int):
    """Assign or increment a clock by a natural number.

    Returns the new region together with the (possibly enlarged) bounds.
    """
    if clock not in region.clocks:
        raise UnknownClock(f"unknown clock {clock!r}")
    if not isinstance(n, int) or n < 0:
        raise TcsmError(f"expected a natural number, got {n!r}")
    bounds = region.bounds_map
    ints = region.ints_map
    if op == "assign":
        bounds[clock] = max(bounds[clock], n)
        ints[clock] = n
        fracs = [c - {clock} for c in region.fracs]
        result = Region.make(
            bounds, ints, region.zero | {clock}, [c for c in fracs if c], region.beyond - {clock}
        )
    elif op == "increment":
        bounds[clock] += n
        if clock not in region.beyond:
            ints[clock] += n
        result = Region.make(bounds, ints, region.zero, region.fracs, region.beyond)
    else:
        raise TcsmError(f"unknown natural-number operation {op!r}")
    return result, bounds


def _ordered_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    for size in range(1, len(items) + 1):
        for first in itertools.combinations(items, size):
            rest = [x for x in items if x not in first]
            for tail in _ordered_partitions(rest):
                yield [frozenset(first)] + tail


def all_regions(bounds: Mapping):
    """Every canonical region over ``bounds`` (sorted by descriptor)."""
    clocks = sorted(bounds)
    result = []
    for mask in itertools.product((False, True), repeat=len(clocks)):
        beyond = [x for x, b in zip(clocks, mask) if b]
        bounded = [x for x, b in zip(clocks, mask) if not b]
        for values in itertools.product(*(range(bounds[x] + 1) for x in bounded)):
            ints = dict(zip(bounded, values))
            forced = [x for x in bounded if ints[x] == bounds[x]]
            free = [x for x in bounded if ints[x] < bounds[x]]
            for zmask in itertools.product((False, True), repeat=len(free)):
                zero = set(forced) | {x for x, z in zip(free, zmask) if z}
                fractional = [x for x, z in zip(free, zmask) if not z]
                for fracs in _ordered_partitions(fractional):
                    result.append(Region.make(bounds, ints, zero, fracs, beyond))
    result.sort(key=Region.descriptor)
    return result


def region_count_bound(bounds: Mapping) -> int:
    """|X|! * 2^|X| * prod(2 c_x + 2), the classic upper bound on the region count."""
    n = len(bounds)
    return math.factorial(n) * 2 ** n * math.prod(2 * c + 2 for c in bounds.values())
