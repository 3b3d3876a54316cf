"""Truncated power series over a free monoid with Laurent monomials.

A :class:`TruncatedSeries` is an element of ``k[M][Q] / m_Q^(order+1)`` where
``Q = N^q`` is a free commutative monoid with positive integer degree
weights and ``M = Z^rank``.  A term ``c t^q z^m`` is stored under the key
``(q, m)``; coefficients are ``int`` or ``Fraction``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import DimensionError, DomainError, NotInvertibleError
from .lattice import LatticeMap


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def format_rational(c) -> str:
    """Render a rational as ``"p/q"`` in lowest terms (``"p"`` when integral)."""
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def parse_rational(s) -> int | Fraction:
    if isinstance(s, int):
        return s
    if not isinstance(s, str):
        raise DomainError(f"rational must be a string, got {s!r}")
    return _norm(Fraction(s))


class MonoidContext:
    """The free monoid ``N^q`` with named generators and degree weights."""

    __slots__ = ("names", "weights")

    def __init__(self, names: Sequence[str], weights: Sequence[int] | None = None):
        names = tuple(str(n) for n in names)
        if weights is None:
            weights = (1,) * len(names)
        weights = tuple(int(w) for w in weights)
        if len(weights) != len(names):
            raise DimensionError("one weight per generator")
        if any(w <= 0 for w in weights):
            raise DomainError("degree weights must be positive")
        if len(set(names)) != len(names):
            raise DomainError("generator names must be distinct")
        self.names = names
        self.weights = weights

    @classmethod
    def free(cls, n: int, prefix: str = "t", start: int = 1) -> "MonoidContext":
        return cls([f"{prefix}{i + start}" for i in range(n)])

    @property
    def q_rank(self) -> int:
        return len(self.names)

    @property
    def generator_names(self):
        return self.names

    @property
    def q_degree_weights(self):
        return self.weights

    def degree(self, q: Sequence[int]) -> int:
        return sum(w * x for w, x in zip(self.weights, q))

    def zero(self) -> tuple:
        return (0,) * len(self.names)

    def generator(self, i: int) -> tuple:
        return tuple(int(j == i) for j in range(len(self.names)))

    def __eq__(self, other):
        return (isinstance(other, MonoidContext) and self.names == other.names
                and self.weights == other.weights)

    def __hash__(self):
        return hash((self.names, self.weights))

    def __repr__(self):
        return f"MonoidContext({list(self.names)}, {list(self.weights)})"


class TruncatedSeries:
    """Immutable truncated series ``sum c t^q z^m`` with q-degree at most ``order``."""

    __slots__ = ("context", "rank", "order", "_coeffs", "_sorted", "_hash")

    def __init__(self, context: MonoidContext, rank: int, order: int,
                 coeffs: Mapping[tuple, object] | None = None, *, _trusted: bool = False):
        self.context = context
        self.rank = rank
        self.order = order
        self._sorted = None
        self._hash = None
        if _trusted:
            self._coeffs = coeffs
            return
        out = {}
        for (q, m), c in (coeffs or {}).items():
            q = tuple(int(x) for x in q)
            m = tuple(int(x) for x in m)
            if len(q) != context.q_rank or len(m) != rank:
                raise DimensionError("term exponent of wrong rank")
            if any(x < 0 for x in q):
                raise DomainError("monoid exponents must be non-negative")
            if context.degree(q) > order:
                continue
            c = _norm(Fraction(c)) if not isinstance(c, int) else c
            if c:
                out[(q, m)] = out.get((q, m), 0) + c
        self._coeffs = {k: v for k, v in out.items() if v}

    # -- constructors
    @classmethod
    def zero(cls, context, rank, order):
        return cls(context, rank, order, {}, _trusted=True)

    @classmethod
    def one(cls, context, rank, order):
        return cls.monomial(context, rank, order)

    @classmethod
    def monomial(cls, context, rank, order, m=None, q=None, coeff=1):
        m = tuple(m) if m is not None else (0,) * rank
        q = tuple(q) if q is not None else context.zero()
        return cls(context, rank, order, {(q, m): coeff})

    @classmethod
    def from_terms(cls, context, rank, order, terms: Iterable[tuple]):
        """Build from ``(coeff, m, q)`` triples, adding repeated keys."""
        acc: dict = {}
        for c, m, q in terms:
            key = (tuple(q), tuple(m))
            acc[key] = acc.get(key, 0) + c
        return cls(context, rank, order, acc)

    def _new(self, coeffs, order=None):
        return TruncatedSeries(self.context, self.rank, self.order if order is None else order,
                               coeffs, _trusted=True)

    # -- inspection
    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    def terms(self) -> list[tuple]:
        """Sorted ``(q, m, coeff)`` triples; sort key is ``q`` then ``m``."""
        return [(q, m, self._coeffs[(q, m)]) for (q, m) in sorted(self._coeffs)]

    def __iter__(self):
        return iter(self.terms())

    def __len__(self):
        return len(self._coeffs)

    def __bool__(self):
        return bool(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def coefficient(self, m=None, q=None):
        m = tuple(m) if m is not None else (0,) * self.rank
        q = tuple(q) if q is not None else self.context.zero()
        return self._coeffs.get((q, m), 0)

    def degree_sorted(self) -> list[tuple]:
        """``(degree, q, m, coeff)`` in increasing degree (cached)."""
        if self._sorted is None:
            deg = self.context.degree
            self._sorted = sorted(((deg(q), q, m, c) for (q, m), c in self._coeffs.items()),
                                  key=lambda t: (t[0], t[1], t[2]))
        return self._sorted

    def min_degree(self) -> int | None:
        ds = self.degree_sorted()
        return ds[0][0] if ds else None

    def degree_part(self, d: int) -> "TruncatedSeries":
        deg = self.context.degree
        return self._new({k: c for k, c in self._coeffs.items() if deg(k[0]) == d})

    def m_exponents(self) -> set:
        return {m for (_, m) in self._coeffs}

    def is_one_mod_max(self) -> bool:
        """True when the degree-zero part is exactly the constant 1."""
        zero_q = self.context.zero()
        deg0 = {m: c for (q, m), c in self._coeffs.items() if q == zero_q}
        return deg0 == {(0,) * self.rank: 1}

    def is_one(self) -> bool:
        return self._coeffs == {(self.context.zero(), (0,) * self.rank): 1}

    def group_by_m(self) -> dict:
        """Map each lattice exponent ``m`` to its coefficient, a series with ``m = 0``."""
        zero_m = (0,) * self.rank
        groups: dict = {}
        for (q, m), c in self._coeffs.items():
            groups.setdefault(m, {})[(q, zero_m)] = c
        return {m: self._new(g) for m, g in groups.items()}

    # -- ring structure
    def _check(self, other: "TruncatedSeries"):
        if self.context != other.context or self.rank != other.rank:
            raise DimensionError("series over different monoids or lattices")

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries.monomial(self.context, self.rank, self.order, coeff=other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = min(self.order, other.order)
        deg = self.context.degree
        out = {k: c for k, c in self._coeffs.items() if deg(k[0]) <= order}
        for k, c in other._coeffs.items():
            if deg(k[0]) <= order:
                v = _norm(out.get(k, 0) + c)
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return self._new(out, order)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncatedSeries":
        if not c:
            return self._new({})
        return self._new({k: _norm(v * c) for k, v in self._coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return int_pow(self, e)

    def truncate(self, order: int) -> "TruncatedSeries":
        """Drop terms of q-degree above ``order`` (never raises the order)."""
        order = min(order, self.order)
        deg = self.context.degree
        return self._new({k: c for k, c in self._coeffs.items() if deg(k[0]) <= order}, order)

    def with_order(self, order: int) -> "TruncatedSeries":
        """Reinterpret at a new order; raising the order treats the data as exact."""
        if order <= self.order:
            return self.truncate(order)
        return self._new(dict(self._coeffs), order)

    def equal_mod(self, other: "TruncatedSeries", order: int) -> bool:
        return self.truncate(order)._coeffs == other.truncate(order)._coeffs

    def map_terms(self, fn: Callable[[tuple, tuple], tuple | None], rank=None, context=None,
                  order=None) -> "TruncatedSeries":
        """Send each key through ``fn(q, m) -> (q', m')`` (or ``None`` to drop)."""
        acc: dict = {}
        for (q, m), c in self._coeffs.items():
            r = fn(q, m)
            if r is None:
                continue
            k = (tuple(r[0]), tuple(r[1]))
            acc[k] = acc.get(k, 0) + c
        return TruncatedSeries(context or self.context, self.rank if rank is None else rank,
                               self.order if order is None else order, acc)

    # -- comparison and display
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.monomial(self.context, self.rank, self.order, coeff=other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.context == other.context and self.rank == other.rank
                and self.order == other.order and self._coeffs == other._coeffs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.context, self.rank, self.order,
                               frozenset(self._coeffs.items())))
        return self._hash

    def pretty(self, max_terms: int | None = None) -> str:
        parts = []
        for q, m, c in self.terms():
            mono = []
            for name, e in zip(self.context.names, q):
                if e:
                    mono.append(name if e == 1 else f"{name}^{e}")
            if any(m):
                mono.append("z^(" + ",".join(str(x) for x in m) + ")")
            body = "*".join(mono)
            if not body:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{format_rational(c)}*{body}")
        if not parts:
            return "0"
        if max_terms is not None and len(parts) > max_terms:
            parts = parts[:max_terms] + ["..."]
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"TruncatedSeries({self.pretty()}; order={self.order})"

    # -- serialization
    def to_json(self) -> list:
        return [{"c": format_rational(c), "m": list(m), "q": list(q)}
                for q, m, c in self.terms()]

    @classmethod
    def from_json(cls, context, rank, order, data) -> "TruncatedSeries":
        acc = {}
        for t in data:
            key = (tuple(t["q"]), tuple(t["m"]))
            if key in acc:
                raise DomainError("duplicate term key in series")
            acc[key] = parse_rational(t["c"])
        return cls(context, rank, order, acc)


# ------------------------------------------------------------ operations


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product truncated at ``min(a.order, b.order)``."""
    a._check(b)
    order = min(a.order, b.order)
    if not a._coeffs or not b._coeffs:
        return a._new({}, order)
    A = a.degree_sorted()
    B = b.degree_sorted()
    if len(A) > len(B):
        A, B = B, A
    out: dict = {}
    get = out.get
    for da, qa, ma, ca in A:
        lim = order - da
        if lim < 0:
            break
        for db, qb, mb, cb in B:
            if db > lim:
                break
            k = (_add(qa, qb), _add(ma, mb))
            out[k] = get(k, 0) + ca * cb
    return a._new({k: _norm(v) for k, v in out.items() if v}, order)


def _inverse(f: TruncatedSeries) -> TruncatedSeries:
    zero_q = f.context.zero()
    deg0 = {m: c for (q, m), c in f._coeffs.items() if q == zero_q}
    zero_m = (0,) * f.rank
    if set(deg0) != {zero_m}:
        raise NotInvertibleError("only series with a nonzero constant leading term are invertible")
    c0 = Fraction(deg0[zero_m])
    g = (f.scale(1 / c0) - 1)
    # 1/(1+g) = sum (-g)^k; g has positive q-degree so k <= order suffices.
    result = TruncatedSeries.one(f.context, f.rank, f.order)
    power = result
    neg_g = -g
    for _ in range(f.order):
        power = mul(power, neg_g)
        if power.is_zero():
            break
        result = result + power
    return result.scale(1 / c0)


def int_pow(f: TruncatedSeries, e: int) -> TruncatedSeries:
    """``f**e`` for any integer ``e``; negative powers need an invertible ``f``."""
    e = int(e)
    if e < 0:
        return int_pow(_inverse(f), -e)
    result = TruncatedSeries.one(f.context, f.rank, f.order)
    base = f
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def inverse(f: TruncatedSeries) -> TruncatedSeries:
    return _inverse(f)


def exp_series(f: TruncatedSeries) -> TruncatedSeries:
    zero_q = f.context.zero()
    if any(q == zero_q for (q, _) in f._coeffs):
        raise DomainError("exp needs a series in the maximal ideal")
    result = TruncatedSeries.one(f.context, f.rank, f.order)
    term = result
    for k in range(1, f.order + 1):
        term = mul(term, f).scale(Fraction(1, k))
        if term.is_zero():
            break
        result = result + term
    return result


def log_series(f: TruncatedSeries) -> TruncatedSeries:
    if not f.is_one_mod_max():
        raise DomainError("log needs a series congruent to 1 modulo the maximal ideal")
    g = f - 1
    result = TruncatedSeries.zero(f.context, f.rank, f.order)
    power = TruncatedSeries.one(f.context, f.rank, f.order)
    for k in range(1, f.order + 1):
        power = mul(power, g)
        if power.is_zero():
            break
        result = result + power.scale(Fraction((-1) ** (k + 1), k))
    return result


def exp_log(f: TruncatedSeries, mode: str) -> TruncatedSeries:
    if mode == "exp":
        return exp_series(f)
    if mode == "log":
        return log_series(f)
    raise DomainError(f"unknown mode {mode!r}")


def remap_exponents(f: TruncatedSeries, lattice_map: LatticeMap | Callable | None,
                    q_map: LatticeMap | Callable | None, context: MonoidContext | None = None,
                    order: int | None = None) -> TruncatedSeries:
    """Apply ``(m, q) -> (lattice_map(m), q_map(q))`` termwise.

    ``q_map`` may also be a callable ``(q, m) -> q'`` so the new monoid
    exponent can read off part of the lattice exponent.  Colliding terms are
    added and the result is truncated at ``order`` (default: ``f.order``).
    """
    context = context or f.context
    if lattice_map is None:
        mfun = lambda m: m
        rank = f.rank
    elif isinstance(lattice_map, LatticeMap):
        mfun = lattice_map.apply
        rank = lattice_map.target_rank
    else:
        mfun = lattice_map
        rank = None
    if q_map is None:
        qfun = lambda q, m: q
    elif isinstance(q_map, LatticeMap):
        qfun = lambda q, m: q_map.apply(q)
    else:
        qfun = q_map
    acc: dict = {}
    for (q, m), c in f._coeffs.items():
        m2 = tuple(mfun(m))
        q2 = tuple(qfun(q, m))
        if any(x < 0 for x in q2):
            raise DomainError(f"monoid map sends {q} outside the monoid")
        acc[(q2, m2)] = acc.get((q2, m2), 0) + c
    if rank is None:
        rank = len(next(iter(acc))[1]) if acc else f.rank
    return TruncatedSeries(context, rank, f.order if order is None else order, acc)
