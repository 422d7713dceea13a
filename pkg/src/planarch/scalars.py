"""Exact coefficient arithmetic: rationals, Laurent polynomials, free modules.

Scalars are sparse Laurent polynomials in named formal symbols with Fraction
coefficients.  A plain rational is the special case with no symbols.  There is
no general division; negative powers of a *symbol* are fine (Laurent), which
is all the loop-removal formulas ever need.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

# A monomial is a sorted tuple of (symbol, exponent) pairs with exponent != 0.
Monomial = tuple[tuple[str, int], ...]

_ONE_MONO: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps: dict[str, int] = dict(a)
    for sym, e in b:
        new = exps.get(sym, 0) + e
        if new:
            exps[sym] = new
        else:
            del exps[sym]
    return tuple(sorted(exps.items()))


def _mono_str(m: Monomial) -> str:
    parts = []
    for sym, e in m:
        if e == 1:
            parts.append(sym)
        else:
            parts.append(f"{sym}^{e}")
    return "*".join(parts)


@dataclass(frozen=True)
class Scalar:
    """Exact element of Q[s, s^-1, ...] for a finite set of symbols s.

    `terms` maps monomials to nonzero Fraction coefficients.
    """

    terms: tuple[tuple[Monomial, Fraction], ...]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_terms(terms: Mapping[Monomial, Fraction] | Iterable[tuple[Monomial, Fraction]]) -> "Scalar":
        acc: dict[Monomial, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, coeff in items:
            c = acc.get(mono, Fraction(0)) + coeff
            if c:
                acc[mono] = c
            elif mono in acc:
                del acc[mono]
        return Scalar(tuple(sorted(acc.items())))

    @staticmethod
    def rational(value: Fraction | int | str) -> "Scalar":
        c = Fraction(value)
        if not c:
            return ZERO
        return Scalar(((_ONE_MONO, c),))

    @staticmethod
    def symbol(name: str, power: int = 1) -> "Scalar":
        if power == 0:
            return ONE
        return Scalar((((((name, power),)), Fraction(1)),))

    # -- ring structure ----------------------------------------------------

    def __add__(self, other: "Scalar") -> "Scalar":
        other = _coerce(other)
        return Scalar.from_terms(list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Scalar":
        return _coerce(other) + (-self)

    def __mul__(self, other: "Scalar") -> "Scalar":
        other = _coerce(other)
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = _mono_mul(m1, m2)
                c = acc.get(m, Fraction(0)) + c1 * c2
                if c:
                    acc[m] = c
                elif m in acc:
                    del acc[m]
        return Scalar(tuple(sorted(acc.items())))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            # Only pure monomials with unit coefficient invert exactly.
            if len(self.terms) == 1 and abs(self.terms[0][1]) == 1:
                mono, coeff = self.terms[0]
                inv_mono = tuple((s, -e) for s, e in mono)
                base = Scalar(((inv_mono, Fraction(1, 1) / coeff),))
                return base ** (-n)
            raise ValueError("cannot invert a non-monomial scalar exactly")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(m == _ONE_MONO for m, _ in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"scalar {self} still contains formal symbols")
        return self.terms[0][1]

    def symbols(self) -> set[str]:
        return {s for m, _ in self.terms for s, _ in m}

    def specialize(self, values: Mapping[str, Fraction | int]) -> "Scalar":
        """Substitute rationals for symbols; unlisted symbols stay formal."""
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms:
            c = coeff
            rest = []
            for sym, e in mono:
                if sym in values:
                    v = Fraction(values[sym])
                    if e < 0 and v == 0:
                        raise ZeroDivisionError(f"specializing {sym}^{e} at 0")
                    c *= v ** e
                else:
                    rest.append((sym, e))
            key = tuple(rest)
            new = acc.get(key, Fraction(0)) + c
            if new:
                acc[key] = new
            elif key in acc:
                del acc[key]
        return Scalar(tuple(sorted(acc.items())))

    # -- presentation ------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.terms:
            ms = _mono_str(mono)
            if not ms:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(ms)
            elif coeff == -1:
                parts.append(f"-{ms}")
            else:
                parts.append(f"{coeff}*{ms}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"coeff": str(coeff), "monomial": {sym: e for sym, e in mono}}
                for mono, coeff in self.terms
            ]
        }

    @staticmethod
    def from_json(data: dict) -> "Scalar":
        terms = []
        for t in data["terms"]:
            mono = tuple(sorted((str(s), int(e)) for s, e in t["monomial"].items() if int(e)))
            terms.append((mono, Fraction(t["coeff"])))
        return Scalar.from_terms(terms)


ZERO = Scalar(())
ONE = Scalar(((_ONE_MONO, Fraction(1)),))


def _coerce(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar.rational(x)
    raise TypeError(f"cannot coerce {x!r} to Scalar")


def parse_scalar(text: str) -> Scalar:
    """Parse 'd', '2', '-1/3', 'd^2', '3*d^-1' style atoms joined by + and -."""
    text = text.strip()
    if not text:
        raise ValueError("empty scalar")
    # Tokenize into signed atoms.
    out = ZERO
    sign = 1
    i = 0
    atoms: list[tuple[int, str]] = []
    cur = ""
    for ch in text:
        if ch in "+-" and cur.strip() and not cur.rstrip().endswith(("*", "^", "/")):
            atoms.append((sign, cur.strip()))
            sign = 1 if ch == "+" else -1
            cur = ""
        elif ch in "+-" and not cur.strip():
            sign = sign * (1 if ch == "+" else -1)
        else:
            cur += ch
        i += 1
    if cur.strip():
        atoms.append((sign, cur.strip()))
    for sg, atom in atoms:
        coeff = Fraction(sg)
        mono: dict[str, int] = {}
        for factor in atom.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"bad scalar atom {atom!r}")
            if factor[0].isdigit() or factor[0] in "+-" or "/" in factor and factor[0].isdigit():
                coeff *= Fraction(factor)
            else:
                if "^" in factor:
                    name, _, exp = factor.partition("^")
                    mono[name] = mono.get(name, 0) + int(exp)
                else:
                    mono[factor] = mono.get(factor, 0) + 1
        key = tuple(sorted((s, e) for s, e in mono.items() if e))
        out = out + Scalar.from_terms({key: coeff})
    return out


# ---------------------------------------------------------------------------
# Free modules on finite bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeVector:
    """Finite Q-linear combination of hashable basis keys.

    `space` is an opaque descriptor naming the ambient module; addition is
    only defined between vectors with equal descriptors.
    """

    space: object
    terms: tuple[tuple[object, Scalar], ...]

    @staticmethod
    def make(space: object, terms: Mapping[object, Scalar] | Iterable[tuple[object, Scalar]]) -> "FreeVector":
        acc: dict[object, Scalar] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, scl in items:
            cur = acc.get(key, ZERO) + scl
            if cur.is_zero():
                acc.pop(key, None)
            else:
                acc[key] = cur
        return FreeVector(space, tuple(sorted(acc.items(), key=lambda kv: repr(kv[0]))))

    @staticmethod
    def basis(space: object, key: object) -> "FreeVector":
        return FreeVector(space, ((key, ONE),))

    @staticmethod
    def zero(space: object) -> "FreeVector":
        return FreeVector(space, ())

    def __add__(self, other: "FreeVector") -> "FreeVector":
        if self.space != other.space:
            raise ValueError(f"basis mismatch: {self.space!r} vs {other.space!r}")
        return FreeVector.make(self.space, list(self.terms) + list(other.terms))

    def __sub__(self, other: "FreeVector") -> "FreeVector":
        return self + other.scale(Scalar.rational(-1))

    def scale(self, scalar: Scalar | int | Fraction) -> "FreeVector":
        s = _coerce(scalar)
        return FreeVector.make(self.space, [(k, c * s) for k, c in self.terms])

    def __rmul__(self, scalar) -> "FreeVector":
        return self.scale(scalar)

    def tensor(self, other: "FreeVector", space: object, combine: Callable[[object, object], object]) -> "FreeVector":
        out = []
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                out.append((combine(k1, k2), c1 * c2))
        return FreeVector.make(space, out)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, key: object) -> Scalar:
        for k, c in self.terms:
            if k == key:
                return c
        return ZERO

    def support(self) -> list[object]:
        return [k for k, _ in self.terms]

    def map_scalars(self, fn: Callable[[Scalar], Scalar]) -> "FreeVector":
        return FreeVector.make(self.space, [(k, fn(c)) for k, c in self.terms])

    def map_keys(self, fn: Callable[[object], object], space: object | None = None) -> "FreeVector":
        return FreeVector.make(self.space if space is None else space,
                               [(fn(k), c) for k, c in self.terms])

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})·{k}" for k, c in self.terms)


# ---------------------------------------------------------------------------
# Multilinear maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultilinearMap:
    """Multilinear map given by a rule on basis keys, extended by linearity."""

    sources: tuple[object, ...]
    target: object
    rule: Callable[[tuple[object, ...]], FreeVector]

    @property
    def arity(self) -> int:
        return len(self.sources)

    def __call__(self, *args: FreeVector) -> FreeVector:
        return self.apply(list(args))

    def apply(self, args: list[FreeVector]) -> FreeVector:
        if len(args) != len(self.sources):
            raise ValueError(f"arity mismatch: expected {len(self.sources)}, got {len(args)}")
        for arg, src in zip(args, self.sources):
            if arg.space != src:
                raise ValueError(f"source descriptor mismatch: {arg.space!r} vs {src!r}")
        out = FreeVector.zero(self.target)
        if not args:
            return self.rule(())
        # Distribute over the product of supports.
        def rec(i: int, keys: tuple, coeff: Scalar):
            nonlocal out
            if coeff.is_zero():
                return
            if i == len(args):
                out = out + self.rule(keys).scale(coeff)
                return
            for k, c in args[i].terms:
                rec(i + 1, keys + (k,), coeff * c)
        rec(0, (), ONE)
        return out
