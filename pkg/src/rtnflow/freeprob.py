"""Limit measures as expressions: identity, Marchenko-Pastur, and products.

The limiting entanglement spectrum of a network comes out as an expression
built from the point mass at one (``one``), the Marchenko-Pastur law of
ratio one (``mp``), free multiplicative convolution (``box``, the series
rule) and classical multiplicative convolution (``times``, the parallel
rule). Expressions are kept in a canonical form: associative products are
flattened, ``one`` factors dropped, and children sorted, so structural
equality is measure equality for everything this package produces.

Moments are computed exactly over the rationals. For the free product the
route is the standard S-transform one: moment series to its compositional
inverse, S(z) = chi(z) (1+z)/z, multiply the factors' S-transforms, and
invert back. Classical products just multiply moments elementwise.

``sample_spectrum`` realizes an expression as eigenvalues of a finite
random matrix model: Wishart blocks for ``mp`` factors, Haar-rotated
sandwiches for free products, shuffled elementwise products for classical
ones.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class Expr:
    """Base class for measure expressions; all instances are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class One(Expr):
    """Point mass at 1, the unit for both products."""


@dataclass(frozen=True)
class MP(Expr):
    """Marchenko-Pastur law with ratio 1; moments are the Catalan numbers."""


@dataclass(frozen=True)
class FreeConv(Expr):
    children: tuple[Expr, ...]


@dataclass(frozen=True)
class ClassConv(Expr):
    children: tuple[Expr, ...]


class MeasureFormatError(ValueError):
    """Malformed measure expression text."""


def sort_key(e: Expr) -> tuple:
    if isinstance(e, One):
        return (0,)
    if isinstance(e, MP):
        return (1,)
    tag = 2 if isinstance(e, FreeConv) else 3
    return (tag, *(sort_key(c) for c in e.children))


def canonicalize(e: Expr) -> Expr:
    """Flatten, drop units, sort children; idempotent."""
    if isinstance(e, (One, MP)):
        return e
    kind = type(e)
    flat: list[Expr] = []
    for child in e.children:
        child = canonicalize(child)
        if isinstance(child, kind):
            flat.extend(child.children)
        elif isinstance(child, One):
            continue
        else:
            flat.append(child)
    if not flat:
        return One()
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=sort_key)
    return kind(tuple(flat))


def free_conv(*parts: Expr) -> Expr:
    return canonicalize(FreeConv(tuple(parts)))


def class_conv(*parts: Expr) -> Expr:
    return canonicalize(ClassConv(tuple(parts)))


def box_power_of_mp(e: Expr) -> int | None:
    """The s with e == mp boxed s times, or None. ``one`` counts as s = 0."""
    e = canonicalize(e)
    if isinstance(e, One):
        return 0
    if isinstance(e, MP):
        return 1
    if isinstance(e, FreeConv) and all(isinstance(c, MP) for c in e.children):
        return len(e.children)
    return None


# ---------------------------------------------------------------------------
# rendering and parsing


def render(e: Expr) -> str:
    """Canonical text form.

    >>> render(free_conv(MP(), class_conv(MP(), MP()), MP()))
    'box(pow_box(mp, 2), times(mp, mp))'
    >>> render(class_conv(One(), One()))
    'one'
    """
    return _render(canonicalize(e))


def _render(e: Expr) -> str:
    if isinstance(e, One):
        return "one"
    if isinstance(e, MP):
        return "mp"
    if isinstance(e, FreeConv):
        runs: list[list] = []
        for child in e.children:
            if runs and runs[-1][0] == child:
                runs[-1][1] += 1
            else:
                runs.append([child, 1])
        parts = [
            _render(c) if k == 1 else f"pow_box({_render(c)}, {k})" for c, k in runs
        ]
        if len(parts) == 1:
            return parts[0]
        return "box(" + ", ".join(parts) + ")"
    return "times(" + ", ".join(_render(c) for c in e.children) + ")"


_TOKEN = re.compile(r"\s*([a-z_]+|\d+|[(),])")


def parse_measure(text: str) -> Expr:
    """Parse the grammar emitted by :func:`render`; result is canonical.

    Accepts ``one``, ``mp``, ``box(e, e, ...)``, ``times(e, e, ...)`` and
    ``pow_box(e, k)`` with k >= 0.

    >>> parse_measure("pow_box(mp, 3)") == free_conv(MP(), MP(), MP())
    True
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise MeasureFormatError(f"bad character at offset {pos}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    expr, end = _parse_expr(tokens, 0)
    if end != len(tokens):
        raise MeasureFormatError(f"trailing input after position {end}")
    return canonicalize(expr)


def _parse_expr(tokens: list[str], i: int) -> tuple[Expr, int]:
    if i >= len(tokens):
        raise MeasureFormatError("unexpected end of input")
    head = tokens[i]
    if head == "one":
        return One(), i + 1
    if head == "mp":
        return MP(), i + 1
    if head in ("box", "times", "pow_box"):
        if i + 1 >= len(tokens) or tokens[i + 1] != "(":
            raise MeasureFormatError(f"expected '(' after {head}")
        args: list = []
        j = i + 2
        while True:
            if head == "pow_box" and len(args) == 1:
                if j >= len(tokens) or not tokens[j].isdigit():
                    raise MeasureFormatError("pow_box needs an integer power")
                args.append(int(tokens[j]))
                j += 1
            else:
                arg, j = _parse_expr(tokens, j)
                args.append(arg)
            if j >= len(tokens):
                raise MeasureFormatError("unterminated argument list")
            if tokens[j] == ",":
                j += 1
                continue
            if tokens[j] == ")":
                j += 1
                break
            raise MeasureFormatError(f"expected ',' or ')' at position {j}")
        if head == "pow_box":
            if len(args) != 2:
                raise MeasureFormatError("pow_box takes an expression and a power")
            return FreeConv((args[0],) * args[1]), j
        if len(args) < 2:
            raise MeasureFormatError(f"{head} needs at least two arguments")
        kind = FreeConv if head == "box" else ClassConv
        return kind(tuple(args)), j
    raise MeasureFormatError(f"unknown token {head!r}")


# ---------------------------------------------------------------------------
# exact moments


def _mul(a: list[Fraction], b: list[Fraction], deg: int) -> list[Fraction]:
    out = [Fraction(0)] * (deg + 1)
    for i, ai in enumerate(a[: deg + 1]):
        if not ai:
            continue
        for j, bj in enumerate(b[: deg + 1 - i]):
            if bj:
                out[i + j] += ai * bj
    return out


def _revert(a: list[Fraction], n: int) -> list[Fraction]:
    """Compositional inverse of a series with a[0] = 0, a[1] != 0."""
    b = [Fraction(0)] * (n + 1)
    b[1] = 1 / Fraction(a[1])
    for k in range(2, n + 1):
        total = Fraction(0)
        power = _mul(b, b, k)
        j = 2
        while True:
            if j < len(a) and a[j]:
                total += a[j] * power[k]
            j += 1
            if j > k:
                break
            power = _mul(power, b, k)
        b[k] = -total / a[1]
    return b


def _s_from_moments(mom: tuple[Fraction, ...], n: int) -> list[Fraction]:
    psi = [Fraction(0), *mom[:n]]
    chi = _revert(psi, n)
    s = [chi[1]] + [chi[k + 1] + chi[k] for k in range(1, n)]
    return s


def moments(e: Expr, n_max: int = 8) -> tuple[Fraction, ...]:
    """Moments 1..n_max of the expression's measure, exactly.

    >>> moments(MP(), 4)
    (Fraction(1, 1), Fraction(2, 1), Fraction(5, 1), Fraction(14, 1))
    >>> moments(free_conv(MP(), MP()), 3)
    (Fraction(1, 1), Fraction(3, 1), Fraction(12, 1))
    >>> moments(class_conv(MP(), MP()), 3)
    (Fraction(1, 1), Fraction(4, 1), Fraction(25, 1))
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return _moments(canonicalize(e), n_max)


def _moments(e: Expr, n: int) -> tuple[Fraction, ...]:
    if isinstance(e, One):
        return (Fraction(1),) * n
    if isinstance(e, MP):
        return tuple(Fraction(math.comb(2 * k, k), k + 1) for k in range(1, n + 1))
    if isinstance(e, ClassConv):
        out = [Fraction(1)] * n
        for child in e.children:
            for i, m in enumerate(_moments(child, n)):
                out[i] *= m
        return tuple(out)
    s_total = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for child in e.children:
        s_total = _mul(s_total, _s_from_moments(_moments(child, n), n), n - 1)
    alt = [Fraction((-1) ** k) for k in range(n)]
    chi = [Fraction(0), *_mul(s_total, alt, n - 1)]
    psi = _revert(chi, n)
    return tuple(psi[1 : n + 1])


def s_series(e: Expr, terms: int = 8) -> tuple[Fraction, ...]:
    """Coefficients S_0..S_{terms-1} of the S-transform.

    >>> s_series(MP(), 4)
    (Fraction(1, 1), Fraction(-1, 1), Fraction(1, 1), Fraction(-1, 1))
    """
    mom = moments(e, terms)
    return tuple(_s_from_moments(mom, terms)[:terms])


def vn_correction(e: Expr) -> Fraction:
    """The entropy deficit integral t log t for box powers of mp.

    Exact closed form: the s-fold box power gives 1/2 + 1/3 + ... + 1/(s+1).
    Raises ValueError for expressions outside that family; use
    :func:`vn_correction_mc` there.
    """
    s = box_power_of_mp(e)
    if s is None:
        raise ValueError("no closed form for this expression")
    return sum((Fraction(1, i) for i in range(2, s + 2)), Fraction(0))


def vn_correction_mc(e: Expr, size: int = 256, count: int = 32, seed: int = 0) -> float:
    """Monte Carlo estimate of the t log t integral for any expression."""
    lam = sample_spectrum(e, size, count, seed)
    safe = np.where(lam > 0, lam, 1.0)
    return float(np.mean(np.where(lam > 0, lam * np.log(safe), 0.0)))


def renyi_correction(e: Expr, n: int) -> float:
    """log m_n / (n - 1), the order-n entropy deficit."""
    if n < 2:
        raise ValueError("n must be >= 2")
    m = moments(e, n)[n - 1]
    return (math.log(m.numerator) - math.log(m.denominator)) / (n - 1)


# ---------------------------------------------------------------------------
# finite-size sampling


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    re_part = rng.standard_normal((n, n))
    im_part = rng.standard_normal((n, n))
    return (re_part + 1j * im_part) * math.sqrt(0.5)


def _haar(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, n))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _draw(e: Expr, n: int, rng: np.random.Generator) -> np.ndarray:
    """One size-n spectrum draw; order of eigenvalues is not meaningful."""
    if isinstance(e, One):
        return np.ones(n)
    if isinstance(e, MP):
        g = _ginibre(rng, n)
        return np.linalg.eigvalsh(g @ g.conj().T / n)
    if isinstance(e, ClassConv):
        out = np.ones(n)
        for child in e.children:
            out = out * rng.permutation(_draw(child, n, rng))
        return out
    acc: np.ndarray | None = None
    for child in e.children:
        if isinstance(child, MP):
            g = _ginibre(rng, n)
            inner = np.eye(n) if acc is None else acc
            acc = g @ inner @ g.conj().T / n
        else:
            lam = _draw(child, n, rng)
            if acc is None:
                acc = np.diag(lam.astype(complex))
            else:
                # A fresh Haar basis keeps the factor free of everything
                # accumulated so far even when both are diagonal draws.
                u = _haar(rng, n)
                rotated = (u * lam) @ u.conj().T
                root = _psd_sqrt(acc)
                acc = root @ rotated @ root
    assert acc is not None
    return np.linalg.eigvalsh(acc)


def sample_spectrum(e: Expr, size: int, count: int = 1, seed: int = 0) -> np.ndarray:
    """Eigenvalue draws of the finite model, shape (count, size), rows sorted.

    Draw i uses a Philox stream keyed by (seed, i), so results are
    reproducible across platforms and any sample can be regenerated alone.
    """
    e = canonicalize(e)
    out = np.empty((count, size))
    for i in range(count):
        rng = np.random.Generator(np.random.Philox(key=[seed, i]))
        out[i] = np.sort(_draw(e, size, rng).real)
    return out
