"""Exact rational scalars and small dense vectors.

Scalars are ``fractions.Fraction`` throughout; vectors are plain tuples of
Fractions.  Everything here is pure and allocation-light so the polyhedral
kernel can lean on it inside tight loops.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import ParseError

Rational = Fraction
Vector = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` / ``"p"`` strings (ints accepted verbatim)."""
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if isinstance(text, str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational literal {text!r}") from exc
    raise ParseError(f"not a rational: {text!r}")


def format_rational(value: Fraction) -> str:
    """Render canonically: integers bare, otherwise ``p/q`` in lowest terms."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_vector(items: Sequence, dim: int | None = None) -> Vector:
    vec = tuple(parse_rational(x) for x in items)
    if dim is not None and len(vec) != dim:
        raise ParseError(f"expected a vector of length {dim}, got {len(vec)}")
    return vec


def format_vector(vec: Sequence[Fraction]) -> list[str]:
    return [format_rational(x) for x in vec]


def vzero(dim: int) -> Vector:
    return (ZERO,) * dim


def vadd(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vneg(a: Sequence[Fraction]) -> Vector:
    return tuple(-x for x in a)


def vscale(c: Fraction, a: Sequence[Fraction]) -> Vector:
    return tuple(c * x for x in a)


def vdot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    total = ZERO
    for x, y in zip(a, b):
        if x and y:
            total += x * y
    return total


def is_zero_vector(a: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in a)


def primitive(vec: Sequence[Fraction]) -> Vector:
    """Scale by a positive rational to coprime integers (direction kept)."""
    denom_lcm = 1
    for x in vec:
        d = x.denominator
        denom_lcm = denom_lcm // gcd(denom_lcm, d) * d
    nums = [int(x * denom_lcm) for x in vec]
    g = 0
    for n in nums:
        g = gcd(g, abs(n))
    if g == 0:
        return tuple(ZERO for _ in vec)
    return tuple(Fraction(n // g) for n in nums)


def lexmin_sign(vec: Sequence[Fraction]) -> Vector:
    """Canonical representative of {v, -v}: first nonzero entry positive."""
    for x in vec:
        if x > 0:
            return tuple(vec)
        if x < 0:
            return vneg(vec)
    return tuple(vec)


def rref(rows: Iterable[Sequence[Fraction]]) -> list[Vector]:
    """Reduced row echelon form over Q; zero rows dropped.

    The output is the canonical basis of the row space, so two generating
    sets of the same subspace always reduce to identical lists.
    """
    mat = [list(r) for r in rows if not is_zero_vector(r)]
    if not mat:
        return []
    ncols = len(mat[0])
    pivot_row = 0
    for col in range(ncols):
        sel = None
        for r in range(pivot_row, len(mat)):
            if mat[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        mat[pivot_row], mat[sel] = mat[sel], mat[pivot_row]
        inv = ONE / mat[pivot_row][col]
        mat[pivot_row] = [inv * x for x in mat[pivot_row]]
        for r in range(len(mat)):
            if r != pivot_row and mat[r][col] != 0:
                factor = mat[r][col]
                mat[r] = [x - factor * y for x, y in zip(mat[r], mat[pivot_row])]
        pivot_row += 1
        if pivot_row == len(mat):
            break
    out = [tuple(row) for row in mat[:pivot_row] if not is_zero_vector(row)]
    return out


def orthogonalize(basis: Sequence[Sequence[Fraction]]) -> list[Vector]:
    """Gram-Schmidt without normalization (stays rational)."""
    ortho: list[Vector] = []
    for b in basis:
        v = tuple(b)
        for u in ortho:
            uu = vdot(u, u)
            if uu:
                v = vsub(v, vscale(vdot(v, u) / uu, u))
        if not is_zero_vector(v):
            ortho.append(v)
    return ortho


def project_off(vec: Sequence[Fraction], ortho_basis: Sequence[Sequence[Fraction]]) -> Vector:
    """Component of ``vec`` orthogonal to span(ortho_basis).

    ``ortho_basis`` must already be pairwise orthogonal (see orthogonalize).
    """
    v = tuple(vec)
    for u in ortho_basis:
        uu = vdot(u, u)
        if uu:
            v = vsub(v, vscale(vdot(v, u) / uu, u))
    return v
