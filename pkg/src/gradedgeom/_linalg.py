"""Small exact linear algebra over the rationals and over polynomial rings."""
from __future__ import annotations

from fractions import Fraction


from .core import GradingContext, Polynomial, multiply


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][col]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: list[list[Fraction]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{v : rows @ v = 0}`` in reduced form."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(rows: list[list[Fraction]], rhs: list[Fraction]):
    """One solution of ``rows @ v = rhs`` or ``None`` when inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref(aug)
    if ncols in pivots:
        return None
    v = [Fraction(0)] * ncols
    for row, pc in zip(reduced, pivots):
        v[pc] = row[ncols]
    return v


def poly_det(ctx: GradingContext, mat: list[list[Polynomial]]) -> Polynomial:
    """Determinant over a commutative polynomial subring (Laplace with memo)."""
    n = len(mat)
    if n == 0:
        return ctx.one()
    memo: dict[tuple[int, ...], Polynomial] = {}

    def minor(row: int, cols: tuple[int, ...]) -> Polynomial:
        if row == n:
            return ctx.one()
        if cols in memo:
            return memo[cols]
        total = ctx.zero()
        for pos, c in enumerate(cols):
            entry = mat[row][c]
            if not entry:
                continue
            rest = cols[:pos] + cols[pos + 1 :]
            term = multiply(entry, minor(row + 1, rest))
            total = total - term if pos % 2 else total + term
        memo[cols] = total
        return total

    return minor(0, tuple(range(n)))


def poly_adjugate(ctx: GradingContext, mat: list[list[Polynomial]]) -> list[list[Polynomial]]:
    n = len(mat)
    adj = [[ctx.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[mat[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = poly_det(ctx, sub)
            adj[j][i] = -cof if (i + j) % 2 else cof
    return adj


def mat_mul(ctx: GradingContext, a, b):
    n, m, k = len(a), len(b), len(b[0]) if b else 0
    out = [[ctx.zero() for _ in range(k)] for _ in range(n)]
    for i in range(n):
        for j in range(k):
            acc = ctx.zero()
            for l in range(m):
                if a[i][l] and b[l][j]:
                    acc = acc + multiply(a[i][l], b[l][j])
            out[i][j] = acc
    return out


def is_identity(mat) -> bool:
    return all(
        (entry == 1) if i == j else not entry
        for i, row in enumerate(mat)
        for j, entry in enumerate(row)
    )
