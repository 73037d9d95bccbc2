"""The local [n, n-r, r^n'] MDS array code: eigenvalue tables, diagonal
coding matrices, the local parity-check matrix and single-node repair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .digits import DigitProfile, digit, digit_replace, v_indices
from .gf import FieldSpec
from .matrix import BlockMatrix, Diagonal, PoleCollision, rref, solve_rows


class GeometryError(ValueError):
    pass


class PoolTooSmall(ValueError):
    pass


class RequirementViolated(ValueError):
    pass


class HelperMissing(KeyError):
    pass


def _check_geometry(n: int, nprime: int, r: int) -> None:
    if r < 2 or nprime < 1 or n <= nprime:
        raise GeometryError(f"need r >= 2 and n > n' >= 1, got n={n}, n'={nprime}, r={r}")


def phi(n: int, nprime: int, r: int) -> int:
    """Number of nonzero field elements that suffices for R1-R3."""
    _check_geometry(n, nprime, r)
    rn = r * nprime
    if 0 < n % rn < nprime:
        return rn * (math.ceil(n / rn) - 1) + (n % nprime) * r
    return rn * math.ceil(n / rn)


def class_sizes(n: int, nprime: int) -> list[int]:
    """How many nodes fall in each residue class mod n'."""
    return [len(range(c, n, nprime)) for c in range(nprime)]


def pool_requirement(n: int, nprime: int, r: int) -> int:
    """Pool size consumed by :func:`select_lambdas` (never below :func:`phi`)."""
    _check_geometry(n, nprime, r)
    return sum(r * math.ceil(m / r) for m in class_sizes(n, nprime))


@dataclass(frozen=True)
class LambdaTable:
    n: int
    nprime: int
    r: int
    values: tuple[tuple[int, ...], ...]
    field: FieldSpec

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, t = idx
        return self.values[i][t]

    def violations(self) -> list[str]:
        n, nprime, r, lam = self.n, self.nprime, self.r, self.values
        out = []
        if len(lam) != n or any(len(row) != r for row in lam):
            return [f"table shape must be {n}x{r}"]
        if any(v == 0 for row in lam for v in row):
            out.append("zero eigenvalue")
        for i in range(n):
            for j in range(i + 1, n):
                if (j - i) % nprime and set(lam[i]) & set(lam[j]):
                    out.append(f"R1: nodes {i} and {j} share an eigenvalue")
                elif (j - i) % nprime == 0 and any(lam[i][u] == lam[j][u] for u in range(r)):
                    out.append(f"R2: nodes {i} and {j} agree at some position")
            if len(set(lam[i])) != r:
                out.append(f"R3: node {i} has repeated eigenvalues")
        return out

    def validate(self) -> "LambdaTable":
        bad = self.violations()
        if bad:
            raise RequirementViolated("; ".join(bad))
        return self


def select_lambdas(n: int, nprime: int, r: int, pool: Sequence[int], field: FieldSpec) -> LambdaTable:
    """Cyclic Latin-rectangle assignment from disjoint per-class sub-pools."""
    need = pool_requirement(n, nprime, r)
    if len(pool) < need or len(set(pool)) != len(pool) or 0 in pool:
        raise PoolTooSmall(f"need {need} distinct nonzero elements, got {len(set(pool) - {0})}")
    values: list[tuple[int, ...]] = [()] * n
    start = 0
    for cls, size in enumerate(class_sizes(n, nprime)):
        width = r * math.ceil(size / r)
        sub = pool[start:start + width]
        start += width
        for k, node in enumerate(range(cls, n, nprime)):
            values[node] = tuple(sub[(u + k) % width] for u in range(r))
    return LambdaTable(n, nprime, r, tuple(values), field).validate()


@dataclass(frozen=True)
class LocalMatrices:
    """Diagonals of A_i (and optionally A'_i, A''_i); ``A[i][a]`` is row ``a`` of A_i."""

    A: tuple[tuple[int, ...], ...]
    A_prime: tuple[tuple[int, ...], ...] | None = None
    A_dprime: tuple[tuple[int, ...], ...] | None = None
    d0: int | None = None
    d1: int | None = None


def build_A(table: LambdaTable, profile: DigitProfile) -> LocalMatrices:
    if profile.r != table.r or profile.m != table.nprime:
        raise GeometryError("digit profile must be (r, n')")
    A = tuple(
        tuple(table[i, digit(a, i % table.nprime, profile)] for a in range(profile.ell))
        for i in range(table.n)
    )
    return LocalMatrices(A)


def build_A_variants(mats: LocalMatrices, d0: int, d1: int, field: FieldSpec) -> LocalMatrices:
    if d0 == d1:
        raise PoleCollision("d0 and d1 must differ")
    variants = []
    for d in (d0, d1):
        rows = []
        for diag in mats.A:
            row = []
            for v in diag:
                diff = field.sub(v, d)
                if diff == 0:
                    raise PoleCollision(f"pole {d} equals an eigenvalue")
                row.append(field.inv(diff))
            rows.append(tuple(row))
        variants.append(tuple(rows))
    return LocalMatrices(mats.A, variants[0], variants[1], d0, d1)


def build_H(mats: LocalMatrices, r: int, field: FieldSpec) -> BlockMatrix:
    """Block Vandermonde parity-check matrix: block (j, i) is A_i^j."""
    ell = len(mats.A[0])
    grid = [
        [Diagonal(tuple(field.pow(v, j) for v in diag)) for diag in mats.A]
        for j in range(r)
    ]
    return BlockMatrix.build(grid, ell, field)


# -- repair -------------------------------------------------------------------

@dataclass(frozen=True)
class HelperRead:
    node: int
    rows: tuple[int, ...]
    projections: tuple[tuple[int, ...], ...]
    combine: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class RepairPlan:
    """Linear repair of one node from its n-1 group peers.

    Each helper sends ``projections @ content``; the target then solves
    ``target_matrix @ x = -sum(combine @ sent)`` block by block.
    """

    target: int
    helper_reads: tuple[HelperRead, ...]
    target_matrix: tuple[tuple[int, ...], ...]
    solve_blocks: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    field: FieldSpec

    @property
    def bandwidth(self) -> int:
        return sum(len(h.projections) for h in self.helper_reads)

    @property
    def access(self) -> int:
        return sum(len(h.rows) for h in self.helper_reads)

    def per_helper(self) -> dict[int, tuple[int, int]]:
        return {h.node: (len(h.projections), len(h.rows)) for h in self.helper_reads}

    def execute(self, helper_data: Mapping[int, Sequence[int]]) -> list[int]:
        F = self.field
        n_eq = len(self.target_matrix)
        rhs = [0] * n_eq
        for h in self.helper_reads:
            if h.node not in helper_data:
                raise HelperMissing(h.node)
            data = helper_data[h.node]
            sent = [F.dot(p, data) for p in h.projections]
            for e in range(n_eq):
                rhs[e] = F.sub(rhs[e], F.dot(h.combine[e], sent))
        ell = len(self.target_matrix[0])
        out = [0] * ell
        for eqs, cols in self.solve_blocks:
            sub = [[self.target_matrix[e][c] for c in cols] for e in eqs]
            x = solve_rows(sub, [[rhs[e]] for e in eqs], F, unique=True)
            for c, v in zip(cols, x):
                out[c] = v[0]
        return out


def plan_from_combination(node_columns: Sequence[Sequence[Sequence[int]]], combo: Sequence[Sequence[int]],
                          target: int, field: FieldSpec) -> RepairPlan:
    """Build a repair plan from a combination ``combo`` of parity-check rows.

    ``node_columns[h]`` is node h's thick column of the local parity-check
    matrix (R x ell).  Helper h must deliver ``M_h @ f_h`` with
    ``M_h = combo @ node_columns[h]``; it sends rank(M_h) symbols and reads
    the nonzero columns of M_h.
    """
    F = field

    def times(rows):
        return [[F.dot(c, [rows[k][col] for k in range(len(rows))]) for col in range(len(rows[0]))]
                for c in combo]

    m_target = times(node_columns[target])
    ell = len(m_target[0])
    _, pivots = rref(m_target, F)
    if len(pivots) < ell:
        raise RequirementViolated(f"combination cannot isolate node {target}")
    helpers = []
    for h, cols in enumerate(node_columns):
        if h == target:
            continue
        m_h = times(cols)
        red, piv = rref(m_h, F)
        basis = tuple(tuple(r) for r in red[:len(piv)])
        combine = tuple(tuple(row[c] for c in piv) for row in m_h)
        read = tuple(c for c in range(ell) if any(row[c] for row in m_h))
        helpers.append(HelperRead(h, read, basis, combine))
    return RepairPlan(target, tuple(helpers), tuple(map(tuple, m_target)),
                      _components(m_target), F)


def _components(m: Sequence[Sequence[int]]) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """Split a square system into independent (equations, unknowns) blocks."""
    n_eq, n_var = len(m), len(m[0])
    parent = list(range(n_eq + n_var))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in range(n_eq):
        for v in range(n_var):
            if m[e][v]:
                parent[find(e)] = find(n_eq + v)
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for e in range(n_eq):
        groups.setdefault(find(e), ([], []))[0].append(e)
    for v in range(n_var):
        groups.setdefault(find(n_eq + v), ([], []))[1].append(v)
    return tuple((tuple(e), tuple(v)) for e, v in sorted(groups.values(), key=lambda g: (g[1] or g[0])[0]))


def digit_group_combination(target: int, nprime: int, r: int) -> list[list[int]]:
    """Row combination for repairing ``target``: for every anchor ``a`` with
    ``a_{target mod n'} = 0`` and every thick row j, sum rows ``(j, b)`` over the
    r indices b that differ from a only in that digit.
    """
    profile = DigitProfile(r, nprime)
    ell = profile.ell
    pos = target % nprime
    combo = []
    for a in v_indices(pos, 0, profile):
        companions = [digit_replace(a, pos, t, profile) for t in range(r)]
        for j in range(r):
            row = [0] * (r * ell)
            for b in companions:
                row[j * ell + b] = 1
            combo.append(row)
    return combo


def repair_plan_local(H: BlockMatrix, nprime: int, target: int) -> RepairPlan:
    """Single-node repair for the local code with parity-check ``H`` (r x n blocks)."""
    r, n = H.block_rows, H.block_cols
    if not 0 <= target < n:
        raise IndexError(f"node {target} outside [0, {n})")
    columns = [
        [row for j in range(r) for row in H.block_rows_of(j, h)]
        for h in range(n)
    ]
    return plan_from_combination(columns, digit_group_combination(target, nprime, r), target, H.field)


def repair_bandwidth_formula(n: int, nprime: int, r: int, j: int) -> Fraction:
    """Two-branch repair bandwidth of node j (in symbols)."""
    ell = r ** nprime
    if j % nprime < n % nprime:
        same = math.ceil(n / nprime) - 1
    else:
        same = n // nprime - 1
    return (1 + Fraction(same * (r - 1), n - 1)) * Fraction(ell, r) * (n - 1)


def msr_bandwidth(n: int, r: int, ell: int) -> Fraction:
    """Cut-set lower bound d*ell/(d-k+1) at d = n-1."""
    return Fraction(ell * (n - 1), r)


def bandwidth_ratio(n: int, nprime: int, r: int) -> Fraction:
    """gamma / gamma* for the (n/n' - 1) branch, assuming n' | n."""
    return 1 + Fraction((n // nprime - 1) * (r - 1), n - 1)
