"""Certification: local MDS checks, PMDS pattern enumeration and randomized
determinant oracles for the identities the constructions rely on.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

from .gf import FieldSpec, field_new
from .matrix import BlockMatrix, cv_det, cv_matrix, det_rows, expand, rank_rows
from .pmds import CodeInstance

DEFAULT_BUDGET = 10 ** 6


class TooLarge(ValueError):
    pass


@dataclass
class PatternReport:
    total_patterns: int = 0
    failures: list[tuple[tuple[int, ...], int]] = dc_field(default_factory=list)
    elapsed: float = 0.0
    label: str = ""

    @property
    def certified(self) -> bool:
        return not self.failures

    def merge(self, other: "PatternReport") -> "PatternReport":
        return PatternReport(self.total_patterns + other.total_patterns,
                             self.failures + other.failures,
                             self.elapsed + other.elapsed, self.label)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "total_patterns": self.total_patterns,
            "failures": [{"pattern": list(p), "deficiency": d} for p, d in self.failures],
            "elapsed": round(self.elapsed, 3),
            "certified": self.certified,
        }


@dataclass
class PmdsReport:
    part_i: PatternReport
    part_ii: PatternReport
    sampled: bool = False

    @property
    def certified(self) -> bool:
        return self.part_i.certified and self.part_ii.certified

    @property
    def failures(self):
        return self.part_i.failures + self.part_ii.failures

    @property
    def total_patterns(self) -> int:
        return self.part_i.total_patterns + self.part_ii.total_patterns

    def to_dict(self) -> dict:
        return {"part_i": self.part_i.to_dict(), "part_ii": self.part_ii.to_dict(),
                "sampled": self.sampled, "certified": self.certified}


# -- part i ----------------------------------------------------------------------

def verify_local_mds(H: BlockMatrix, n: int, r: int) -> PatternReport:
    """Every r x r thick sub-block of H must be nonsingular."""
    if H.block_rows != r or H.block_cols != n:
        raise ValueError(f"expected {r} x {n} thick blocks, got {H.block_rows} x {H.block_cols}")
    start = time.perf_counter()
    rep = PatternReport(label="local-mds")
    F = H.field
    for J in itertools.combinations(range(n), r):
        rows = expand(H.thick_columns(J)).tolist()
        rep.total_patterns += 1
        if det_rows(rows, F) == 0:
            rep.failures.append((J, len(rows) - rank_rows(rows, F)))
    rep.elapsed = time.perf_counter() - start
    return rep


# -- part ii ---------------------------------------------------------------------

def pattern_count(mu: int, n: int, r: int, s: int) -> int:
    return math.comb(n, r) ** mu * math.comb(mu * (n - r), s)


def enumerate_patterns(mu: int, n: int, r: int, s: int) -> Iterator[tuple[int, ...]]:
    """Lexicographic over per-group r-subsets, then the s extras (global node indices)."""
    per_group = [list(itertools.combinations(range(g * n, g * n + n), r)) for g in range(mu)]
    for choice in itertools.product(*per_group):
        base = [x for grp in choice for x in grp]
        taken = set(base)
        rest = [x for x in range(mu * n) if x not in taken]
        for extra in itertools.combinations(rest, s):
            yield tuple(sorted(base + list(extra)))


def sample_patterns(mu: int, n: int, r: int, s: int, count: int,
                    rng: random.Random) -> list[tuple[int, ...]]:
    out = []
    for _ in range(count):
        base = [x for g in range(mu) for x in rng.sample(range(g * n, g * n + n), r)]
        rest = sorted(set(range(mu * n)) - set(base))
        out.append(tuple(sorted(base + rng.sample(rest, s))))
    return out


def _systems(instance: CodeInstance, method: str) -> tuple[list, list]:
    """Matrices whose column restrictions decide each pattern.

    ``expand``: one dense matrix with ell columns per node.
    ``slices``: one scalar system per symbol row (diagonal blocks only).
    """
    H = instance.H
    if method == "auto":
        method = "slices" if H.is_diagonal() else "expand"
    if method == "slices":
        if not H.is_diagonal():
            raise ValueError("slice method needs diagonal blocks")
        return [H.scalar_slice(a) for a in range(H.ell)], [[h] for h in range(H.block_cols)]
    if method != "expand":
        raise ValueError(f"unknown method {method!r}")
    ell = H.ell
    return [expand(H).tolist()], [list(range(h * ell, h * ell + ell)) for h in range(H.block_cols)]


def _check_patterns(systems, node_cols, field: FieldSpec, patterns) -> list[tuple[tuple[int, ...], int]]:
    failures = []
    for pat in patterns:
        cols = [c for h in pat for c in node_cols[h]]
        deficiency = 0
        for rows in systems:
            sub = [[row[c] for c in cols] for row in rows]
            if det_rows(sub, field) == 0:
                deficiency += len(cols) - rank_rows(sub, field)
        if deficiency:
            failures.append((pat, deficiency))
    return failures


_WORKER: dict = {}


def _init_worker(systems, node_cols, field_dict):
    _WORKER.update(systems=systems, node_cols=node_cols,
                   field=FieldSpec.from_dict(field_dict))


def _worker(patterns):
    return _check_patterns(_WORKER["systems"], _WORKER["node_cols"], _WORKER["field"], patterns)


def verify_pmds(instance: CodeInstance, budget: int = DEFAULT_BUDGET, samples: int | None = None,
                jobs: int = 1, method: str = "auto", seed: int = 0) -> PmdsReport:
    """Part i: each group is locally MDS.  Part ii: every pattern of r erasures
    per group plus s anywhere leaves a nonsingular erased-column submatrix.

    ``samples`` switches part ii to that many random patterns.
    """
    spec = instance.spec
    mu, n, r, s = spec.mu, spec.n, spec.r, spec.s
    part_i = PatternReport(label="part-i")
    for g in range(mu):
        sub = verify_local_mds(instance.group_parity_check(g), n, r)
        part_i = part_i.merge(PatternReport(sub.total_patterns,
                                            [(tuple(g * n + j for j in p), d) for p, d in sub.failures],
                                            sub.elapsed))
    total = pattern_count(mu, n, r, s)
    if samples is None and total > budget:
        raise TooLarge(f"{total} patterns exceed the budget of {budget}; sample instead")
    start = time.perf_counter()
    if samples is None:
        patterns = list(enumerate_patterns(mu, n, r, s))
    else:
        patterns = sample_patterns(mu, n, r, s, samples, random.Random(seed))
    systems, node_cols = _systems(instance, method)
    F = instance.field
    if jobs > 1 and len(patterns) > jobs:
        size = math.ceil(len(patterns) / (jobs * 4))
        chunks = [patterns[i:i + size] for i in range(0, len(patterns), size)]
        failures = []
        with ProcessPoolExecutor(jobs, initializer=_init_worker,
                                 initargs=(systems, node_cols, F.to_dict())) as pool:
            for part in pool.map(_worker, chunks):
                failures.extend(part)
    else:
        failures = _check_patterns(systems, node_cols, F, patterns)
    part_ii = PatternReport(len(patterns), failures, time.perf_counter() - start, "part-ii")
    return PmdsReport(part_i, part_ii, sampled=samples is not None)


# -- oracles -----------------------------------------------------------------------

@dataclass
class OracleResult:
    passed: int = 0
    failed: int = 0

    def record(self, ok: bool) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1


def _rand_nonzero(F: FieldSpec, rng: random.Random) -> int:
    return rng.randrange(1, F.q)


def _rand_matrix(F: FieldSpec, rows: int, cols: int, rng: random.Random) -> list[list[int]]:
    return [[rng.randrange(F.q) for _ in range(cols)] for _ in range(rows)]


def block_vandermonde(blocks: Sequence[Sequence[Sequence[int]]], F: FieldSpec) -> list[list[int]]:
    """Rows of [B_j^i] for i, j < len(blocks)."""
    from .matrix import matmul_rows
    k, ell = len(blocks), len(blocks[0])
    powers = []
    for B in blocks:
        cur = [[int(a == b) for b in range(ell)] for a in range(ell)]
        col = []
        for _ in range(k):
            col.append(cur)
            cur = matmul_rows(cur, B, F)
        powers.append(col)
    return [[powers[j][i][a][c] for j in range(k) for c in range(ell)]
            for i in range(k) for a in range(ell)]


def _block_vandermonde_trial(F: FieldSpec, rng: random.Random) -> bool:
    """Commuting blocks with nonsingular differences give a nonsingular block Vandermonde."""
    from .matrix import matmul_rows
    k, ell = rng.randint(2, 4), rng.randint(1, 3)
    if rng.random() < 0.5:
        # diagonal blocks with distinct values per position
        cols = [rng.sample(range(F.q), k) for _ in range(ell)]
        blocks = [[[cols[a][j] if a == b else 0 for b in range(ell)] for a in range(ell)]
                  for j in range(k)]
    else:
        # polynomials in one random matrix commute
        M = _rand_matrix(F, ell, ell, rng)
        blocks = []
        for _ in range(k):
            acc = [[0] * ell for _ in range(ell)]
            cur = [[int(a == b) for b in range(ell)] for a in range(ell)]
            for _ in range(3):
                c = rng.randrange(F.q)
                acc = [[F.add(x, F.mul(c, y)) for x, y in zip(ra, rb)] for ra, rb in zip(acc, cur)]
                cur = matmul_rows(cur, M, F)
            blocks.append(acc)
    # commuting blocks: det = prod_{i<j} det(B_j - B_i), so nonsingular differences suffice
    expected = 1
    for i, j in itertools.combinations(range(k), 2):
        diff = [[F.sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(blocks[j], blocks[i])]
        expected = F.mul(expected, det_rows(diff, F))
    return det_rows(block_vandermonde(blocks, F), F) == expected


def block_vandermonde_negative(F: FieldSpec, rng: random.Random) -> bool:
    """B_0 = B_1 must make the block Vandermonde singular."""
    ell = rng.randint(1, 3)
    B = [[rng.randrange(F.q) if a == b else 0 for b in range(ell)] for a in range(ell)]
    other = [[rng.randrange(F.q) if a == b else 0 for b in range(ell)] for a in range(ell)]
    return det_rows(block_vandermonde([B, B, other], F), F) == 0


def _bordered(Cs, Ds, F: FieldSpec) -> list[list[int]]:
    widths = [len(C[0]) for C in Cs]
    total = sum(widths)
    rows = []
    off = 0
    for C, w in zip(Cs, widths):
        for row in C:
            rows.append([0] * off + list(row) + [0] * (total - off - w))
        off += w
    for j in range(len(Ds[0])):
        rows.append([v for D in Ds for v in D[j]])
    return rows


def _bordered_trial(F: FieldSpec, rng: random.Random) -> bool:
    r, s = rng.randint(1, 3), rng.randint(1, 3)
    Cs = [_rand_matrix(F, r, r + 1, rng) for _ in range(s)]
    Ds = [_rand_matrix(F, s, r + 1, rng) for _ in range(s)]
    lhs = det_rows(_bordered(Cs, Ds, F), F)
    if (r * s * (s - 1) // 2) % 2:
        lhs = F.neg(lhs)
    inner = [[det_rows(Cs[i] + [Ds[i][j]], F) for i in range(s)] for j in range(s)]
    return lhs == det_rows(inner, F)


def _three_term_rhs(C0, C1, D0, D1, F: FieldSpec) -> int:
    t0 = F.mul(det_rows(C0 + [D0[0]], F), det_rows(C1 + [D1[1], D1[2]], F))
    t1 = F.mul(det_rows(C0 + [D0[1]], F), det_rows(C1 + [D1[0], D1[2]], F))
    t2 = F.mul(det_rows(C0 + [D0[2]], F), det_rows(C1 + [D1[0], D1[1]], F))
    return F.add(F.sub(t0, t1), t2)


def _three_term_trial(F: FieldSpec, rng: random.Random, vanishing: bool) -> bool:
    r = rng.randint(1, 3)
    C0 = _rand_matrix(F, r, r + 1, rng)
    C1 = _rand_matrix(F, r, r + 2, rng)
    D0 = _rand_matrix(F, 3, r + 1, rng)
    D1 = _rand_matrix(F, 3, r + 2, rng)
    if vanishing:
        # last bordered row = random combination of the others
        others = _bordered([C0, C1], [[row for row in D0[:2]], [row for row in D1[:2]]], F)
        coeffs = [rng.randrange(F.q) for _ in others]
        combo = [F.dot(coeffs, [row[c] for row in others]) for c in range(len(others[0]))]
        D0[2], D1[2] = combo[:r + 1], combo[r + 1:]
    lhs_zero = det_rows(_bordered([C0, C1], [D0, D1], F), F) == 0
    rhs_zero = _three_term_rhs(C0, C1, D0, D1, F) == 0
    if vanishing and not lhs_zero:
        return False
    return lhs_zero == rhs_zero


def _cauchy_vandermonde_trial(F: FieldSpec, rng: random.Random) -> bool:
    n = rng.randint(1, 6)
    l = rng.randint(0, n)
    pts = rng.sample(range(F.q), n + l)
    c, d = pts[:n], pts[n:]
    return cv_det(c, d, F) == det_rows(cv_matrix(c, d, F).tolist(), F)


def oracle_suite(seed: int = 0, trials: int = 100,
                 fields: Sequence[FieldSpec] | None = None) -> dict[str, dict[str, OracleResult]]:
    """Randomized checks of the block Vandermonde, bordered determinant,
    three-term vanishing and Cauchy-Vandermonde identities."""
    if fields is None:
        fields = [field_new(13), field_new(11, 3)]
    rng = random.Random(seed)
    out: dict[str, dict[str, OracleResult]] = {}
    for F in fields:
        res = {name: OracleResult() for name in ("block_vandermonde", "bordered_det", "three_term", "cauchy_vandermonde")}
        for t in range(trials):
            res["block_vandermonde"].record(_block_vandermonde_trial(F, rng))
            res["bordered_det"].record(_bordered_trial(F, rng))
            res["three_term"].record(_three_term_trial(F, rng, vanishing=t % 2 == 1))
            res["cauchy_vandermonde"].record(_cauchy_vandermonde_trial(F, rng))
        out[f"GF({F.p}^{F.m})"] = res
    return out


def oracle_passed(results: dict[str, dict[str, OracleResult]]) -> bool:
    return all(r.failed == 0 for per in results.values() for r in per.values())
