"""PMDS array code families, systematic encoding, erasure decoding and repair.

Three families are supported:

``c2``
    s = 2 global parities, any r, local groups are the diagonal MDS array code
    with sub-packetization r^n'.
``c3``
    r = s = 2 and sub-packetization 2, with upper-triangular coding blocks at
    even node positions.
``c4``
    s = 3 global parities over GF(q0^3), Cauchy-style global rows.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

from .digits import DigitProfile
from .gf import (
    Embedding,
    FieldSpec,
    SubgroupSpec,
    embedding,
    field_new,
    find_subgroup,
    is_prime,
    NoSuchSubgroup,
    prime_factors,
    subfield_basis,
    three_wise_independent,
)
from .localcode import (
    GeometryError,
    HelperMissing,
    LambdaTable,
    LocalMatrices,
    RepairPlan,
    build_A,
    build_A_variants,
    build_H,
    phi,
    plan_from_combination,
    pool_requirement,
    repair_bandwidth_formula,
    repair_plan_local,
    select_lambdas,
)
from .matrix import BlockMatrix, DenseMatrix, Diagonal, Inconsistent, expand, rref, solve_rows

FAMILIES = ("c2", "c3", "c4")
DEFAULT_FIELD_CAP = 1 << 16


class NoField(ValueError):
    pass


class PoolExhausted(ValueError):
    pass


class SpecViolation(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class Unrecoverable(ValueError):
    def __init__(self, erased: Sequence[int], deficiency: int):
        self.erased = tuple(erased)
        self.deficiency = deficiency
        super().__init__(f"erasure pattern {list(erased)} is rank deficient by {deficiency}")


@dataclass(frozen=True)
class CodeSpec:
    family: str
    mu: int
    n: int
    nprime: int | None
    r: int
    s: int
    ell: int
    field: FieldSpec
    subgroup: SubgroupSpec
    lam: tuple[tuple[int, ...], ...]
    theta: tuple[int, ...]
    info_set: tuple[tuple[int, int], ...]
    base_field: FieldSpec | None = None
    delta: tuple[int, ...] | None = None
    d0: int | None = None
    d1: int | None = None

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def k(self) -> int:
        """Number of information nodes."""
        return self.mu * (self.n - self.r) - self.s

    @property
    def num_nodes(self) -> int:
        return self.mu * self.n

    def parity_nodes(self) -> list[tuple[int, int]]:
        info = set(self.info_set)
        return [(g, j) for g in range(self.mu) for j in range(self.n) if (g, j) not in info]

    def embed(self) -> Embedding | None:
        if self.family != "c4":
            return None
        return embedding(self.base_field, self.field)

    # -- invariants ------------------------------------------------------------

    def violations(self) -> list[str]:
        out: list[str] = []
        fam, mu, n, r, s = self.family, self.mu, self.n, self.r, self.s
        if fam not in FAMILIES:
            return [f"unknown family {fam!r}"]
        if mu < 2:
            out.append("mu must be >= 2")
        G = self.subgroup
        try:
            G.check()
        except NoSuchSubgroup as exc:
            out.append(str(exc))
        if len(self.theta) != mu:
            out.append("need one theta per group")
        if fam in ("c2", "c4"):
            if self.nprime is None or not 1 <= self.nprime < n:
                out.append("need n > n' >= 1")
                return out
            if self.ell != r ** self.nprime:
                out.append("ell must equal r^n'")
            lam_field = self.base_field if fam == "c4" else self.field
            out.extend(LambdaTable(n, self.nprime, r, self.lam, lam_field).violations())
        if fam == "c2":
            if s != 2:
                out.append("c2 has s = 2")
            if any(not G.contains(v) for row in self.lam for v in row):
                out.append("eigenvalues must lie in the subgroup")
            out.extend(_coset_violations(G, self.theta, "theta"))
        elif fam == "c3":
            if (r, s, self.ell) != (2, 2, 2):
                out.append("c3 has r = s = ell = 2")
            flat = [row[0] for row in self.lam]
            if len(self.lam) != n or any(len(row) != 1 for row in self.lam):
                out.append("c3 needs one eigenvalue per node")
            elif len(set(flat)) != n or 0 in flat:
                out.append("c3 eigenvalues must be pairwise distinct and nonzero")
            elif any(not G.contains(v) for v in flat):
                out.append("eigenvalues must lie in the subgroup")
            out.extend(_coset_violations(G, self.theta, "theta"))
        elif fam == "c4":
            out.extend(self._c4_violations())
        out.extend(self._info_set_violations())
        return out

    def _c4_violations(self) -> list[str]:
        out = []
        base, big = self.base_field, self.field
        if base is None or big.m != 3 * base.m or big.p != base.p:
            return ["c4 needs q = q0^3"]
        if self.s != 3:
            out.append("c4 has s = 3")
        d0, d1 = self.d0, self.d1
        if d0 is None or d1 is None or d0 == d1:
            out.append("d0, d1 must be two distinct elements of GF(q0)")
            return out
        G = self.subgroup
        if G.field != base:
            out.append("subgroup must live in GF(q0)")
        for row in self.lam:
            for v in row:
                if v == d0:
                    out.append(f"eigenvalue {v} equals d0")
                elif v == d1 or not G.contains(base.inv(base.sub(v, d1))):
                    out.append(f"1/({v} - d1) is not in the subgroup")
        emb = embedding(base, big)
        if any(t == 0 for t in self.theta) or not three_wise_independent(self.theta, emb):
            out.append("theta is not 3-wise independent over GF(q0)")
        if self.delta is None or len(self.delta) != self.mu:
            out.append("need one delta per group")
        else:
            out.extend(_coset_violations(G, self.delta, "delta"))
        return out

    def _info_set_violations(self) -> list[str]:
        expected = self.k
        info = list(self.info_set)
        if len(info) != expected or len(set(info)) != expected:
            return [f"info_set must list {expected} distinct nodes"]
        if any(not (0 <= g < self.mu and 0 <= j < self.n) for g, j in info):
            return ["info_set node out of range"]
        return []

    def validate(self) -> "CodeSpec":
        bad = self.violations()
        if bad:
            raise SpecViolation("; ".join(bad))
        return self

    # -- serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "family": self.family,
            "mu": self.mu,
            "n": self.n,
            "nprime": self.nprime,
            "r": self.r,
            "s": self.s,
            "field": self.field.to_dict(),
            "subgroup": {
                "generator": self.subgroup.generator,
                "order": self.subgroup.order,
                "coset_reps": list(self.subgroup.coset_reps),
            },
            "lambda": [list(row) for row in self.lam],
            "theta": list(self.theta),
            "delta": list(self.delta) if self.delta is not None else None,
            "d0": self.d0,
            "d1": self.d1,
            "info_set": [list(x) for x in self.info_set],
        }
        if self.base_field is not None:
            d["base_field"] = self.base_field.to_dict()
        return d

    def canonical(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> bytes:
        return hashlib.sha256(self.canonical().encode()).digest()

    @classmethod
    def from_dict(cls, d: dict, validate: bool = True) -> "CodeSpec":
        big = FieldSpec.from_dict(d["field"])
        base = FieldSpec.from_dict(d["base_field"]) if d.get("base_field") else None
        sg = d["subgroup"]
        sub = SubgroupSpec(base or big, int(sg["generator"]), int(sg["order"]),
                           tuple(int(x) for x in sg.get("coset_reps", [1])))
        family = d["family"]
        r = int(d["r"])
        nprime = d.get("nprime")
        ell = 2 if family == "c3" else r ** int(nprime)
        spec = cls(
            family=family,
            mu=int(d["mu"]),
            n=int(d["n"]),
            nprime=None if nprime is None else int(nprime),
            r=r,
            s=int(d["s"]),
            ell=ell,
            field=big,
            subgroup=sub,
            lam=tuple(tuple(int(v) for v in row) for row in d["lambda"]),
            theta=tuple(int(t) for t in d["theta"]),
            info_set=tuple((int(g), int(j)) for g, j in d["info_set"]),
            base_field=base,
            delta=None if d.get("delta") is None else tuple(int(x) for x in d["delta"]),
            d0=d.get("d0"),
            d1=d.get("d1"),
        )
        return spec.validate() if validate else spec

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def loads(cls, text: str, validate: bool = True) -> "CodeSpec":
        return cls.from_dict(json.loads(text), validate=validate)


def _coset_violations(G: SubgroupSpec, values: Sequence[int], name: str) -> list[str]:
    if any(v == 0 for v in values):
        return [f"{name} values must be nonzero"]
    for i, j in itertools.combinations(range(len(values)), 2):
        if G.same_coset(values[i], values[j]):
            return [f"{name}_{i} and {name}_{j} lie in the same coset"]
    return []


def systematic_info_set(mu: int, n: int, r: int, s: int) -> tuple[tuple[int, int], ...]:
    """Information nodes: everything except the last r nodes of each group and
    s extra parities placed round-robin just below the local parities."""
    if s > mu * (n - r):
        raise GeometryError("more global parities than non-local-parity nodes")
    parity = {(g, j) for g in range(mu) for j in range(n - r, n)}
    used = [0] * mu
    for extra in range(s):
        g = extra % mu
        while used[g] >= n - r:  # group exhausted, move on
            g = (g + 1) % mu
        parity.add((g, n - r - 1 - used[g]))
        used[g] += 1
    return tuple((g, j) for g in range(mu) for j in range(n) if (g, j) not in parity)


# -- field search -----------------------------------------------------------------

def _field_of_order(q: int) -> FieldSpec:
    ps = prime_factors(q)
    if len(ps) != 1:
        raise NoField(f"{q} is not a prime power")
    p = ps[0]
    m = round(math.log(q, p))
    if p ** m != q:
        raise NoField(f"{q} is not a prime power")
    return field_new(p, m)


def _search(start: int, cap: int, min_order: int, min_cosets: int,
            q: int | None) -> tuple[FieldSpec, SubgroupSpec]:
    if q is not None:
        F = _field_of_order(q)
        try:
            return F, find_subgroup(F, min_order, min_cosets)
        except NoSuchSubgroup as exc:
            raise NoField(str(exc)) from exc
    for cand in range(max(start, 2), cap + 1):
        if not is_prime(cand):
            continue
        F = field_new(cand)
        try:
            return F, find_subgroup(F, min_order, min_cosets)
        except NoSuchSubgroup:
            continue
    raise NoField(f"no prime field below {cap} has a subgroup of order >= {min_order} "
                  f"with >= {min_cosets} cosets")


@dataclass(frozen=True)
class FieldPlan:
    """Field and subgroup a builder would pick; ``q`` is the code's field order."""

    field: FieldSpec
    subgroup: SubgroupSpec
    q: int
    bound: int | None
    pool: int | None


def plan_field(family: str, mu: int, n: int, nprime: int | None = None, r: int = 2,
               q: int | None = None, field_cap: int = DEFAULT_FIELD_CAP) -> FieldPlan:
    if family == "c2":
        bound = phi(n, nprime, r)
        need = pool_requirement(n, nprime, r)
        F, G = _search(mu * bound + 1, field_cap, max(bound, need), mu, q)
        return FieldPlan(F, G, F.q, bound, need)
    if family == "c3":
        F, G = _search(2, field_cap, n, mu, q)
        return FieldPlan(F, G, F.q, None, n)
    if family == "c4":
        bound = phi(n, nprime, r)
        need = pool_requirement(n, nprime, r)
        F, G = _search(mu * (bound + 1) + 1, field_cap, max(bound, need) + 1, mu, q)
        return FieldPlan(F, G, F.q ** 3, bound, need)
    raise GeometryError(f"unknown family {family!r}")


# -- builders ---------------------------------------------------------------------

def build_c2(mu: int, n: int, nprime: int, r: int, q: int | None = None,
             field_cap: int = DEFAULT_FIELD_CAP) -> "CodeInstance":
    """Two global parities, any number r of local parities.

    ``q`` overrides the smallest-first field search.
    """
    if mu < 2:
        raise GeometryError("mu must be >= 2")
    plan = plan_field("c2", mu, n, nprime, r, q, field_cap)
    F, G = plan.field, plan.subgroup
    table = select_lambdas(n, nprime, r, G.elements(), F)
    spec = CodeSpec(
        family="c2", mu=mu, n=n, nprime=nprime, r=r, s=2, ell=r ** nprime, field=F,
        subgroup=G, lam=table.values, theta=G.coset_reps[:mu],
        info_set=systematic_info_set(mu, n, r, 2),
    )
    return assemble(spec)


def build_c3(mu: int, n: int, q: int | None = None,
             field_cap: int = DEFAULT_FIELD_CAP) -> "CodeInstance":
    """r = s = 2 with sub-packetization 2 and triangular blocks at even nodes."""
    if mu < 2 or n < 4:
        raise GeometryError("need mu >= 2 and n >= 4")
    plan = plan_field("c3", mu, n, q=q, field_cap=field_cap)
    F, G = plan.field, plan.subgroup
    lam = tuple((F.pow(G.generator, i),) for i in range(n))
    spec = CodeSpec(
        family="c3", mu=mu, n=n, nprime=None, r=2, s=2, ell=2, field=F, subgroup=G,
        lam=lam, theta=G.coset_reps[:mu], info_set=systematic_info_set(mu, n, 2, 2),
    )
    return assemble(spec)


def build_c4(mu: int, n: int, nprime: int, r: int, q0: int | None = None,
             field_cap: int = DEFAULT_FIELD_CAP) -> "CodeInstance":
    """Three global parities over GF(q0^3); ``q0`` overrides the search."""
    if mu < 2:
        raise GeometryError("mu must be >= 2")
    plan = plan_field("c4", mu, n, nprime, r, q0, field_cap)
    base, G, need = plan.field, plan.subgroup, plan.pool
    big = field_new(base.p, 3 * base.m)
    emb, (v0, v1, v2) = subfield_basis(big, base)
    subgroup_elems = G.elements()
    for d1 in range(base.q):
        pool = [base.add(d1, h) for h in subgroup_elems]
        taken = set(pool) | {d1}
        d0 = next((x for x in range(base.q) if x not in taken), None)
        if d0 is not None and len([v for v in pool if v != d0]) >= need:
            break
    else:
        raise PoolExhausted("no (d0, d1) leaves enough eigenvalues")
    pool = [v for v in pool if v != d0]
    table = select_lambdas(n, nprime, r, pool, base)
    if mu > base.q:
        raise PoolExhausted("need mu distinct xi values in GF(q0)")
    theta = []
    for i in range(mu):
        xi = emb(i if base.m == 1 else base.from_coeffs(base.to_coeffs(i)))
        theta.append(big.add(v0, big.add(big.mul(xi, v1), big.mul(big.mul(xi, xi), v2))))
    spec = CodeSpec(
        family="c4", mu=mu, n=n, nprime=nprime, r=r, s=3, ell=r ** nprime, field=big,
        subgroup=G, lam=table.values, theta=tuple(theta),
        info_set=systematic_info_set(mu, n, r, 3), base_field=base,
        delta=G.coset_reps[:mu], d0=d0, d1=d1,
    )
    return assemble(spec)


def build(family: str, mu: int, n: int, nprime: int | None = None, r: int = 2,
          q: int | None = None) -> "CodeInstance":
    if family == "c2":
        return build_c2(mu, n, nprime, r, q=q)
    if family == "c3":
        return build_c3(mu, n, q=q)
    if family == "c4":
        return build_c4(mu, n, nprime, r, q0=q)
    raise GeometryError(f"unknown family {family!r}")


# -- stripes ------------------------------------------------------------------

@dataclass
class StripeState:
    """mu*n node columns of ell symbols; node (g, j) is column g*n + j."""

    symbols: list[list[int]]
    erased: list[bool] = dc_field(default_factory=list)

    def __post_init__(self):
        if not self.erased:
            self.erased = [False] * len(self.symbols)

    def copy(self) -> "StripeState":
        return StripeState([list(c) for c in self.symbols], list(self.erased))

    def erase(self, nodes: Iterable[int]) -> "StripeState":
        out = self.copy()
        for x in nodes:
            out.erased[x] = True
            out.symbols[x] = [0] * len(out.symbols[x])
        return out

    def erased_nodes(self) -> list[int]:
        return [i for i, e in enumerate(self.erased) if e]

    def same_content(self, other: "StripeState") -> bool:
        return self.symbols == other.symbols


# -- instances ----------------------------------------------------------------

@dataclass
class _Component:
    """Independent slice of the parity-check system; ``cols[c] = (node, symbol row)``."""

    rows: list[list[int]]
    cols: list[tuple[int, int]]


class CodeInstance:
    def __init__(self, spec: CodeSpec, H: BlockMatrix, local: LocalMatrices | None,
                 local_H: BlockMatrix):
        self.spec = spec
        self.H = H
        self.local = local
        self.local_H = local_H
        self.field = spec.field
        self.info_set = spec.info_set
        self._components: list[_Component] | None = None
        self._encoder: list[list[list[int]]] | None = None
        self._recovery: dict[frozenset, list] = {}
        self._plans: dict[int, RepairPlan] = {}

    def __repr__(self):
        s = self.spec
        return (f"CodeInstance({s.family}, mu={s.mu}, n={s.n}, n'={s.nprime}, r={s.r}, "
                f"s={s.s}, ell={s.ell}, q={s.q})")

    def node_index(self, g: int, j: int) -> int:
        if not (0 <= g < self.spec.mu and 0 <= j < self.spec.n):
            raise IndexError(f"node ({g}, {j}) out of range")
        return g * self.spec.n + j

    def group_parity_check(self, g: int) -> BlockMatrix:
        """Rows and columns of H belonging to local group g."""
        r, n = self.spec.r, self.spec.n
        return self.H.thick_rows(range(g * r, g * r + r)).thick_columns(range(g * n, g * n + n))

    # -- decoupled systems ---------------------------------------------------

    def components(self) -> list[_Component]:
        if self._components is None:
            H, ell = self.H, self.spec.ell
            if H.is_diagonal():
                self._components = [
                    _Component(H.scalar_slice(a), [(h, a) for h in range(H.block_cols)])
                    for a in range(ell)
                ]
            else:
                self._components = [
                    _Component(expand(H).tolist(),
                               [(h, a) for h in range(H.block_cols) for a in range(ell)])
                ]
        return self._components

    # -- encode ----------------------------------------------------------------

    def _encoder_matrices(self) -> list[list[list[int]]]:
        if self._encoder is None:
            F = self.field
            info_nodes = {self.node_index(g, j) for g, j in self.info_set}
            mats = []
            for comp in self.components():
                p_cols = [c for c, (h, _) in enumerate(comp.cols) if h not in info_nodes]
                i_cols = [c for c, (h, _) in enumerate(comp.cols) if h in info_nodes]
                mp = [[row[c] for c in p_cols] for row in comp.rows]
                rhs = [[F.neg(row[c]) for c in i_cols] for row in comp.rows]
                mats.append(solve_rows(mp, rhs, F, unique=True))
            self._encoder = mats
        return self._encoder

    def encode(self, info: Sequence[int]) -> StripeState:
        spec, F = self.spec, self.field
        ell = spec.ell
        if len(info) != spec.k * ell:
            raise LengthMismatch(f"expected {spec.k * ell} symbols, got {len(info)}")
        cols = [[0] * ell for _ in range(spec.num_nodes)]
        for idx, (g, j) in enumerate(self.info_set):
            cols[self.node_index(g, j)] = [F.validate(int(v)) for v in info[idx * ell:(idx + 1) * ell]]
        info_nodes = {self.node_index(g, j) for g, j in self.info_set}
        for comp, gen in zip(self.components(), self._encoder_matrices()):
            p_cols = [hc for hc in comp.cols if hc[0] not in info_nodes]
            x_info = [cols[h][a] for h, a in comp.cols if h in info_nodes]
            for (h, a), grow in zip(p_cols, gen):
                cols[h][a] = F.dot(grow, x_info)
        return StripeState(cols)

    def syndrome_is_zero(self, stripe: StripeState) -> bool:
        F = self.field
        for comp in self.components():
            x = [stripe.symbols[h][a] for h, a in comp.cols]
            if any(F.dot(row, x) for row in comp.rows):
                return False
        return True

    # -- decode ----------------------------------------------------------------

    def _recovery_for(self, erased: frozenset) -> list:
        cached = self._recovery.get(erased)
        if cached is not None:
            return cached
        F = self.field
        plan = []
        deficiency = 0
        for comp in self.components():
            u_cols = [c for c, (h, _) in enumerate(comp.cols) if h in erased]
            k_cols = [c for c, (h, _) in enumerate(comp.cols) if h not in erased]
            if not u_cols:
                plan.append((u_cols, k_cols, []))
                continue
            mu_ = [[row[c] for c in u_cols] for row in comp.rows]
            # independent equations = pivot columns of the transpose
            _, pivot_rows = rref([list(col) for col in zip(*mu_)], F)
            if len(pivot_rows) < len(u_cols):
                deficiency += len(u_cols) - len(pivot_rows)
                continue
            sq = [mu_[i] for i in pivot_rows]
            rhs = [[F.neg(comp.rows[i][c]) for c in k_cols] for i in pivot_rows]
            plan.append((u_cols, k_cols, solve_rows(sq, rhs, F, unique=True)))
        if deficiency:
            raise Unrecoverable(sorted(erased), deficiency)
        self._recovery[erased] = plan
        return plan

    def decode(self, stripe: StripeState, check: bool = True) -> StripeState:
        erased = frozenset(stripe.erased_nodes())
        out = stripe.copy()
        if not erased:
            return out
        if len(stripe.symbols) != self.spec.num_nodes:
            raise LengthMismatch("stripe has the wrong number of nodes")
        F = self.field
        plan = self._recovery_for(erased)
        for comp, (u_cols, k_cols, rec) in zip(self.components(), plan):
            if not u_cols:
                continue
            known = [out.symbols[comp.cols[c][0]][comp.cols[c][1]] for c in k_cols]
            for c, rrow in zip(u_cols, rec):
                h, a = comp.cols[c]
                out.symbols[h][a] = F.dot(rrow, known)
        out.erased = [False] * len(out.erased)
        if check and not self.syndrome_is_zero(out):
            raise Inconsistent("surviving symbols are not part of a codeword")
        return out

    def is_recoverable(self, erased: Iterable[int]) -> bool:
        try:
            self._recovery_for(frozenset(erased))
        except Unrecoverable:
            return False
        return True

    # -- repair ----------------------------------------------------------------

    def repair_plan(self, j: int) -> RepairPlan:
        """Repair plan for position j of any group (all groups share one local code)."""
        plan = self._plans.get(j)
        if plan is None:
            if not 0 <= j < self.spec.n:
                raise IndexError(f"node {j} outside [0, {self.spec.n})")
            if self.spec.family == "c3":
                plan = _c3_plan(self.local_H, j)
            else:
                plan = repair_plan_local(self.local_H, self.spec.nprime, j)
            self._plans[j] = plan
        return plan

    def repair(self, stripe: StripeState, g: int, j: int) -> tuple[list[int], RepairPlan]:
        target = self.node_index(g, j)
        plan = self.repair_plan(j)
        helpers = {}
        for h in range(self.spec.n):
            x = self.node_index(g, h)
            if x == target:
                continue
            if stripe.erased[x]:
                raise HelperMissing(f"helper ({g}, {h}) is erased")
            helpers[h] = stripe.symbols[x]
        return plan.execute(helpers), plan

    def theoretical_repair(self, j: int) -> tuple[Fraction, Fraction]:
        return theoretical_repair(self.spec, j)


def theoretical_repair(spec: CodeSpec, j: int) -> tuple[Fraction, Fraction]:
    """(bandwidth, access) promised for node position j."""
    n = spec.n
    if spec.family == "c3":
        if n % 2 == 0:
            v = Fraction(3 * n, 2) - 2
        elif j % 2 == 0:
            v = Fraction(3 * n - 3, 2)
        else:
            v = Fraction(3 * n - 5, 2)
        return v, v
    return repair_bandwidth_formula(n, spec.nprime, spec.r, j), Fraction(spec.ell * (n - 1))


def _c3_plan(local_H: BlockMatrix, j: int) -> RepairPlan:
    if j % 2 == 0:
        # e_0 applied to both group parity equations
        combo = [[1, 0, 0, 0], [0, 0, 1, 0]]
    else:
        # S * (first equation) + S' * (second), S = diag(1, -1), S' = [[0, 0], [1, 0]];
        # the -1 makes S + S'A_h rank one at triangular helpers in any characteristic
        combo = [[1, 0, 0, 0], [0, local_H.field.neg(1), 1, 0]]
    columns = [
        [row for jj in range(2) for row in local_H.block_rows_of(jj, h)]
        for h in range(local_H.block_cols)
    ]
    return plan_from_combination(columns, combo, j, local_H.field)


# -- assembly -------------------------------------------------------------------

def assemble(spec: CodeSpec, validate: bool = True) -> CodeInstance:
    """Build the global parity-check matrix for ``spec``.

    With ``validate=False`` the spec invariants are skipped, which is how
    deliberately broken instances are produced for negative controls.
    """
    if validate:
        spec.validate()
    F = spec.field
    if spec.family == "c3":
        local, local_H, global_rows = _assemble_c3(spec)
    else:
        local, local_H, global_rows = _assemble_diag(spec)
    mu, n, r = spec.mu, spec.n, spec.r
    grid: list[list] = []
    for g in range(mu):
        for jr in range(r):
            row = [None] * (mu * n)
            for h in range(n):
                row[g * n + h] = local_H.blocks[jr][h]
            grid.append(row)
    grid.extend(global_rows)
    H = BlockMatrix.build(grid, spec.ell, F)
    return CodeInstance(spec, H, local, local_H)


def _assemble_diag(spec: CodeSpec):
    F = spec.field
    emb = spec.embed()
    lift = emb if emb is not None else (lambda v: v)
    table = LambdaTable(spec.n, spec.nprime, spec.r,
                        tuple(tuple(lift(v) for v in row) for row in spec.lam), F)
    mats = build_A(table, DigitProfile(spec.r, spec.nprime))
    if spec.family == "c4":
        mats = build_A_variants(mats, lift(spec.d0), lift(spec.d1), F)
    local_H = build_H(mats, spec.r, F)
    mu, n, r = spec.mu, spec.n, spec.r
    top = [Diagonal(tuple(F.pow(v, r) for v in mats.A[h])) for h in range(n)]
    rows = [[top[h] for g in range(mu) for h in range(n)]]
    if spec.family == "c2":
        rows.append([
            Diagonal(tuple(F.mul(spec.theta[g], F.inv(v)) for v in mats.A[h]))
            for g in range(mu) for h in range(n)
        ])
    else:
        rows.append([
            Diagonal(tuple(F.mul(spec.theta[g], v) for v in mats.A_prime[h]))
            for g in range(mu) for h in range(n)
        ])
        rows.append([
            Diagonal(tuple(F.mul(lift(spec.delta[g]), v) for v in mats.A_dprime[h]))
            for g in range(mu) for h in range(n)
        ])
    return mats, local_H, rows


def _assemble_c3(spec: CodeSpec):
    F = spec.field
    lam = [row[0] for row in spec.lam]
    blocks = []
    for h, v in enumerate(lam):
        if h % 2 == 0:
            blocks.append(DenseMatrix.from_rows([[v, 1], [0, v]], F))
        else:
            blocks.append(Diagonal((v, v)))
    ones = Diagonal((1, 1))
    local_H = BlockMatrix.build([[ones] * spec.n, blocks], 2, F)
    mu, n = spec.mu, spec.n
    sq = [F.mul(v, v) for v in lam]
    rows = [
        [Diagonal((sq[h], sq[h])) for g in range(mu) for h in range(n)],
        [Diagonal((F.div(spec.theta[g], lam[h]),) * 2) for g in range(mu) for h in range(n)],
    ]
    return None, local_H, rows


def load_spec_file(path) -> CodeInstance:
    with open(path) as fh:
        return assemble(CodeSpec.loads(fh.read()))
