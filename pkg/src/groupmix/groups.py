"""Explicit finite groups (cyclic, SL(2,q), A5) and mixed-radix product indexing.

Groups are stored as dense multiplication tables with elements labelled
0..n-1 and the identity always at index 0.  Product groups H^m are never
materialized as tables; they are handled through flat/tuple index arithmetic
with coordinate 0 least significant.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field

import numpy as np

MAX_BASE_ORDER = 10_000
# Dense pipelines are sized for A5^4 (60^4 = 12_960_000 states, ~0.6 GB
# working set for a complex transform).  Anything larger is rejected.
MAX_DENSE_STATES = 13_500_000

_FULL_ASSOC_ORDER = 256      # full O(n^3) associativity scan up to here
_ASSOC_SAMPLES = 1_000_000


class GroupConstructionError(ValueError):
    pass


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class GroupSpec:
    """One of cyclic(n), sl2(q) with q prime, or alt5."""

    kind: str
    param: int = 0

    def __post_init__(self):
        if self.kind == "cyclic":
            if self.param < 1:
                raise GroupConstructionError(f"cyclic order must be >= 1, got {self.param}")
        elif self.kind == "sl2":
            if not is_prime(self.param):
                raise GroupConstructionError(
                    f"sl2 requires a prime field size, q must be prime: got q={self.param}"
                )
        elif self.kind == "alt5":
            pass
        else:
            raise GroupConstructionError(f"unknown group kind {self.kind!r}")

    def __str__(self):
        if self.kind == "cyclic":
            return f"cyclic:{self.param}"
        if self.kind == "sl2":
            return f"sl2:{self.param}"
        return "a5"


def cyclic(n: int) -> GroupSpec:
    return GroupSpec("cyclic", n)


def sl2(q: int) -> GroupSpec:
    return GroupSpec("sl2", q)


def alt5() -> GroupSpec:
    return GroupSpec("alt5")


def parse_group_spec(text: str) -> GroupSpec:
    """Parse "cyclic:12" | "sl2:5" | "a5" (also accepts "alt5")."""
    t = text.strip().lower()
    if t in ("a5", "alt5"):
        return alt5()
    if ":" in t:
        kind, _, arg = t.partition(":")
        try:
            val = int(arg)
        except ValueError:
            raise GroupConstructionError(f"bad group parameter in {text!r}") from None
        if kind == "cyclic":
            return cyclic(val)
        if kind == "sl2":
            return sl2(val)
    raise GroupConstructionError(f"cannot parse group spec {text!r}")


@dataclass(frozen=True)
class GroupTable:
    """A finite group as an explicit multiplication table.

    mul[x, y] is the index of x*y, inv[x] the index of x^{-1}, and the
    identity sits at index 0.
    """

    spec: GroupSpec
    order: int
    mul: np.ndarray          # (n, n) int32
    inv: np.ndarray          # (n,) int32
    labels: tuple[str, ...]
    fingerprint: str = field(default="")
    identity_index: int = 0

    def __post_init__(self):
        self.mul.setflags(write=False)
        self.inv.setflags(write=False)
        if not self.fingerprint:
            object.__setattr__(self, "fingerprint", _fingerprint(self))

    @property
    def size(self) -> int:
        return self.order

    def __repr__(self):
        return f"GroupTable({self.spec}, order={self.order})"


def _fingerprint(g: GroupTable) -> str:
    """Stable hash over (kind, parameter, order, first 64 mul entries)."""
    head = g.mul.ravel()[:64].astype(np.int64)
    blob = f"{g.spec.kind}|{g.spec.param}|{g.order}|".encode() + head.tobytes()
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class ProductGroup:
    """H^m with componentwise product; flat index = sum_i x_i * n^i."""

    base: GroupTable
    arity: int

    def __post_init__(self):
        if self.arity < 1:
            raise GroupConstructionError(f"product arity must be >= 1, got {self.arity}")

    @property
    def size(self) -> int:
        return self.base.order ** self.arity

    @property
    def fingerprint(self) -> str:
        return f"{self.base.fingerprint}^{self.arity}"

    def __repr__(self):
        return f"ProductGroup({self.base.spec}^{self.arity})"


Space = GroupTable | ProductGroup


def space_size(space: Space) -> int:
    return space.size


def same_space(a: Space, b: Space) -> bool:
    return a.fingerprint == b.fingerprint


def check_dense_budget(space: Space):
    n = space_size(space)
    if n > MAX_DENSE_STATES:
        raise GroupConstructionError(
            f"dense pipeline over {space!r} needs {n} states, above the supported "
            f"maximum of {MAX_DENSE_STATES} (A5^4-sized working sets)"
        )


# ---------------------------------------------------------------------------
# construction


def build_group(spec: GroupSpec) -> GroupTable:
    """Build the multiplication/inverse table for a GroupSpec.

    Element order is canonical: cyclic by residue; sl2 lexicographic by
    (a, b, c, d) with the identity swapped to index 0; alt5 lexicographic
    by permutation image (the identity is already first).
    """
    if spec.kind == "cyclic":
        table = _build_cyclic(spec.param)
    elif spec.kind == "sl2":
        table = _build_sl2(spec.param)
    else:
        table = _build_alt5()
    if table.order > MAX_BASE_ORDER:
        raise GroupConstructionError(
            f"group order {table.order} above supported base-group maximum {MAX_BASE_ORDER}"
        )
    return table


def _build_cyclic(n: int) -> GroupTable:
    idx = np.arange(n, dtype=np.int32)
    mul = np.add.outer(idx, idx) % n
    inv = (-idx) % n
    labels = tuple(str(i) for i in range(n))
    return GroupTable(cyclic(n), n, mul.astype(np.int32), inv.astype(np.int32), labels)


def _sl2_elements(q: int) -> list[tuple[int, int, int, int]]:
    els = [
        (a, b, c, d)
        for a, b, c, d in itertools.product(range(q), repeat=4)
        if (a * d - b * c) % q == 1
    ]
    ident = (1 % q, 0, 0, 1 % q)
    i0 = els.index(ident)
    els[0], els[i0] = els[i0], els[0]
    return els

def _build_sl2(q: int) -> GroupTable:
    els = _sl2_elements(q)
    n = len(els)
    E = np.array(els, dtype=np.int64)            # (n, 4) rows (a, b, c, d)
    code_of = E[:, 0] * q**3 + E[:, 1] * q**2 + E[:, 2] * q + E[:, 3]
    idx_of_code = np.full(q**4, -1, dtype=np.int32)
    idx_of_code[code_of] = np.arange(n, dtype=np.int32)

    a, b, c, d = E[:, 0], E[:, 1], E[:, 2], E[:, 3]
    mul = np.empty((n, n), dtype=np.int32)
    for x in range(n):
        ax, bx, cx, dx = els[x]
        ra = (ax * a + bx * c) % q
        rb = (ax * b + bx * d) % q
        rc = (cx * a + dx * c) % q
        rd = (cx * b + dx * d) % q
        mul[x] = idx_of_code[ra * q**3 + rb * q**2 + rc * q + rd]
    # inverse of [[a,b],[c,d]] with det 1 is [[d,-b],[-c,a]]
    inv_code = (d % q) * q**3 + ((-b) % q) * q**2 + ((-c) % q) * q + (a % q)
    inv = idx_of_code[inv_code].astype(np.int32)
    labels = tuple(f"[[{e[0]},{e[1]}],[{e[2]},{e[3]}]]" for e in els)
    return GroupTable(sl2(q), n, mul, inv, labels)


def _perm_parity(p: tuple[int, ...]) -> int:
    inversions = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inversions % 2


def _cycle_word(p: tuple[int, ...]) -> str:
    seen = [False] * len(p)
    parts = []
    for start in range(len(p)):
        if seen[start] or p[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        j = p[start]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) if parts else "e"


def _build_alt5() -> GroupTable:
    perms = [p for p in itertools.permutations(range(5)) if _perm_parity(p) == 0]
    n = len(perms)
    P = np.array(perms, dtype=np.int64)          # (n, 5) images, lex sorted
    codes = sum(P[:, i] * 5 ** (4 - i) for i in range(5))
    idx_of_code = np.full(5**5, -1, dtype=np.int32)
    idx_of_code[codes] = np.arange(n, dtype=np.int32)

    mul = np.empty((n, n), dtype=np.int32)
    for x in range(n):
        comp = P[x][P]                           # (x∘y)(i) = x[y[i]]
        mul[x] = idx_of_code[sum(comp[:, i] * 5 ** (4 - i) for i in range(5))]
    inv_imgs = np.argsort(P, axis=1)
    inv = idx_of_code[sum(inv_imgs[:, i] * 5 ** (4 - i) for i in range(5))].astype(np.int32)
    labels = tuple(_cycle_word(p) for p in perms)
    return GroupTable(alt5(), n, mul, inv, labels)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class GroupReport:
    identity_ok: bool
    inverse_ok: bool
    associativity_ok: bool
    associativity_mode: str      # "full" or "sampled"
    associativity_checked: int

    @property
    def all_passed(self) -> bool:
        return self.identity_ok and self.inverse_ok and self.associativity_ok


def verify_group(g: GroupTable, seed: int = 0) -> GroupReport:
    """Check identity, inverse, and associativity axioms on the table.

    Associativity is scanned in full for orders up to 256 and on 10^6
    sampled triples above that.
    """
    n = g.order
    idx = np.arange(n)
    e = g.identity_index
    identity_ok = bool(np.array_equal(g.mul[e], idx) and np.array_equal(g.mul[:, e], idx))
    inverse_ok = bool(np.all(g.mul[idx, g.inv] == e))

    if n <= _FULL_ASSOC_ORDER:
        mode, checked = "full", n**3
        ok = True
        for z in range(n):
            lhs = g.mul[g.mul, z]             # (x, y) -> (x*y)*z
            rhs = g.mul[:, g.mul[:, z]]       # (x, y) -> x*(y*z)
            if not np.array_equal(lhs, rhs):
                ok = False
                break
    else:
        mode, checked = "sampled", _ASSOC_SAMPLES
        rng = np.random.default_rng(seed)
        xs, ys, zs = rng.integers(0, n, size=(3, _ASSOC_SAMPLES))
        ok = bool(np.all(g.mul[g.mul[xs, ys], zs] == g.mul[xs, g.mul[ys, zs]]))
    return GroupReport(identity_ok, inverse_ok, ok, mode, checked)


# ---------------------------------------------------------------------------
# product indexing


def tuple_to_flat(pg: ProductGroup, t) -> int:
    n = pg.base.order
    if len(t) != pg.arity:
        raise ValueError(f"expected {pg.arity}-tuple, got {len(t)} coordinates")
    flat = 0
    for i in reversed(range(pg.arity)):
        ti = int(t[i])
        if not 0 <= ti < n:
            raise ValueError(f"coordinate {i} out of range: {ti} not in [0, {n})")
        flat = flat * n + ti
    return flat


def flat_to_tuple(pg: ProductGroup, flat: int) -> tuple[int, ...]:
    n = pg.base.order
    if not 0 <= flat < pg.size:
        raise ValueError(f"flat index {flat} out of range for {pg!r}")
    out = []
    for _ in range(pg.arity):
        flat, r = divmod(flat, n)
        out.append(r)
    return tuple(out)


def flat_digits(pg: ProductGroup, flat: np.ndarray) -> np.ndarray:
    """Vectorized flat -> (arity, ...) coordinate digits, coordinate 0 first."""
    n = pg.base.order
    flat = np.asarray(flat, dtype=np.int64)
    digs = np.empty((pg.arity,) + flat.shape, dtype=np.int64)
    for i in range(pg.arity):
        digs[i] = flat % n
        flat = flat // n
    return digs


def digits_to_flat(pg: ProductGroup, digs: np.ndarray) -> np.ndarray:
    n = pg.base.order
    flat = np.zeros(np.asarray(digs[0]).shape, dtype=np.int64)
    for i in reversed(range(pg.arity)):
        flat = flat * n + np.asarray(digs[i], dtype=np.int64)
    return flat


def product_mul(pg: ProductGroup, x, y) -> np.ndarray:
    """Coordinatewise product of flat indices (vectorized)."""
    dx, dy = flat_digits(pg, x), flat_digits(pg, y)
    out = np.empty_like(dx)
    for i in range(pg.arity):
        out[i] = pg.base.mul[dx[i], dy[i]]
    return digits_to_flat(pg, out)


def product_inv(pg: ProductGroup, x) -> np.ndarray:
    dx = flat_digits(pg, x)
    out = np.empty_like(dx)
    for i in range(pg.arity):
        out[i] = pg.base.inv[dx[i]]
    return digits_to_flat(pg, out)
