"""Numerical computation of complete unitary irrep sets from group tables.

The decomposition works on the regular representation: averaging a random
Hermitian matrix over the group action projects it into the commutant, whose
eigenspaces are invariant subspaces.  Generic draws land one irreducible
subrepresentation per eigenvalue cluster; the rare merged cluster is split
recursively with a fresh draw.  Everything is deterministic given
(group, tol, seed).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from groupmix.groups import GroupTable

DEFAULT_TOL = 1e-9
_CLUSTER_REL_GAP = 1e-8      # eigenvalue clustering threshold
_DIM_INTEGRALITY = 1e-6      # never round dimensions silently beyond this
_MAX_SPLIT_ATTEMPTS = 8
_FULL_PAIR_ORDER = 256       # homomorphism check: full up to here, sampled above
_SAMPLED_PAIRS = 100_000
_CHUNK = 256


class IrrepComputationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Irrep:
    """One unitary irreducible representation as a stacked matrix array."""

    dim: int
    matrices: np.ndarray     # (n, d, d) complex128
    character: np.ndarray    # (n,) complex128

    def __post_init__(self):
        self.matrices.setflags(write=False)
        self.character.setflags(write=False)

    @property
    def is_trivial(self) -> bool:
        return self.dim == 1 and np.allclose(self.character, 1.0, atol=1e-6)


@dataclass(frozen=True)
class IrrepSet:
    """Complete inequivalent unitary irreps, trivial first then by dimension."""

    group_fingerprint: str
    irreps: tuple[Irrep, ...]
    tol: float

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self.irreps)

    @property
    def order(self) -> int:
        return self.irreps[0].matrices.shape[0]

    def __len__(self):
        return len(self.irreps)


def quasirandomness_degree(s: IrrepSet) -> int:
    """Minimum dimension over non-trivial irreps (1 for abelian groups)."""
    nontrivial = [r.dim for r in s.irreps[1:]]
    return min(nontrivial) if nontrivial else 1


# ---------------------------------------------------------------------------
# decomposition


def _random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (a + a.conj().T) / 2.0
    return h / max(np.linalg.norm(h), 1e-30)


def _cluster_boundaries(eigvals: np.ndarray) -> list[np.ndarray]:
    scale = max(float(np.max(np.abs(eigvals))), 1.0)
    gaps = np.diff(eigvals)
    cuts = np.nonzero(gaps > _CLUSTER_REL_GAP * scale)[0]
    pieces = np.split(np.arange(len(eigvals)), cuts + 1)
    return pieces


def _char_norm_sq(character: np.ndarray) -> float:
    return float(np.mean(np.abs(character) ** 2))


def _split_stack(rho: np.ndarray, rng: np.random.Generator) -> list[np.ndarray]:
    """Fully decompose a unitary representation given as a (n, d, d) stack."""
    n, d, _ = rho.shape
    if d == 1:
        return [rho]
    chi = np.einsum("gii->g", rho)
    if abs(_char_norm_sq(chi) - 1.0) < 0.1:
        return [rho]
    for _ in range(_MAX_SPLIT_ATTEMPTS):
        a = _random_hermitian(rng, d)
        t = np.einsum("gij,jk,glk->il", rho, a, rho.conj()) / n
        eigvals, eigvecs = np.linalg.eigh(t)
        clusters = _cluster_boundaries(eigvals)
        if len(clusters) == 1:
            continue
        out = []
        for idx in clusters:
            v = eigvecs[:, idx]
            sub = np.einsum("ji,gjk,kl->gil", v.conj(), rho, v)
            out.extend(_split_stack(sub, rng))
        return out
    raise IrrepComputationError(
        "failed to split a reducible invariant subspace; rerun with a different seed"
    )


def _extract_subrep(u: np.ndarray, left_action: np.ndarray) -> np.ndarray:
    """rho(g) = U^* R(g) U for an orthonormal invariant basis U (n, d)."""
    n, d = u.shape
    out = np.empty((n, d, d), dtype=np.complex128)
    for lo in range(0, n, _CHUNK):
        sl = left_action[lo : lo + _CHUNK]
        out[lo : lo + _CHUNK] = np.einsum("xi,gxj->gij", u.conj(), u[sl])
    return out


def compute_irreps(g: GroupTable, tol: float = DEFAULT_TOL, seed: int = 0) -> IrrepSet:
    """Compute a complete set of inequivalent unitary irreps of g.

    Raises IrrepComputationError when eigenvalue clusters cannot be resolved
    at the working precision; a different seed almost always fixes that.
    An incomplete set is never returned silently.
    """
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-12, 1e-6], got {tol}")
    n = g.order
    rng = np.random.default_rng(seed)

    if n == 1:
        triv = np.ones((1, 1, 1), dtype=np.complex128)
        irrep = Irrep(1, triv, np.ones(1, dtype=np.complex128))
        return IrrepSet(g.fingerprint, (irrep,), tol)

    # left_action[g, x] = g^{-1} x, so (R(g) f)[x] = f[left_action[g, x]]
    left_action = g.mul[g.inv, :]

    stacks: list[np.ndarray] = []
    for _ in range(_MAX_SPLIT_ATTEMPTS):
        a = _random_hermitian(rng, n)
        t = np.zeros((n, n), dtype=np.complex128)
        for gi in range(n):
            p = left_action[gi]
            t += a[np.ix_(p, p)]
        t /= n
        eigvals, eigvecs = np.linalg.eigh(t)
        clusters = _cluster_boundaries(eigvals)
        if len(clusters) == 1 and n > 1:
            continue
        for idx in clusters:
            u = eigvecs[:, idx]
            stacks.extend(_split_stack(_extract_subrep(u, left_action), rng))
        break
    else:
        raise IrrepComputationError(
            "regular representation did not split; rerun with a different seed"
        )

    # deduplicate equivalent copies by character distance (basis independent)
    kept: list[tuple[np.ndarray, np.ndarray]] = []
    dedupe_gap = 10.0 * tol * n
    for stack in stacks:
        chi = np.einsum("gii->g", stack)
        if any(np.linalg.norm(chi - c) < max(dedupe_gap, 1e-6) for _, c in kept):
            continue
        kept.append((stack, chi))

    total = sum(s.shape[1] ** 2 for s, _ in kept)
    if total != n:
        raise IrrepComputationError(
            f"irrep dimensions {sorted(s.shape[1] for s, _ in kept)} give "
            f"sum of squares {total} != {n}; rerun with a different seed"
        )

    def sort_key(item):
        stack, chi = item
        trivial = bool(np.allclose(chi, 1.0, atol=1e-6))
        rounded = tuple(np.round(chi.real, 6)) + tuple(np.round(chi.imag, 6))
        return (not trivial, stack.shape[1], rounded)

    kept.sort(key=sort_key)
    irreps = tuple(Irrep(s.shape[1], s, c) for s, c in kept)
    return IrrepSet(g.fingerprint, irreps, tol)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class IrrepSetReport:
    completeness_ok: bool
    identity_residual: float
    homomorphism_residual: float
    homomorphism_mode: str
    unitarity_residual: float
    min_character_gap: float
    inequivalence_gap_required: float
    tol: float

    @property
    def inequivalence_ok(self) -> bool:
        return self.min_character_gap >= self.inequivalence_gap_required

    @property
    def all_passed(self) -> bool:
        bound = max(self.tol, 1e-8)
        return (
            self.completeness_ok
            and self.identity_residual <= bound
            and self.homomorphism_residual <= bound
            and self.unitarity_residual <= bound
            and self.inequivalence_ok
        )


def check_irrep_set(g: GroupTable, s: IrrepSet, seed: int = 0) -> IrrepSetReport:
    """Residuals for the defining properties of a computed irrep set."""
    n = g.order
    ident_res = 0.0
    hom_res = 0.0
    unit_res = 0.0
    if n <= _FULL_PAIR_ORDER:
        mode = "full"
        pair_x = np.repeat(np.arange(n), n)
        pair_y = np.tile(np.arange(n), n)
    else:
        mode = "sampled"
        rng = np.random.default_rng(seed)
        pair_x = rng.integers(0, n, size=_SAMPLED_PAIRS)
        pair_y = rng.integers(0, n, size=_SAMPLED_PAIRS)
    pair_xy = g.mul[pair_x, pair_y]

    for r in s.irreps:
        m = r.matrices
        ident_res = max(ident_res, float(np.linalg.norm(m[0] - np.eye(r.dim))))
        eye = np.eye(r.dim)
        u = m @ m.conj().transpose(0, 2, 1) - eye
        unit_res = max(unit_res, float(np.max(np.sqrt(np.sum(np.abs(u) ** 2, axis=(1, 2))))))
        for lo in range(0, len(pair_x), 65536):
            hi = lo + 65536
            delta = m[pair_x[lo:hi]] @ m[pair_y[lo:hi]] - m[pair_xy[lo:hi]]
            res = np.sqrt(np.sum(np.abs(delta) ** 2, axis=(1, 2)))
            hom_res = max(hom_res, float(np.max(res)))

    chars = [r.character for r in s.irreps]
    gaps = [
        float(np.linalg.norm(chars[i] - chars[j]))
        for i in range(len(chars))
        for j in range(i + 1, len(chars))
    ]
    min_gap = min(gaps) if gaps else float("inf")
    complete = sum(r.dim**2 for r in s.irreps) == n
    required_gap = 10.0 * s.tol * n
    return IrrepSetReport(complete, ident_res, hom_res, mode, unit_res, min_gap, required_gap, s.tol)


@dataclass(frozen=True)
class SchurReport:
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def verify_schur(s: IrrepSet, tol: float | None = None) -> SchurReport:
    """Orthogonality residual of matrix entries across the whole set.

    E_x rho(x)_{k,h} conj(psi(x)_{i,j}) must vanish except on the diagonal
    case rho == psi, k == i, h == j, where it equals 1/d_rho.
    """
    if tol is None:
        tol = max(s.tol, 1e-8)
    n = s.order
    worst = 0.0
    for a, ra in enumerate(s.irreps):
        for b, rb in enumerate(s.irreps):
            got = np.einsum("xkh,xij->khij", ra.matrices, rb.matrices.conj()) / n
            if a == b:
                d = ra.dim
                expected = np.einsum("ki,hj->khij", np.eye(d), np.eye(d)) / d
                got = got - expected
            worst = max(worst, float(np.max(np.abs(got))))
    return SchurReport(worst, tol)


# ---------------------------------------------------------------------------
# disk cache

_MAGIC = "groupmix-irreps v1"


class IrrepCacheError(RuntimeError):
    pass


def save_irreps(s: IrrepSet, path: str | os.PathLike):
    """Self-describing text format; doubles serialized at full precision."""
    lines = [
        _MAGIC,
        f"fingerprint {s.group_fingerprint}",
        f"order {s.order}",
        f"tol {s.tol:.17g}",
        f"count {len(s.irreps)}",
    ]
    for r in s.irreps:
        lines.append(f"irrep dim {r.dim}")
        for x in range(s.order):
            row = r.matrices[x].ravel()
            lines.append(" ".join(f"{v.real:.17g} {v.imag:.17g}" for v in row))
    lines.append("end")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_irreps(path: str | os.PathLike, g: GroupTable) -> IrrepSet:
    """Load a cached set, validate its fingerprint, and re-check invariants."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
        if lines[0] != _MAGIC:
            raise IrrepCacheError(f"{path}: not a groupmix irrep cache")
        fp = lines[1].split()[1]
        order = int(lines[2].split()[1])
        tol = float(lines[3].split()[1])
        count = int(lines[4].split()[1])
        if fp != g.fingerprint:
            raise IrrepCacheError(
                f"{path}: fingerprint mismatch (cache {fp[:12]}..., group {g.fingerprint[:12]}...)"
            )
        if order != g.order:
            raise IrrepCacheError(f"{path}: order {order} != group order {g.order}")
        pos = 5
        irreps = []
        for _ in range(count):
            head = lines[pos].split()
            if head[0] != "irrep":
                raise IrrepCacheError(f"{path}: malformed irrep header at line {pos + 1}")
            d = int(head[2])
            mats = np.empty((order, d, d), dtype=np.complex128)
            for x in range(order):
                vals = np.fromstring(lines[pos + 1 + x], sep=" ")
                if vals.size != 2 * d * d:
                    raise IrrepCacheError(f"{path}: truncated matrix row at line {pos + 2 + x}")
                mats[x] = (vals[0::2] + 1j * vals[1::2]).reshape(d, d)
            chi = np.einsum("gii->g", mats)
            irreps.append(Irrep(d, mats, chi))
            pos += 1 + order
        if pos >= len(lines) or lines[pos] != "end":
            raise IrrepCacheError(f"{path}: missing end marker (truncated file)")
    except (IndexError, ValueError) as exc:
        raise IrrepCacheError(f"{path}: parse error ({exc})") from exc

    s = IrrepSet(fp, tuple(irreps), tol)
    report = check_irrep_set(g, s)
    if not report.all_passed:
        raise IrrepCacheError(f"{path}: cached data fails invariant checks: {report}")
    return s


_memo: dict[tuple, IrrepSet] = {}


def get_irreps(
    g: GroupTable,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    cache_dir: str | None = None,
    use_cache: bool = True,
) -> IrrepSet:
    """Memoized irreps, optionally backed by a fingerprint-keyed disk cache."""
    key = (g.fingerprint, tol, seed)
    path = None
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        path = os.path.join(cache_dir, f"{g.fingerprint[:24]}_t{tol:.0e}_s{seed}.irr")
    if use_cache and key in _memo:
        s = _memo[key]
        if path is not None and not os.path.exists(path):
            save_irreps(s, path)
        return s
    s = None
    if path is not None and use_cache and os.path.exists(path):
        s = load_irreps(path, g)
    if s is None:
        s = compute_irreps(g, tol=tol, seed=seed)
        if path is not None:
            save_irreps(s, path)
    if use_cache:
        _memo[key] = s
    return s
