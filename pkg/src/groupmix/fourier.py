"""Fourier analysis on a group and tensor-structured transforms on powers H^m.

Normalization follows the expectation convention: a coefficient is
c(rho) = E_x f(x) conj(rho(x)), inversion is f(x) = sum_rho d_rho
tr(c(rho) rho(x)^T), and convolution is the plain sum p*q(x) =
sum_y p(y) q(y^{-1} x), so the convolution theorem carries the explicit
|G| factor: (p*q)^(rho) = |G| p_hat(rho) q_hat(rho).

Irreps of H^m are tensor products of base irreps, indexed by m-tuples of
base-irrep indices with coordinate 0 as the least significant kron factor.
The product transform runs one coordinate at a time (m * n^(m+1) scalar
work) instead of materializing product-group matrices.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from groupmix.groups import (
    GroupTable,
    ProductGroup,
    Space,
    check_dense_budget,
    flat_digits,
    same_space,
    space_size,
)
from groupmix.irreps import IrrepSet

DIST_SUM_TOL = 1e-9
NEG_CLAMP = -1e-15
_REAL_TOL = 1e-9
_DIRECT_ENGINE_MAX = 10_000       # above this many states convolve() uses fourier
_DIRECT_REST_MAX = 4096           # direct product engine builds an R x R index table


class SpaceMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Dist:
    """Dense probability vector over a group or product group."""

    space: Space
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def size(self) -> int:
        return space_size(self.space)

    def __repr__(self):
        return f"Dist({self.space!r}, {self.size} states)"


def make_dist(space: Space, values) -> Dist:
    """Validate and ingest a probability vector (tiny negatives clamp to 0)."""
    check_dense_budget(space)
    v = np.asarray(values, dtype=np.float64)
    n = space_size(space)
    if v.shape != (n,):
        raise ValueError(f"expected {n} values for {space!r}, got shape {v.shape}")
    low = float(v.min()) if n else 0.0
    if low < NEG_CLAMP:
        raise ValueError(f"negative probability {low} below clamp threshold {NEG_CLAMP}")
    if low < 0.0:
        v = np.where(v < 0.0, 0.0, v)
    total = float(v.sum())
    if abs(total - 1.0) > DIST_SUM_TOL:
        raise ValueError(f"probabilities sum to {total}, not 1 within {DIST_SUM_TOL}")
    return Dist(space, v)


def uniform(space: Space) -> Dist:
    n = space_size(space)
    return make_dist(space, np.full(n, 1.0 / n))


def point_mass(space: Space, index: int = 0) -> Dist:
    n = space_size(space)
    v = np.zeros(n)
    v[index] = 1.0
    return make_dist(space, v)


def tv_distance(p: Dist, q: Dist) -> float:
    """Statistical (total variation) distance: half the L1 distance."""
    if not same_space(p.space, q.space):
        raise SpaceMismatchError("tv_distance across different spaces")
    return 0.5 * float(np.sum(np.abs(p.values - q.values)))


def l1_distance(p: Dist, q: Dist) -> float:
    if not same_space(p.space, q.space):
        raise SpaceMismatchError("l1_distance across different spaces")
    return float(np.sum(np.abs(p.values - q.values)))


# ---------------------------------------------------------------------------
# matrix norm


def frobenius_norm_sq(m) -> float:
    """Sum of squared entry magnitudes, equal to tr(M M*)."""
    m = np.asarray(m)
    return float(np.sum(np.abs(m) ** 2))


# ---------------------------------------------------------------------------
# coefficients


def tuple_weight(t: tuple[int, ...]) -> int:
    """Number of non-trivial components of a product-irrep index."""
    return sum(1 for a in t if a != 0)


@dataclass(frozen=True)
class FourierData:
    """Per-irrep coefficient matrices of a function.

    Keys are irrep indices for a base group (arity 1 transforms done through
    `fourier_forward`) and m-tuples of base-irrep indices for H^m.
    """

    irreps: IrrepSet
    arity: int
    coeffs: dict

    @property
    def size(self) -> int:
        return self.irreps.order**self.arity

    def storage(self) -> int:
        """Total complex entries; equals the space size for a full transform."""
        return sum(m.shape[0] * m.shape[1] for m in self.coeffs.values())


def _check_base(s: IrrepSet, space: Space):
    base = space.base if isinstance(space, ProductGroup) else space
    if s.group_fingerprint != base.fingerprint:
        raise SpaceMismatchError("irrep set does not belong to this space's base group")


def _forward_kernel(values, s: IrrepSet, m: int) -> dict:
    n = s.order
    conj_mats = [r.matrices.conj() for r in s.irreps]
    blocks = {(): np.reshape(np.asarray(values), (n,) * m, order="F")}
    for _ in range(m):
        nxt = {}
        for prefix in list(blocks):
            arr = blocks.pop(prefix)
            for a, cm in enumerate(conj_mats):
                out = np.tensordot(cm, arr, axes=([0], [0])) / n
                out = np.moveaxis(out, (0, 1), (-2, -1))
                nxt[prefix + (a,)] = out
        blocks = nxt
    coeffs = {}
    for t in list(blocks):
        arr = blocks.pop(t)
        d_total = int(np.prod([s.irreps[a].dim for a in t]))
        rows = [2 * (m - 1 - i) for i in range(m)]
        cols = [r + 1 for r in rows]
        coeffs[t] = np.ascontiguousarray(arr.transpose(rows + cols).reshape(d_total, d_total))
    return coeffs


def _inverse_kernel(coeffs: dict, s: IrrepSet, m: int) -> np.ndarray:
    n = s.order
    blocks = {}
    for t, mat in coeffs.items():
        ds = [s.irreps[a].dim for a in t]
        arr = np.asarray(mat, dtype=np.complex128).reshape(ds[::-1] + ds[::-1])
        perm = []
        for i in range(m):
            perm.extend([m - 1 - i, 2 * m - 1 - i])
        blocks[t] = arr.transpose(perm)      # axes (r_0, s_0, ..., r_{m-1}, s_{m-1})
    for coord in reversed(range(m)):
        nxt = {}
        for t in list(blocks):
            arr = blocks.pop(t)
            a = t[coord]
            out = np.tensordot(
                s.irreps[a].matrices, arr, axes=([1, 2], [2 * coord, 2 * coord + 1])
            )
            out = np.moveaxis(out, 0, 2 * coord) * s.irreps[a].dim
            key = t[:coord]
            if key in nxt:
                nxt[key] = nxt[key] + out
            else:
                nxt[key] = out
        blocks = nxt
    (arr,) = blocks.values()
    return np.ravel(arr, order="F")


def fourier_forward(f, s: IrrepSet) -> FourierData:
    """Coefficients c(rho) = E_x f(x) conj(rho(x)) on a single group."""
    f = np.asarray(f)
    if f.shape != (s.order,):
        raise ValueError(f"function length {f.shape} does not match group order {s.order}")
    coeffs = {t[0]: mat for t, mat in _forward_kernel(f, s, 1).items()}
    return FourierData(s, 1, coeffs)


def fourier_inverse(fd: FourierData) -> np.ndarray:
    """Pointwise reconstruction; complex output (realify at the call site)."""
    if fd.arity != 1:
        raise ValueError("fourier_inverse expects a single-group transform")
    if set(fd.coeffs) != set(range(len(fd.irreps.irreps))):
        missing = set(range(len(fd.irreps.irreps))) - set(fd.coeffs)
        raise ValueError(f"missing coefficient for irrep index {sorted(missing)}")
    return _inverse_kernel({(i,): m for i, m in fd.coeffs.items()}, fd.irreps, 1)


def product_fourier_forward(f, pg: ProductGroup, s: IrrepSet) -> FourierData:
    """Transform on H^m by m successive single-coordinate partial transforms."""
    _check_base(s, pg)
    check_dense_budget(pg)
    f = np.asarray(f)
    if f.shape != (pg.size,):
        raise ValueError(f"function length {f.shape} does not match {pg!r}")
    return FourierData(s, pg.arity, _forward_kernel(f, s, pg.arity))


def product_fourier_inverse(fd: FourierData) -> np.ndarray:
    expected = len(fd.irreps.irreps) ** fd.arity
    if len(fd.coeffs) != expected:
        raise ValueError(f"expected {expected} coefficient tuples, got {len(fd.coeffs)}")
    return _inverse_kernel(fd.coeffs, fd.irreps, fd.arity)


def dist_fourier(p: Dist, s: IrrepSet) -> FourierData:
    if isinstance(p.space, ProductGroup):
        return product_fourier_forward(p.values, p.space, s)
    _check_base(s, p.space)
    return fourier_forward(p.values, s)


# ---------------------------------------------------------------------------
# convolution engines


def convolve_direct(p: Dist, q: Dist) -> Dist:
    """Definitionally exact sum p*q(x) = sum_y p(y) q(y^{-1} x)."""
    if not same_space(p.space, q.space):
        raise SpaceMismatchError("convolution across different spaces")
    if isinstance(p.space, ProductGroup) and p.space.arity > 1:
        out = _convolve_direct_product(p.space, p.values, q.values)
    else:
        base = p.space.base if isinstance(p.space, ProductGroup) else p.space
        out = _convolve_direct_single(base, p.values, q.values)
    return make_dist(p.space, out)


def _convolve_direct_single(g: GroupTable, pv, qv) -> np.ndarray:
    n = g.order
    out = np.zeros(n)
    for c in range(n):
        out[g.mul[:, c]] += pv * qv[c]
    return out


def _rest_inverse_table(g: GroupTable, m_rest: int) -> np.ndarray:
    """Index table L[Y, X] = flat(Y^{-1} X) over H^{m_rest}."""
    n = g.order
    r = n**m_rest
    if r > _DIRECT_REST_MAX:
        raise ValueError(
            f"direct product convolution would build a {r}x{r} index table; "
            "use the fourier engine for spaces this large"
        )
    linv = g.mul[g.inv, :]
    digs = flat_digits(ProductGroup(g, m_rest), np.arange(r))
    acc = np.zeros((r, r), dtype=np.int64)
    for i in range(m_rest):
        acc += linv[np.ix_(digs[i], digs[i])].astype(np.int64) * n**i
    return acc


def _convolve_direct_product(pg: ProductGroup, pv, qv) -> np.ndarray:
    n = pg.base.order
    rest = _rest_inverse_table(pg.base, pg.arity - 1)
    r = rest.shape[0]
    pmat = pv.reshape(n, r, order="F")
    qmat = qv.reshape(n, r, order="F")
    out = np.zeros((n, r))
    for c in range(n):
        out[pg.base.mul[:, c]] += pmat @ qmat[c][rest]
    return out.ravel(order="F")


def convolve_fourier(p: Dist, q: Dist, s: IrrepSet) -> Dist:
    """Convolution through coefficient products: (p*q)^ = |G| p_hat q_hat."""
    if not same_space(p.space, q.space):
        raise SpaceMismatchError("convolution across different spaces")
    _check_base(s, p.space)
    m = p.space.arity if isinstance(p.space, ProductGroup) else 1
    g_size = float(p.size)
    cp = _forward_kernel(p.values, s, m)
    cq = cp if q.values is p.values or q is p else _forward_kernel(q.values, s, m)
    prod = {}
    for t in list(cp):
        a = cp.pop(t)
        b = a if cq is cp else cq.pop(t)
        prod[t] = g_size * (a @ b)
    del cp, cq
    vals = _inverse_kernel(prod, s, m)
    worst_imag = float(np.max(np.abs(vals.imag)))
    if worst_imag > _REAL_TOL:
        raise ValueError(f"convolution output has imaginary residual {worst_imag}")
    return make_dist(p.space, vals.real)


def convolve(p: Dist, q: Dist, s: IrrepSet | None = None, engine: str | None = None) -> Dist:
    """Engine dispatch: direct up to 10^4 states, fourier above (overridable)."""
    if engine is None:
        engine = "fourier" if p.size > _DIRECT_ENGINE_MAX else "direct"
    if engine == "direct":
        return convolve_direct(p, q)
    if engine == "fourier":
        if s is None:
            raise ValueError("fourier engine needs the base group's irreps")
        return convolve_fourier(p, q, s)
    raise ValueError(f"unknown convolution engine {engine!r}")


# ---------------------------------------------------------------------------
# marginals and low-weight coefficients


def _marginal_values(values: np.ndarray, pg: ProductGroup, coords: tuple[int, ...]) -> np.ndarray:
    m = pg.arity
    if not coords:
        raise ValueError("empty coordinate subset")
    if len(set(coords)) != len(coords) or not all(0 <= c < m for c in coords):
        raise ValueError(f"bad coordinate subset {coords} for arity {m}")
    n = pg.base.order
    arr = values.reshape((n,) * m, order="F")
    other = tuple(i for i in range(m) if i not in coords)
    marg = arr.sum(axis=other) if other else arr
    kept_sorted = sorted(coords)
    marg = marg.transpose([kept_sorted.index(c) for c in coords])
    return np.ravel(marg, order="F")


def marginalize(p: Dist, coords) -> Dist:
    """Exact coordinate-sum marginal onto the listed coordinates, in order."""
    if not isinstance(p.space, ProductGroup):
        raise ValueError("marginalize needs a product-group distribution")
    coords = tuple(int(c) for c in coords)
    out_space = ProductGroup(p.space.base, len(coords))
    return make_dist(out_space, _marginal_values(p.values, p.space, coords))


def low_weight_coefficients(p: Dist, k: int, s: IrrepSet) -> dict:
    """All coefficients of weight 1..k, computed through subset marginals.

    A coefficient supported on coordinates S equals n^(|S|-m) times the
    matching coefficient of the marginal onto S, so only |H|^|S|-sized
    transforms are needed.
    """
    if not isinstance(p.space, ProductGroup):
        raise ValueError("low_weight_coefficients needs a product-group distribution")
    _check_base(s, p.space)
    m = p.space.arity
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}], got {k}")
    n = p.space.base.order
    n_irr = len(s.irreps)
    out = {}
    for w in range(1, k + 1):
        for subset in itertools.combinations(range(m), w):
            marg = _marginal_values(p.values, p.space, subset)
            small = _forward_kernel(marg, s, w)
            scale = float(n) ** (w - m)
            for tau in itertools.product(range(1, n_irr), repeat=w):
                full = [0] * m
                for pos, a in zip(subset, tau):
                    full[pos] = a
                out[tuple(full)] = small[tau] * scale
    return out


def max_low_weight_norm(coeffs: dict) -> float:
    if not coeffs:
        return 0.0
    return max(np.sqrt(frobenius_norm_sq(mat)) for mat in coeffs.values())


# ---------------------------------------------------------------------------
# import/export

_DIST_MAGIC = "groupmix-dist v1"


def save_dist(p: Dist, path: str | os.PathLike):
    base = p.space.base if isinstance(p.space, ProductGroup) else p.space
    arity = p.space.arity if isinstance(p.space, ProductGroup) else 1
    lines = [
        _DIST_MAGIC,
        f"fingerprint {base.fingerprint}",
        f"arity {arity}",
        f"size {p.size}",
    ]
    lines.extend(f"{v:.17g}" for v in p.values)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dist(path: str | os.PathLike, space: Space) -> Dist:
    base = space.base if isinstance(space, ProductGroup) else space
    arity = space.arity if isinstance(space, ProductGroup) else 1
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
        if lines[0] != _DIST_MAGIC:
            raise ValueError(f"{path}: not a groupmix dist file")
        fp = lines[1].split()[1]
        file_arity = int(lines[2].split()[1])
        size = int(lines[3].split()[1])
        if fp != base.fingerprint:
            raise ValueError(f"{path}: fingerprint mismatch")
        if file_arity != arity or size != space_size(space):
            raise ValueError(f"{path}: arity/size mismatch with {space!r}")
        vals = np.array([float(x) for x in lines[4 : 4 + size]])
        if vals.size != size:
            raise ValueError(f"{path}: truncated value block")
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path}: parse error ({exc})") from exc
    return make_dist(space, vals)
