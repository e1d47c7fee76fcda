"""Uniformity measurement: relative L-infinity deviation, k-coordinate
marginal scans, and the low-weight Fourier characterization of exact
k-uniformity.

eps_uniform is the relative scale: a distribution p over S is eps-uniform
when |p(x) - 1/|S|| <= eps/|S| everywhere, so the reported value is
max_x |p(x)*|S| - 1|.  All C(m, k) subsets are scanned exactly; desk-scale
spaces make sampling unnecessary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from groupmix.fourier import (
    Dist,
    frobenius_norm_sq,
    low_weight_coefficients,
    marginalize,
    max_low_weight_norm,
)
from groupmix.groups import ProductGroup
from groupmix.irreps import Irrep, IrrepSet

FOURIER_UNIFORMITY_TOL = 1e-10


@dataclass(frozen=True)
class UniformityReport:
    eps: float
    worst_subset: tuple[int, ...]
    per_subset: dict | None = None


def eps_uniform(p: Dist) -> float:
    """Exact max of |p(x)*|S| - 1| over the space."""
    return float(np.max(np.abs(p.values * p.size - 1.0)))


def eps_k_uniform(p: Dist, k: int, full_table: bool = False) -> UniformityReport:
    """Worst eps_uniform over all k-coordinate marginals."""
    if not isinstance(p.space, ProductGroup):
        if k != 1:
            raise ValueError("eps_k_uniform with k != 1 needs a product-group distribution")
        return UniformityReport(eps_uniform(p), (0,))
    m = p.space.arity
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}], got {k}")
    worst, arg = -1.0, None
    table = {} if full_table else None
    for subset in itertools.combinations(range(m), k):
        e = eps_uniform(marginalize(p, subset))
        if table is not None:
            table[subset] = e
        if e > worst:
            worst, arg = e, subset
    return UniformityReport(worst, arg, table)


def eps_k_uniform_counts(counts: np.ndarray, n: int, m: int, k: int, full_table: bool = False):
    """Exact-rational eps_k for an integer-count vector over H^m.

    Used where the distribution is a normalized counting measure, so exact
    zero can be certified without floating point.
    """
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    arr = counts.reshape((n,) * m, order="F")
    worst: Fraction = Fraction(-1)
    arg = None
    table = {} if full_table else None
    for subset in itertools.combinations(range(m), k):
        other = tuple(i for i in range(m) if i not in subset)
        marg = arr.sum(axis=other) if other else arr
        cells = n ** len(subset)
        hi = int(marg.max())
        lo = int(marg.min())
        dev = max(
            abs(Fraction(hi * cells, total) - 1),
            abs(Fraction(lo * cells, total) - 1),
        )
        if table is not None:
            table[subset] = dev
        if dev > worst:
            worst, arg = dev, subset
    return UniformityReport(worst, arg, table)


def is_k_uniform_fourier(
    p: Dist, k: int, s: IrrepSet, tol: float = FOURIER_UNIFORMITY_TOL
) -> tuple[bool, float]:
    """Exact k-uniformity test through weight-1..k coefficients.

    Returns (verdict, max coefficient Frobenius norm).  The verdict is true
    when every low-weight coefficient norm is at most tol/|space|, the
    natural coefficient scale of an eps = tol deviation.
    """
    low = low_weight_coefficients(p, k, s)
    worst = max_low_weight_norm(low)
    return worst <= tol / p.size, worst


def rep_bound_check(p: Dist, rho: Irrep) -> tuple[float, float]:
    """Coefficient-norm bound for an eps-uniform distribution.

    For non-trivial rho: |p_hat(rho)|_2^2 <= d_rho * eps^2 / |G|^2 where
    eps = eps_uniform(p).  Returns (lhs, rhs); the inequality is asserted.
    """
    if rho.dim == 1 and bool(np.allclose(rho.character, 1.0, atol=1e-6)):
        raise ValueError("rep_bound_check needs a non-trivial irrep")
    n = rho.matrices.shape[0]
    if p.size != n:
        raise ValueError("distribution and irrep live on different groups")
    coeff = np.tensordot(rho.matrices.conj(), p.values, axes=([0], [0])) / n
    lhs = frobenius_norm_sq(coeff)
    eps = eps_uniform(p)
    rhs = rho.dim * eps**2 / float(n) ** 2
    assert lhs <= rhs + 1e-15, f"coefficient bound violated: {lhs} > {rhs}"
    return lhs, rhs


def rep_bound_check_all(p: Dist, s: IrrepSet) -> tuple[float, float, tuple]:
    """Worst-margin coefficient bound over every non-trivial (product) irrep.

    Works on base groups and product groups alike; returns the (lhs, rhs)
    pair of the tightest instance together with its irrep key.
    """
    from groupmix.fourier import dist_fourier, tuple_weight

    eps = eps_uniform(p)
    g_size = float(p.size)
    fd = dist_fourier(p, s)
    dims = [r.dim for r in s.irreps]
    worst = None
    for key, mat in fd.coeffs.items():
        if isinstance(key, tuple):
            if tuple_weight(key) == 0:
                continue
            d = int(np.prod([dims[a] for a in key]))
        else:
            if key == 0:
                continue
            d = dims[key]
        lhs = frobenius_norm_sq(mat)
        rhs = d * eps**2 / g_size**2
        assert lhs <= rhs + 1e-15, f"coefficient bound violated at {key}: {lhs} > {rhs}"
        if worst is None or lhs - rhs > worst[0] - worst[1]:
            worst = (lhs, rhs, key)
    return worst


def report_to_text(report: UniformityReport) -> str:
    """Tabular (subset, eps) serialization for the CLI."""
    lines = ["subset\teps"]
    if report.per_subset:
        for subset, e in sorted(report.per_subset.items()):
            lines.append(f"{','.join(map(str, subset))}\t{float(e)!r}")
    lines.append(f"worst:{','.join(map(str, report.worst_subset))}\t{float(report.eps)!r}")
    return "\n".join(lines)
