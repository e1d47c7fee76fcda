"""Repairing an almost-k-uniform distribution into an exactly k-uniform one.

Subtract the low-degree part ell (the inverse transform of all weight-1..k
coefficients), then mix with uniform to restore non-negativity:

    q = (1 - beta) * (p - ell) + beta / |G|

Removing a fixed-weight slice of coefficients keeps the function real
(conjugation permutes irreps without changing weight), ell sums to zero
(the trivial coefficient is untouched), and the mixture has no low-weight
coefficients at all, so q is exactly k-uniform.  With eps the measured
coefficient scale (|p_hat| <= eps/|G| for all low weights), the formula
beta = (m|H|)^(2k) * eps guarantees q >= 0 and an L1 repair distance of at
most 3 (m|H|)^(2k) eps; adaptive mode instead uses the smallest beta that
makes q non-negative, which is what desk-scale eps values call for.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from groupmix.fourier import (
    Dist,
    _forward_kernel,
    _inverse_kernel,
    _marginal_values,
    make_dist,
    max_low_weight_norm,
)
from groupmix.groups import ProductGroup
from groupmix.irreps import IrrepSet

_IMAG_TOL = 1e-12
_SUM_TOL = 1e-10


class RepairInfeasibleError(ValueError):
    def __init__(self, message: str, eps_in: float):
        super().__init__(message)
        self.eps_in = eps_in


def _low_data(p: Dist, k: int, s: IrrepSet):
    """(ell as complex array, max low-weight coefficient norm)."""
    if not isinstance(p.space, ProductGroup):
        raise ValueError("repair operations need a product-group distribution")
    m = p.space.arity
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}], got {k}")
    n = p.space.base.order
    n_irr = len(s.irreps)
    acc = np.zeros((n,) * m, dtype=np.complex128, order="F")
    worst = 0.0
    for w in range(1, k + 1):
        for subset in itertools.combinations(range(m), w):
            marg = _marginal_values(p.values, p.space, subset)
            small = _forward_kernel(marg, s, w)
            scale = float(n) ** (w - m)
            full_weight = {
                tau: small[tau] * scale
                for tau in itertools.product(range(1, n_irr), repeat=w)
            }
            for mat in full_weight.values():
                worst = max(worst, float(np.sqrt(np.sum(np.abs(mat) ** 2))))
            lifted = _inverse_kernel(full_weight, s, w).reshape((n,) * w, order="F")
            shape = [1] * m
            for pos in subset:
                shape[pos] = n
            axis_order = np.argsort(np.argsort(subset))
            acc += lifted.transpose(tuple(axis_order)).reshape(shape, order="F")
    return np.ravel(acc, order="F"), worst


def low_part(p: Dist, k: int, s: IrrepSet) -> np.ndarray:
    """The low-degree part of p: real, zero-sum, built from subset marginals."""
    ell, _ = _low_data(p, k, s)
    return _realify(ell, p.size)


def _realify(ell: np.ndarray, size: int) -> np.ndarray:
    worst_imag = float(np.max(np.abs(ell.imag))) if ell.size else 0.0
    if worst_imag > _IMAG_TOL:
        raise ValueError(
            f"low-degree part has imaginary residual {worst_imag} > {_IMAG_TOL}; "
            "coefficients do not pair into a real function"
        )
    out = np.ascontiguousarray(ell.real)
    total = float(out.sum())
    if abs(total) > _SUM_TOL:
        raise ValueError(f"low-degree part sums to {total}, expected 0")
    return out


@dataclass(frozen=True)
class RepairCertificate:
    k: int
    eps_in: float
    beta: float | None
    mode: str
    l1_distance: float
    bound: float
    k_uniform_residual: float
    beta_paper: float
    beta_adaptive: float | None
    q_min: float
    q_sum: float
    space_size: int

    @property
    def l1_within_bound(self) -> bool:
        return self.l1_distance <= self.bound + 1e-10

    @property
    def q_nonneg(self) -> bool:
        return self.q_min >= -1e-15

    @property
    def q_normalized(self) -> bool:
        return abs(self.q_sum - 1.0) <= 1e-10

    @property
    def residual_ok(self) -> bool:
        return self.k_uniform_residual <= 1e-12 / self.space_size

    def to_text(self) -> str:
        lines = [
            f"k {self.k}",
            f"mode {self.mode}",
            f"eps_in {self.eps_in!r}",
            f"beta {'' if self.beta is None else repr(self.beta)}",
            f"beta_paper {self.beta_paper!r}",
            f"beta_adaptive {'' if self.beta_adaptive is None else repr(self.beta_adaptive)}",
            f"l1_distance {self.l1_distance!r}",
            f"bound {self.bound!r}",
            f"k_uniform_residual {self.k_uniform_residual!r}",
            f"q_min {self.q_min!r}",
            f"q_sum {self.q_sum!r}",
            f"q_nonneg {self.q_nonneg}",
            f"q_normalized {self.q_normalized}",
            f"l1_within_bound {self.l1_within_bound}",
            f"residual_ok {self.residual_ok}",
        ]
        return "\n".join(lines) + "\n"


def _paper_beta(m: int, n: int, k: int, eps: float) -> float:
    return float(m * n) ** (2 * k) * eps


def repair(p: Dist, k: int, s: IrrepSet, mode: str = "adaptive") -> tuple[Dist, RepairCertificate]:
    """Remove the low-degree part and mix with uniform; returns (q, certificate).

    paper-formula mode uses beta = (m|H|)^(2k) * eps with eps measured from
    the low-weight coefficients; adaptive mode uses the smallest feasible
    beta.  Raises RepairInfeasibleError when the chosen beta reaches 1.
    """
    if mode not in ("paper-formula", "adaptive"):
        raise ValueError(f"unknown repair mode {mode!r}")
    m = p.space.arity
    n = p.space.base.order
    g_size = float(p.size)

    ell_c, max_norm = _low_data(p, k, s)
    ell = _realify(ell_c, p.size)
    del ell_c
    eps_in = g_size * max_norm
    p_prime = p.values - ell

    # dips within the ingestion clamp are already treated as zero, so only
    # genuinely negative entries force mixing; this keeps beta exactly 0 on
    # exactly-k-uniform inputs where ell is pure rounding noise
    neg = p_prime < -1e-16
    if np.any(neg):
        ratios = -p_prime[neg] / (1.0 / g_size - p_prime[neg])
        beta_adaptive = float(np.max(ratios))
    else:
        beta_adaptive = 0.0
    beta_paper = _paper_beta(m, n, k, eps_in)
    beta = beta_paper if mode == "paper-formula" else beta_adaptive
    if beta >= 1.0:
        raise RepairInfeasibleError(
            f"{mode} mixing weight {beta} >= 1: input too far from {k}-uniform "
            f"(measured eps = {eps_in})",
            eps_in,
        )

    q_vals = (1.0 - beta) * p_prime + beta / g_size
    q = make_dist(p.space, q_vals)

    from groupmix.fourier import low_weight_coefficients

    residual = max_low_weight_norm(low_weight_coefficients(q, k, s))
    l1 = float(np.sum(np.abs(p.values - q.values)))
    cert = RepairCertificate(
        k=k,
        eps_in=eps_in,
        beta=beta,
        mode=mode,
        l1_distance=l1,
        bound=3.0 * beta_paper,
        k_uniform_residual=residual,
        beta_paper=beta_paper,
        beta_adaptive=beta_adaptive,
        q_min=float(q_vals.min()),
        q_sum=float(q_vals.sum()),
        space_size=p.size,
    )
    if mode == "paper-formula":
        assert cert.l1_within_bound, f"repair distance {l1} above bound {cert.bound}"
    return q, cert


def verify_repair(p: Dist, q: Dist, k: int, s: IrrepSet) -> RepairCertificate:
    """Recompute every certificate field from (p, q, k) for an arbitrary q."""
    m = p.space.arity
    n = p.space.base.order
    g_size = float(p.size)
    _, max_norm = _low_data(p, k, s)
    eps_in = g_size * max_norm

    from groupmix.fourier import low_weight_coefficients

    residual = max_low_weight_norm(low_weight_coefficients(q, k, s))
    l1 = float(np.sum(np.abs(p.values - q.values)))
    return RepairCertificate(
        k=k,
        eps_in=eps_in,
        beta=None,
        mode="verify",
        l1_distance=l1,
        bound=3.0 * _paper_beta(m, n, k, eps_in),
        k_uniform_residual=residual,
        beta_paper=_paper_beta(m, n, k, eps_in),
        beta_adaptive=None,
        q_min=float(q.values.min()),
        q_sum=float(q.values.sum()),
        space_size=p.size,
    )


def save_certificate(cert: RepairCertificate, path: str | os.PathLike):
    with open(path, "w") as fh:
        fh.write(cert.to_text())
