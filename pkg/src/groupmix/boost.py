"""Convolution-boosting checks and pipelines.

The quantities tracked per step: the un-normalized squared L2 distance to
uniform sum_x (p(x) - 1/|G|)^2, the relative L-infinity deviation, and the
configured eps_k values.  Repeated convolution flattens (H^-k, k)-uniform
distributions at a rate governed by the quasirandomness degree of the base
group; the checks below assert the inequalities behind that on concrete
inputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from groupmix.fourier import Dist, convolve, uniform
from groupmix.groups import ProductGroup
from groupmix.irreps import IrrepSet
from groupmix.uniformity import eps_k_uniform, eps_uniform

_MACHINE_EPS = float(np.finfo(np.float64).eps)


class PreconditionError(ValueError):
    pass


def numerical_floor(size: int) -> float:
    """Relative deviations below this are indistinguishable from rounding."""
    return 10.0 * _MACHINE_EPS * size


def l2_sq_dist_to_uniform(p: Dist) -> float:
    """sum_x (p(x) - 1/|G|)^2, un-normalized."""
    return float(np.sum((p.values - 1.0 / p.size) ** 2))


def l2_sq_via_norm_identity(p: Dist) -> float:
    """|p|_2^2 - 1/|G|; agrees with the direct form to rounding."""
    return float(np.sum(p.values**2) - 1.0 / p.size)


# ---------------------------------------------------------------------------
# step records


@dataclass
class StepRecord:
    step: int
    mode: str
    l2_sq: float
    linf_rel: float
    eps_k: dict[int, float] = field(default_factory=dict)
    tv_dist: float | None = None
    seconds: float = 0.0
    at_floor: bool = False


@dataclass
class ExperimentLog:
    records: list[StepRecord] = field(default_factory=list)
    eps_ks: tuple[int, ...] = ()

    def add(self, record: StepRecord):
        self.records.append(record)

    def csv_header(self) -> list[str]:
        if len(self.eps_ks) <= 1:
            eps_cols = ["eps_k"]
        else:
            eps_cols = [f"eps_k{k}" for k in self.eps_ks]
        return ["step", "mode", "l2_sq", "linf_rel", *eps_cols, "tv_dist", "seconds"]

    def to_csv(self, include_timing: bool = False) -> str:
        """Deterministic CSV; wall-clock is written only when asked for,
        so identical runs produce byte-identical logs by default."""

        def fmt(x) -> str:
            return "" if x is None else repr(float(x))

        lines = [",".join(self.csv_header())]
        for r in self.records:
            eps_vals = [fmt(r.eps_k.get(k)) for k in (self.eps_ks or (None,))]
            if not self.eps_ks:
                eps_vals = [""]
            row = [
                str(r.step),
                r.mode,
                fmt(r.l2_sq),
                fmt(r.linf_rel),
                *eps_vals,
                fmt(r.tv_dist),
                fmt(r.seconds) if include_timing else "",
            ]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path, include_timing: bool = False):
        with open(path, "w") as fh:
            fh.write(self.to_csv(include_timing=include_timing))


# ---------------------------------------------------------------------------
# inequality checks


@dataclass(frozen=True)
class FlattenRecord:
    lhs: float
    rhs: float
    ratio: float | None
    holds: bool
    eps_k_in: float


def flatten_bound_check(
    p: Dist, k: int, d: int, s: IrrepSet | None = None, engine: str | None = None
) -> FlattenRecord:
    """Self-convolution flattening bound for an (|H|^-k, k)-uniform input.

    lhs = |p*p - u|_2^2, rhs = |p - u|_2^2 * 2 * |H|^(m-k) * d^-(k+1).
    """
    if not isinstance(p.space, ProductGroup):
        raise ValueError("flatten_bound_check needs a product-group distribution")
    n = p.space.base.order
    m = p.space.arity
    eps_in = eps_k_uniform(p, k).eps
    required = float(n) ** (-k)
    if eps_in > required * (1 + 1e-9) + 1e-12:
        raise PreconditionError(
            f"input is not (|H|^-{k}, {k})-uniform: eps_{k} = {eps_in} > {required}"
        )
    base = l2_sq_dist_to_uniform(p)
    conv = convolve(p, p, s, engine=engine)
    lhs = l2_sq_dist_to_uniform(conv)
    rhs = base * 2.0 * float(n) ** (m - k) * float(d) ** (-(k + 1))
    holds = lhs <= rhs + 1e-12
    assert holds, f"flattening bound violated: {lhs} > {rhs}"
    ratio = lhs / base if base > 0 else None
    return FlattenRecord(lhs, rhs, ratio, holds, eps_in)


@dataclass(frozen=True)
class SquareBoostRecord:
    eps_p: float
    eps_q: float
    eps_conv: float
    holds: bool


def square_boost_check(
    p: Dist, q: Dist, k: int, s: IrrepSet | None = None, engine: str | None = None
) -> SquareBoostRecord:
    """eps_k of a convolution is at most the product of the inputs' eps_k."""
    eps_p = eps_k_uniform(p, k).eps
    eps_q = eps_k_uniform(q, k).eps
    conv = convolve(p, q, s, engine=engine)
    eps_c = eps_k_uniform(conv, k).eps
    holds = eps_c <= eps_p * eps_q + 1e-12
    assert holds, f"square boost violated: {eps_c} > {eps_p} * {eps_q}"
    return SquareBoostRecord(eps_p, eps_q, eps_c, holds)


@dataclass(frozen=True)
class L2LinfRecord:
    linf: float
    l2sq: float
    holds: bool


def l2_to_linf_check(
    p: Dist, s: IrrepSet | None = None, engine: str | None = None
) -> L2LinfRecord:
    """|p*p - u|_inf <= |p - u|_2^2 (Cauchy-Schwarz on the convolution sum)."""
    conv = convolve(p, p, s, engine=engine)
    linf = float(np.max(np.abs(conv.values - 1.0 / p.size)))
    l2sq = l2_sq_dist_to_uniform(p)
    holds = linf <= l2sq + 1e-15
    assert holds, f"L2-to-Linf bound violated: {linf} > {l2sq}"
    return L2LinfRecord(linf, l2sq, holds)


# ---------------------------------------------------------------------------
# pipeline


def _measure(p: Dist, step: int, mode: str, eps_ks, tv_ref: Dist | None, secs: float) -> StepRecord:
    l2 = l2_sq_dist_to_uniform(p)
    linf = eps_uniform(p)
    eps_k = {k: eps_k_uniform(p, k).eps for k in eps_ks}
    tv = None
    if tv_ref is not None:
        tv = 0.5 * float(np.sum(np.abs(p.values - tv_ref.values)))
    return StepRecord(step, mode, l2, linf, eps_k, tv, secs, linf < numerical_floor(p.size))


def boost_pipeline(
    p: Dist,
    mode: str,
    max_steps: int,
    target_eps: float,
    s: IrrepSet | None = None,
    eps_ks: tuple[int, ...] = (),
    engine: str | None = None,
    track_tv: bool = False,
) -> tuple[Dist, ExperimentLog]:
    """Iterated convolution until eps_uniform reaches target_eps.

    self-square convolves the current iterate with itself (2^t copies after
    t steps); fresh-copy convolves with the original each step (t+1 copies).
    """
    if mode not in ("self-square", "fresh-copy"):
        raise ValueError(f"unknown pipeline mode {mode!r}")
    log = ExperimentLog(eps_ks=tuple(eps_ks))
    tv_ref = uniform(p.space) if track_tv else None
    current = p
    log.add(_measure(current, 0, mode, eps_ks, tv_ref, 0.0))
    while log.records[-1].linf_rel > target_eps and len(log.records) <= max_steps:
        t0 = time.perf_counter()
        other = current if mode == "self-square" else p
        current = convolve(current, other, s, engine=engine)
        secs = time.perf_counter() - t0
        log.add(_measure(current, len(log.records), mode, eps_ks, tv_ref, secs))
    return current, log
