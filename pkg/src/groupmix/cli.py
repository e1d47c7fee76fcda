"""Command-line front door: build groups, cache irreps, run experiments.

Outputs are machine readable: CSV step logs with header
(step, mode, l2_sq, linf_rel, eps_k, tv_dist, seconds) and flat key-value
text blocks for certificates and verification tables.  Identical
invocations (including --seed) produce byte-identical files; the seconds
column is only filled under --timing, which forfeits that guarantee.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from groupmix import boost, fourier as fx, nof
from groupmix.groups import GroupConstructionError, ProductGroup, build_group, parse_group_spec
from groupmix.repair import repair as run_repair, verify_repair
from groupmix.irreps import (
    DEFAULT_TOL,
    IrrepCacheError,
    IrrepComputationError,
    get_irreps,
    quasirandomness_degree,
    verify_schur,
)
from groupmix.uniformity import eps_k_uniform, report_to_text

CACHE_ENV = "GROUPMIX_CACHE_DIR"


def default_cache_dir() -> str:
    env = os.environ.get(CACHE_ENV)
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "groupmix")


class ConfigError(ValueError):
    pass


def read_config(path: str) -> dict[str, str]:
    """KEY=VALUE defaults, one per line; # starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected KEY=VALUE, got {line!r}")
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


@dataclass
class RunConfig:
    group: str
    m: int = 4
    k: int = 3
    parties: int = 2
    seed: int = 0
    tol: float = DEFAULT_TOL
    max_steps: int = 6
    target_eps: float | None = None
    delta: float = 1e-9
    mode: str = "self-square"
    repair_mode: str = "adaptive"
    engine: str | None = None
    out: str | None = None
    timing: bool = False
    cache_dir: str | None = None
    no_cache: bool = False

    def validate(self):
        checks = [
            ("m", self.m >= 1, "must be >= 1"),
            ("k", 1 <= self.k <= self.m, f"must lie in [1, m={self.m}]"),
            ("parties", self.parties >= 1, "must be >= 1"),
            ("tol", 1e-12 <= self.tol <= 1e-6, "must lie in [1e-12, 1e-6]"),
            ("max_steps", self.max_steps >= 0, "must be >= 0"),
            ("delta", self.delta >= 0, "must be >= 0"),
            (
                "target_eps",
                self.target_eps is None or self.target_eps > 0,
                "must be positive",
            ),
            ("mode", self.mode in ("self-square", "fresh-copy"), "unknown pipeline mode"),
            (
                "repair_mode",
                self.repair_mode in ("adaptive", "paper-formula"),
                "unknown repair mode",
            ),
            (
                "engine",
                self.engine in (None, "direct", "fourier"),
                "must be direct or fourier",
            ),
        ]
        for field_name, ok, msg in checks:
            if not ok:
                raise ConfigError(f"invalid --{field_name.replace('_', '-')}: {msg}")


def _resolve(args, config: dict, key: str, cast, fallback):
    cli_val = getattr(args, key, None)
    if cli_val is not None:
        return cli_val
    if key in config:
        raw = config[key]
        if cast is bool:
            return raw.lower() in ("1", "true", "yes")
        return cast(raw)
    return fallback


def build_run_config(args) -> RunConfig:
    config = read_config(args.config) if getattr(args, "config", None) else {}
    defaults = RunConfig(group="")
    cfg = RunConfig(
        group=_resolve(args, config, "group", str, ""),
        m=_resolve(args, config, "m", int, defaults.m),
        k=_resolve(args, config, "k", int, defaults.k),
        parties=_resolve(args, config, "parties", int, defaults.parties),
        seed=_resolve(args, config, "seed", int, defaults.seed),
        tol=_resolve(args, config, "tol", float, defaults.tol),
        max_steps=_resolve(args, config, "max_steps", int, defaults.max_steps),
        target_eps=_resolve(args, config, "target_eps", float, defaults.target_eps),
        delta=_resolve(args, config, "delta", float, defaults.delta),
        mode=_resolve(args, config, "mode", str, defaults.mode),
        repair_mode=_resolve(args, config, "repair_mode", str, defaults.repair_mode),
        engine=_resolve(args, config, "engine", str, defaults.engine),
        out=_resolve(args, config, "out", str, defaults.out),
        timing=bool(getattr(args, "timing", False)),
        cache_dir=_resolve(args, config, "cache_dir", str, None),
        no_cache=bool(getattr(args, "no_cache", False)),
    )
    if not cfg.group:
        raise ConfigError("invalid --group: a group spec is required (cyclic:N | sl2:Q | a5)")
    cfg.validate()
    return cfg


def _irreps_for(cfg: RunConfig, g):
    cache = cfg.cache_dir or default_cache_dir()
    return get_irreps(g, tol=cfg.tol, seed=0, cache_dir=cache, use_cache=not cfg.no_cache)


def _fmt(x) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# subcommands


def cmd_irreps(args) -> int:
    cfg = build_run_config(args)
    g = build_group(parse_group_spec(cfg.group))
    cache = cfg.cache_dir or default_cache_dir()
    s = get_irreps(g, tol=cfg.tol, seed=cfg.seed, cache_dir=cache, use_cache=not cfg.no_cache)
    dims = list(s.dims)
    print(f"dims={dims} sum_sq={sum(d * d for d in dims)} d={quasirandomness_degree(s)}")
    return 0


def cmd_verify(args) -> int:
    cfg = build_run_config(args)
    which = args.which
    g = build_group(parse_group_spec(cfg.group))
    s = _irreps_for(cfg, g)
    rng = np.random.default_rng(cfg.seed)
    rows = []

    if which in ("schur", "all"):
        schur = verify_schur(s)
        rows.append(("schur", schur.max_residual, schur.max_residual <= max(cfg.tol, 1e-8)))
    if which in ("parseval", "all"):
        worst = 0.0
        for _ in range(20):
            f = rng.standard_normal(g.order)
            fd = fx.fourier_forward(f, s)
            lhs = float(np.mean(np.abs(f) ** 2))
            rhs = sum(s.irreps[i].dim * fx.frobenius_norm_sq(c) for i, c in fd.coeffs.items())
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
        rows.append(("parseval", worst, worst <= 1e-10))
    if which in ("convolution", "all"):
        worst = 0.0
        for _ in range(5):
            pv, qv = rng.random(g.order), rng.random(g.order)
            p = fx.make_dist(g, pv / pv.sum())
            q = fx.make_dist(g, qv / qv.sum())
            direct = fx.convolve_direct(p, q)
            fouri = fx.convolve_fourier(p, q, s)
            worst = max(worst, float(np.max(np.abs(direct.values - fouri.values))))
        rows.append(("convolution", worst, worst <= 1e-9))

    all_ok = True
    for name, residual, ok in rows:
        all_ok &= ok
        print(f"{name}\t{_fmt(residual)}\t{'pass' if ok else 'FAIL'}")
    return 0 if all_ok else 1


def _box_input(cfg: RunConfig, g):
    m = cfg.m
    parties = m.bit_length() - 1
    if 2**parties != m:
        raise ConfigError(f"invalid --m: box-distribution experiments need m = 2^parties, got {m}")
    return nof.box_to_dist(nof.exact_s(g, parties))


def cmd_experiment_flatten(args) -> int:
    cfg = build_run_config(args)
    g = build_group(parse_group_spec(cfg.group))
    s = _irreps_for(cfg, g)
    p = _box_input(cfg, g)
    d = quasirandomness_degree(s)
    record = boost.flatten_bound_check(p, cfg.k, d, s, engine=cfg.engine)
    ratio = "" if record.ratio is None else _fmt(record.ratio)
    summary = (
        f"lhs={_fmt(record.lhs)} rhs={_fmt(record.rhs)} ratio={ratio} "
        f"hold={'true' if record.holds else 'false'}"
    )
    if cfg.out:
        subset_report = eps_k_uniform(p, cfg.k, full_table=True)
        with open(cfg.out, "w") as fh:
            fh.write(summary + "\n")
            fh.write(report_to_text(subset_report) + "\n")
    print(summary)
    return 0 if record.holds else 1


def cmd_experiment_boost(args) -> int:
    cfg = build_run_config(args)
    g = build_group(parse_group_spec(cfg.group))
    s = _irreps_for(cfg, g)
    p = _box_input(cfg, g)
    target = cfg.target_eps if cfg.target_eps is not None else float(g.order) ** (-cfg.m)
    final, log = boost.boost_pipeline(
        p, cfg.mode, cfg.max_steps, target, s, eps_ks=(cfg.k,), engine=cfg.engine
    )
    out = cfg.out or f"boost_{cfg.group.replace(':', '')}_m{cfg.m}.csv"
    log.write_csv(out, include_timing=cfg.timing)
    last = log.records[-1]
    reached = last.linf_rel <= target
    print(
        f"steps={last.step} final_eps={_fmt(last.linf_rel)} target={_fmt(target)} "
        f"reached={'true' if reached else 'false'} log={out}"
    )
    return 0 if reached else 1


def cmd_experiment_nof(args) -> int:
    cfg = build_run_config(args)
    g = build_group(parse_group_spec(cfg.group))
    s = _irreps_for(cfg, g)
    report = nof.verify_s_uniformity(g, cfg.parties, seed=cfg.seed)
    target = cfg.target_eps if cfg.target_eps is not None else float(g.order) ** (-(2**cfg.parties))
    log = nof.advantage_curve(g, cfg.parties, cfg.max_steps, s, target_eps=target, engine=cfg.engine)
    out = cfg.out or f"nof_{cfg.group.replace(':', '')}_p{cfg.parties}.csv"
    log.write_csv(out, include_timing=cfg.timing)
    reached = [r.step for r in log.records if r.linf_rel <= target]
    reached_at = str(reached[0]) if reached else "none"
    ok = report.is_3_uniform and report.four_wise_deviation > 0 and report.identity_sample_rate == 1.0
    print(
        f"3-uniform={'true' if report.is_3_uniform else 'false'} "
        f"four_wise_deviation={float(report.four_wise_deviation)!r} "
        f"identity_rate={report.identity_sample_rate!r} "
        f"reached_target_at_t={reached_at} log={out}"
    )
    return 0 if ok else 1


def cmd_experiment_repair(args) -> int:
    cfg = build_run_config(args)
    g = build_group(parse_group_spec(cfg.group))
    s = _irreps_for(cfg, g)
    p0 = _box_input(cfg, g)
    de = fx.point_mass(p0.space, 0)
    p = fx.make_dist(p0.space, (1 - cfg.delta) * p0.values + cfg.delta * de.values)
    q, cert = run_repair(p, cfg.k, s, mode=cfg.repair_mode)
    check = verify_repair(p, q, cfg.k, s)
    marg_eps = eps_k_uniform(q, cfg.k).eps
    out = cfg.out or f"repair_{cfg.group.replace(':', '')}_m{cfg.m}_k{cfg.k}.txt"
    with open(out, "w") as fh:
        fh.write(cert.to_text())
        fh.write(f"verify_residual {check.k_uniform_residual!r}\n")
        fh.write(f"marginal_eps_k {marg_eps!r}\n")
    ok = (
        cert.q_nonneg
        and cert.q_normalized
        and cert.residual_ok
        and cert.l1_within_bound
        and cert.beta_adaptive <= cert.beta_paper
    )
    print(
        f"mode={cert.mode} beta={_fmt(cert.beta)} eps_in={_fmt(cert.eps_in)} "
        f"l1={_fmt(cert.l1_distance)} bound={_fmt(cert.bound)} "
        f"residual={_fmt(cert.k_uniform_residual)} pass={'true' if ok else 'false'} report={out}"
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--group", help="cyclic:N | sl2:Q | a5")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--config", help="key=value defaults file; flags override")
    p.add_argument("--cache-dir", dest="cache_dir", help=f"irrep cache dir (or ${CACHE_ENV})")
    p.add_argument("--no-cache", dest="no_cache", action="store_true", help="recompute irreps")


def _add_experiment_common(p: argparse.ArgumentParser):
    _add_common(p)
    p.add_argument("--m", type=int, help="product-group arity")
    p.add_argument("--k", type=int, help="uniformity parameter")
    p.add_argument("--engine", choices=("direct", "fourier"))
    p.add_argument("--out", help="output path for the log/report")
    p.add_argument("--timing", action="store_true", help="fill the seconds column (non-deterministic)")


def make_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="groupmix", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p_irr = sub.add_parser("irreps", help="compute and cache irreps; print dims summary")
    _add_common(p_irr)
    p_irr.set_defaults(func=cmd_irreps)

    p_ver = sub.add_parser("verify", help="residual checks: schur, parseval, convolution")
    _add_common(p_ver)
    p_ver.add_argument("--which", choices=("schur", "parseval", "convolution", "all"), default="all")
    p_ver.set_defaults(func=cmd_verify)

    p_exp = sub.add_parser("experiment", help="run a named experiment")
    exp_sub = p_exp.add_subparsers(dest="experiment", required=True)

    p_fl = exp_sub.add_parser("flatten", help="self-convolution flattening bound on the box dist")
    _add_experiment_common(p_fl)
    p_fl.set_defaults(func=cmd_experiment_flatten)

    p_bo = exp_sub.add_parser("boost", help="iterated-convolution pipeline on the box dist")
    _add_experiment_common(p_bo)
    p_bo.add_argument("--mode", choices=("self-square", "fresh-copy"))
    p_bo.add_argument("--max-steps", dest="max_steps", type=int)
    p_bo.add_argument("--target-eps", dest="target_eps", type=float)
    p_bo.set_defaults(func=cmd_experiment_boost)

    p_no = exp_sub.add_parser("nof", help="box-dist uniformity report and advantage curve")
    _add_experiment_common(p_no)
    p_no.add_argument("--parties", type=int)
    p_no.add_argument("--max-steps", dest="max_steps", type=int)
    p_no.add_argument("--target-eps", dest="target_eps", type=float)
    p_no.set_defaults(func=cmd_experiment_nof)

    p_re = exp_sub.add_parser("repair", help="repair a perturbed box dist to exact k-uniformity")
    _add_experiment_common(p_re)
    p_re.add_argument("--delta", type=float, help="perturbation weight toward the identity point mass")
    p_re.add_argument("--repair-mode", dest="repair_mode", choices=("adaptive", "paper-formula"))
    p_re.set_defaults(func=cmd_experiment_repair)

    return top


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        ConfigError,
        GroupConstructionError,
        IrrepCacheError,
        IrrepComputationError,
        ValueError,
        AssertionError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
