"""Command line interface: ``cbtrace <command> config.json [options]``.

Exit codes: 0 success, 1 invalid input, 2 no positive traces,
3 inconclusive verdict.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .algebra import candidate_subspaces, is_quotient_subspace
from .classify import classify_positive_cone, positivity_bridge
from .config import ConfigError, InstanceConfig, emit_report, load_config
from .lattice import (
    b_set,
    determinant_volume,
    facet_coweights,
    lines_with_coweights,
    matroid_basis_count,
    unimodularity_check,
)
from .poly import Poly, monomials
from .scalars import format_rational
from .series import (
    check_generating_ode,
    decay_and_boundedness_check,
    fit_series_to_fraction,
    generating_series,
    reduce_fraction,
)
from .traces import coweight_box, gram_matrix, is_generic, solve_trace_space, trace_residual
from .weights import (
    WeightFunction,
    admissible_numerator_exponents,
    numerator_nonnegativity,
    quadrature_functional,
)

__all__ = ["COMMANDS", "run_command", "build_parser", "main"]

log = logging.getLogger(__name__)

COMMANDS = ("analyze", "trace-space", "quadrature", "residual", "gram", "genfun", "classify")

EXIT_OK, EXIT_INPUT, EXIT_NO_POSITIVE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

RESIDUAL_TOL = 1e-7


def _moments_json(T) -> list:
    return [{"exp": list(k), "value": T.moments[k]} for k in sorted(T.moments)]


def _data_json(cfg: InstanceConfig) -> dict:
    data = cfg.data
    return {
        "rank": data.d,
        "weights": [list(w) for w in data.weights.weights],
        "flavors": list(data.flavors),
        "zeta": [format_rational(z) for z in data.zeta],
        "rho_offset": list(data.rho_offset),
        "normalization_log": list(cfg.log),
    }


def _weight(cfg: InstanceConfig) -> WeightFunction:
    if cfg.weight is not None:
        return WeightFunction.from_json(cfg.weight, cfg.data)
    return WeightFunction.for_data(cfg.data)


def _analyze(cfg, opts):
    data = cfg.data
    w = data.weights
    uni = unimodularity_check(w)
    quotients = [U for U in candidate_subspaces(data) if is_quotient_subspace(data, U)[0]]
    rep = {
        "bases": matroid_basis_count(w),
        "b_set": sorted(list(b) for b in b_set(w)),
        "unimodular": uni,
        "determinant_volume": determinant_volume(w) if uni else None,
        "facet_coweights": [list(c) for c in facet_coweights(w)],
        "lines": [{"direction": list(ln.direction), "coweight": list(ln.coweight)} for ln in lines_with_coweights(w)],
        "admissible_exponents": [list(m) for m in admissible_numerator_exponents(data)],
        "generic": is_generic(data),
        "quotient_subspaces": quotients,
    }
    return rep, EXIT_OK


def _trace_space(cfg, opts):
    ts = solve_trace_space(cfg.data, degree=opts.degree, radius=opts.lambda_radius)
    rep = ts.to_json()
    rep["basis"] = [_moments_json(T) for T in ts.basis]
    return rep, EXIT_OK if ts.stable is not False else EXIT_INCONCLUSIVE


def _quadrature(cfg, opts):
    wf = _weight(cfg)
    T = quadrature_functional(cfg.data, wf, degree=opts.degree, tol=opts.tol)
    rep = {"weight": wf.to_json(), "moments": _moments_json(T), "meta": T.meta}
    return rep, EXIT_OK if T.meta["converged"] else EXIT_INCONCLUSIVE


def _residual(cfg, opts):
    data = cfg.data
    lams = sorted(set(facet_coweights(data.weights)) | set(coweight_box(data.d, opts.lambda_radius)))
    rdeg = min(4, opts.degree)
    need = rdeg + max(sum(abs(x) for w in data.weights.weights for x in w) * max(max(map(abs, l)) for l in lams), 0)
    T = quadrature_functional(data, _weight(cfg), degree=need, tol=opts.tol)
    rows = []
    worst = 0.0
    for lam in lams:
        m = max(abs(complex(trace_residual(data, T, lam, Poly.monomial(a)))) for a in monomials(data.d, rdeg))
        worst = max(worst, m)
        rows.append({"lambda": list(lam), "max_residual": m})
    rep = {"coweights": rows, "max_residual": worst, "monomial_degree": rdeg, "threshold": RESIDUAL_TOL}
    return rep, EXIT_OK if worst <= RESIDUAL_TOL else EXIT_INCONCLUSIVE


def _gram(cfg, opts):
    data = cfg.data
    gdeg = opts.degree if opts.degree_given else 3
    wf = _weight(cfg)
    need = 2 * gdeg + sum(abs(x) for w in data.weights.weights for x in w) * opts.lambda_radius + 2
    T = quadrature_functional(data, wf, degree=need, tol=opts.tol)
    gr = gram_matrix(data, T, radius=opts.lambda_radius, degree=gdeg, tol=opts.tol)
    nn = numerator_nonnegativity(wf.numerator, seed=opts.seed)
    rep = gr.to_json()
    rep["numerator_nonnegativity"] = {"verdict": nn.verdict, "witness": nn.witness, "detail": nn.detail}
    return rep, EXIT_INCONCLUSIVE if gr.verdict == "inconclusive" else EXIT_OK


def _genfun(cfg, opts):
    data = cfg.data
    T = quadrature_functional(data, _weight(cfg), degree=opts.degree, tol=opts.tol)
    u = generating_series(T, opts.degree)
    ode = []
    for lam in facet_coweights(data.weights):
        try:
            r = check_generating_ode(data, u, lam)
            ode.append({"lambda": list(lam), "max_coefficient": r.max_abs(), "order": r.order})
        except ValueError as exc:
            ode.append({"lambda": list(lam), "error": str(exc)})
    rep = {"series": u.to_json(), "ode_residuals": ode}
    code = EXIT_OK
    try:
        fit = fit_series_to_fraction(u, lines_with_coweights(data.weights), data)
    except ValueError as exc:
        rep["fit"] = {"error": str(exc)}
        return rep, EXIT_INCONCLUSIVE
    dv = decay_and_boundedness_check(fit.fraction)
    red = reduce_fraction(fit.fraction)
    rep["fit"] = {"fraction": fit.fraction.to_json(), "residual": fit.residual, "exact": fit.exact}
    rep["decay"] = {"verdict": dv.verdict, "witness": dv.witness, "detail": dv.detail}
    rep["reduction"] = red.verdict
    if red.verdict != "reduced":
        code = EXIT_INCONCLUSIVE
    return rep, code


def _classify(cfg, opts):
    rpt = classify_positive_cone(cfg.data, shift_sign=-1 if opts.flip_shift else 1)
    rep = rpt.to_json()
    if opts.bridge:
        rep["bridge"] = positivity_bridge(cfg.data, tol=opts.tol, seed=opts.seed)
    return rep, EXIT_NO_POSITIVE if rpt.no_positive_traces else EXIT_OK


_HANDLERS = {
    "analyze": _analyze,
    "trace-space": _trace_space,
    "quadrature": _quadrature,
    "residual": _residual,
    "gram": _gram,
    "genfun": _genfun,
    "classify": _classify,
}


def run_command(cmd: str, cfg: InstanceConfig, opts=None) -> tuple[dict, int]:
    """Run one command and return ``(report, exit_code)``.

    Raises
    ------
    ValueError
        For an unknown command or a failure inside a module (with context).
    """
    if cmd not in _HANDLERS:
        raise ValueError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    opts = _resolve(cfg, opts)
    try:
        rep, code = _HANDLERS[cmd](cfg, opts)
    except ValueError as exc:
        raise ValueError(f"{cmd}: {exc}") from exc
    rep["command"] = cmd
    rep["instance"] = _data_json(cfg)
    rep["options"] = {
        "degree": opts.degree,
        "lambda_radius": opts.lambda_radius,
        "tol": opts.tol,
        "seed": opts.seed,
    }
    rep["exit_code"] = code
    return rep, code


def _resolve(cfg: InstanceConfig, opts):
    ns = argparse.Namespace(
        degree=None, lambda_radius=None, tol=None, seed=None, flip_shift=False, bridge=False
    )
    if opts is not None:
        for k, v in vars(opts).items():
            setattr(ns, k, v)
    ns.degree_given = ns.degree is not None
    ns.degree = cfg.degree if ns.degree is None else ns.degree
    ns.lambda_radius = cfg.lambda_radius if ns.lambda_radius is None else ns.lambda_radius
    ns.tol = cfg.tol if ns.tol is None else ns.tol
    ns.seed = cfg.seed if ns.seed is None else ns.seed
    return ns


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cbtrace", description="Traces on quantized abelian Coulomb branches.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("config", help="instance configuration (JSON)")
    p.add_argument("--degree", type=int, help="polynomial degree bound N (default from config, 8)")
    p.add_argument("--lambda-radius", type=int, dest="lambda_radius", help="coweight radius M (default 2)")
    p.add_argument("--tol", type=float, help="numerical tolerance (default 1e-10)")
    p.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--flip-shift", action="store_true", help="classify: flip the sign of the twist shift")
    p.add_argument("--bridge", action="store_true", help="classify: cross-check rank-one counts with Gram blocks")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"cbtrace: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        rep, code = run_command(args.command, cfg, args)
    except ValueError as exc:
        print(f"cbtrace: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = emit_report(rep, args.format, args.out)
    if args.out is None:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
