"""Command-line entry point: ``specmix <command> ...``.

Exit codes: 0 when every asserted check passed, 1 when an asserted check
failed, 2 for usage, input or budget errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .complexes import Hypergraph, SimplicialComplex, degree_profile, gen_complex, gen_hypergraph
from .enumeration import BudgetExceeded, resolve_workers
from .forms import make_form, spectral_norm_estimate
from .hypergraph_mixing import (
    random_rho_experiment,
    rho_alpha,
    verify_fw_comparison,
    verify_inverse_hypergraph,
    verify_mixing_hypergraph,
    write_experiment_csv,
)
from .io import ObjectFormatError, object_to_dict, read_object, write_object
from .lemmas import bilu_linial_check, verify_lemmas
from .reports import report_payload, write_report
from .simplicial import dump_matrix_csv, kernel_basis, operator_matrix, restricted_norm
from .simplicial_mixing import rho_simplicial, verify_inverse_simplicial, verify_mixing_simplicial

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

# flags that only affect where output goes or how fast it is produced
_RUNTIME_FLAGS = {"--workers": 1, "--out": 1, "--csv": 1, "--dump-matrix": 1}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common(p):
    p.add_argument("--workers", type=int, default=None, help="threads (default: $SPECMIX_WORKERS or 1)")
    p.add_argument("--budget", type=int, default=None, help="max enumeration states (default 1e8)")
    p.add_argument("--force", action="store_true", help="run enumerations beyond the budget")
    p.add_argument("--out", default=None, help="report path (default: print to stdout)")


def _optimizer(p):
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specmix", description="Spectral and discrepancy checks for complexes and hypergraphs.")
    parser.add_argument("--version", action="version", version=f"specmix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate an object file")
    gsub = gen.add_subparsers(dest="what", required=True, parser_class=_Parser)
    gc = gsub.add_parser("complex")
    gc.add_argument("--kind", choices=["complete", "empty", "linial-meshulam", "lm"], required=True)
    gc.add_argument("--n", type=int, required=True)
    gc.add_argument("--d", type=int, required=True)
    gc.add_argument("--p", type=float)
    gc.add_argument("--seed", type=int)
    gc.add_argument("--out", required=True)
    gh = gsub.add_parser("hypergraph")
    gh.add_argument("--kind", choices=["complete", "gnp"], required=True)
    gh.add_argument("--n", type=int, required=True)
    gh.add_argument("--k", type=int, required=True)
    gh.add_argument("--alpha", type=float)
    gh.add_argument("--seed", type=int)
    gh.add_argument("--out", required=True)

    sp = sub.add_parser("spectrum", help="operator norm on cycles, or a form's norm estimate")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--operator", default="A", help="complex operator: A, J, D, laplacian, alpha_shift, b_matrix")
    sp.add_argument("--form", default="alpha_density",
                    help="hypergraph form: adjacency, complete, all_ones, diagonal_gap, alpha_density, fw, fw_r")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--dump-matrix", help="write the complex operator as CSV")
    _optimizer(sp)
    _common(sp)

    dc = sub.add_parser("discrepancy", help="rho over disjoint tuples")
    dc.add_argument("--in", dest="input", required=True)
    dc.add_argument("--alpha", type=float, required=True)
    dc.add_argument("--mode", default="exhaustive",
                    help="exhaustive | singleton-tail | singleton-witness | sample:COUNT:SEED")
    _common(dc)

    ver = sub.add_parser("verify", help="check a mixing statement")
    vsub = ver.add_subparsers(dest="statement", required=True, parser_class=_Parser)
    vm = vsub.add_parser("mixing")
    vm.add_argument("--in", dest="input", required=True)
    vm.add_argument("--alpha", type=float, required=True)
    vm.add_argument("--fw", action="store_true", help="hypergraphs: use A - (k!|E|/n^k) J")
    vm.add_argument("--bins", type=int, default=20)
    vm.add_argument("--overlap", choices=["auto", "yes", "no"], default="auto")
    _optimizer(vm)
    _common(vm)
    vi = vsub.add_parser("inverse")
    vi.add_argument("--in", dest="input", required=True)
    vi.add_argument("--alpha", type=float, help="hypergraphs: density parameter (default: edge density)")
    _optimizer(vi)
    _common(vi)
    vf = vsub.add_parser("fw")
    vf.add_argument("--in", dest="input", required=True)
    _optimizer(vf)
    _common(vf)
    vl = vsub.add_parser("lemmas")
    vl.add_argument("--in", dest="input", required=True)
    vl.add_argument("--alpha", type=float, required=True)
    vl.add_argument("--samples", type=int, default=10_000)
    vl.add_argument("--instances", type=int, default=50)
    vl.add_argument("--seed", type=int, default=0)
    _common(vl)
    vb = vsub.add_parser("bilu-linial")
    vb.add_argument("--in", dest="input", required=True)
    vb.add_argument("--alpha", type=float, help="graphs: M = A - alpha A_K (default r/n)")
    vb.add_argument("--m", type=float, help="row l1 budget (default: 2dr for complexes, largest row otherwise)")
    _common(vb)

    ex = sub.add_parser("experiment", help="batch experiments")
    esub = ex.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    er = esub.add_parser("random-rho")
    er.add_argument("--n", type=int, required=True)
    er.add_argument("--k", type=int, required=True)
    er.add_argument("--alpha", type=float, required=True)
    er.add_argument("--seeds", type=int, default=100)
    er.add_argument("--first-seed", type=int, default=1)
    er.add_argument("--delta", type=float)
    er.add_argument("--no-estimate", action="store_true", help="skip the norm estimates")
    er.add_argument("--starts", type=int, default=32)
    er.add_argument("--csv")
    _common(er)

    rr = sub.add_parser("rerun", help="re-run the config embedded in a report")
    rr.add_argument("report")
    rr.add_argument("--workers", type=int, default=None)
    rr.add_argument("--out", default=None)
    return parser


# ---------------------------------------------------------------- helpers


def _config(argv, args) -> dict:
    """The reproducible part of the invocation: argv minus output/speed flags."""
    kept, skip = [], 0
    for tok in argv:
        if skip:
            skip -= 1
            continue
        name = tok.split("=", 1)[0]
        if name in _RUNTIME_FLAGS:
            skip = 0 if "=" in tok else _RUNTIME_FLAGS[name]
            continue
        kept.append(tok)
    cfg = {"command": kept, "version": __version__}
    path = getattr(args, "input", None)
    if path:
        with open(path, "rb") as fh:
            cfg["object_sha256"] = hashlib.sha256(fh.read()).hexdigest()
    return cfg


def _load(path):
    return read_object(path)


def _default_alpha(obj) -> float:
    if isinstance(obj, Hypergraph):
        return len(obj.edges) / math.comb(obj.n, obj.k)
    return float(degree_profile(obj).max)


def _graph_of(H: Hypergraph) -> SimplicialComplex:
    return SimplicialComplex(H.n, 1, H.edges)


class _Result:
    def __init__(self, report, asserted=True):
        self.report = report
        self.asserted = asserted


# ---------------------------------------------------------------- commands


def _cmd_gen(args):
    if args.what == "complex":
        obj = gen_complex(args.kind, args.n, args.d, p=args.p, seed=args.seed)
    else:
        obj = gen_hypergraph(args.kind, args.n, args.k, alpha=args.alpha, seed=args.seed)
    write_object(obj, args.out)
    size = len(obj.facets) if isinstance(obj, SimplicialComplex) else len(obj.edges)
    print(f"wrote {object_to_dict(obj)['type']} n={obj.n} with {size} top sets to {args.out}")
    return None


def _cmd_spectrum(args):
    obj = _load(args.input)
    if isinstance(obj, SimplicialComplex):
        op = operator_matrix(obj, args.operator, args.alpha)
        if args.dump_matrix:
            dump_matrix_csv(op, args.dump_matrix)
        Z = kernel_basis(obj)
        mat = op.matrix
        full = float(np.linalg.norm(mat, 2)) if mat.size else 0.0
        return _Result({"kind": "restricted_norm", "operator": args.operator, "alpha": args.alpha,
                        "value": restricted_norm(op, Z), "full_norm": full, "cycle_space_dim": Z.dim,
                        "cells": obj.num_cells}, asserted=False)
    alpha = args.alpha if args.alpha is not None else _default_alpha(obj)
    phi = make_form(args.form, H=obj, alpha=alpha)
    est = spectral_norm_estimate(phi, starts=args.starts, max_iters=args.iters, tol=args.tol, seed=args.seed,
                                 workers=args.workers)
    body = {"kind": "form_norm_estimate", "form": args.form, "alpha": alpha, "value": est.value, "estimate": est}
    if obj.k == 2:
        body["exact"] = float(np.abs(np.linalg.eigvalsh(phi.dense())).max())
    return _Result(body, asserted=False)


def _cmd_discrepancy(args):
    obj = _load(args.input)
    kw = dict(budget=args.budget, force=args.force, workers=args.workers)
    if isinstance(obj, SimplicialComplex):
        rep = rho_simplicial(obj, args.alpha, args.mode, **kw)
    else:
        rep = rho_alpha(obj, args.alpha, args.mode, **kw)
    return _Result(rep, asserted=False)


def _cmd_verify(args):
    obj = _load(args.input)
    kw = dict(budget=args.budget, force=args.force, workers=args.workers)
    st = args.statement
    simp = isinstance(obj, SimplicialComplex)
    if st == "mixing":
        if simp:
            return _Result(verify_mixing_simplicial(obj, args.alpha, bins=args.bins, **kw))
        overlap = {"auto": None, "yes": True, "no": False}[args.overlap]
        return _Result(verify_mixing_hypergraph(obj, args.alpha, fw=args.fw, bins=args.bins, starts=args.starts,
                                                seed=args.seed, overlap=overlap, **kw))
    if st == "inverse":
        if simp:
            return _Result(verify_inverse_simplicial(obj, **kw))
        alpha = args.alpha if args.alpha is not None else _default_alpha(obj)
        return _Result(verify_inverse_hypergraph(obj, alpha, starts=args.starts, seed=args.seed, **kw))
    if st == "fw":
        if simp:
            raise UsageError("verify fw needs a hypergraph")
        return _Result(verify_fw_comparison(obj, starts=args.starts, seed=args.seed, **kw))
    if st == "lemmas":
        if simp:
            raise UsageError("verify lemmas needs a hypergraph")
        return _Result(verify_lemmas(obj, args.alpha, samples=args.samples, seed=args.seed,
                                     instances=args.instances, **kw))
    if st == "bilu-linial":
        if simp:
            prof = degree_profile(obj)
            M = operator_matrix(obj, "b_matrix")
            m = args.m if args.m is not None else 2 * obj.d * prof.max
        else:
            if obj.k != 2:
                raise UsageError("verify bilu-linial needs a complex or a graph (k=2)")
            r = degree_profile(obj).max
            alpha = args.alpha if args.alpha is not None else r / obj.n
            M = make_form("alpha_density", H=obj, alpha=alpha).dense()
            m = args.m
        return _Result(bilu_linial_check(M, m, **kw))
    raise UsageError(f"unknown statement {st!r}")


def _cmd_experiment(args):
    rep = random_rho_experiment(args.n, args.k, args.alpha, args.seeds, delta=args.delta,
                                estimate=not args.no_estimate, starts=args.starts, first_seed=args.first_seed,
                                budget=args.budget, force=args.force, workers=args.workers)
    if args.csv:
        write_experiment_csv(rep, args.csv)
    return _Result(rep)


def _emit(result, argv, args, elapsed):
    cfg = _config(argv, args)
    runtime = {"wall_seconds": elapsed, "workers": resolve_workers(args.workers)}
    if args.out:
        doc = write_report(result.report, args.out, cfg, runtime)
    else:
        doc = report_payload(result.report, cfg)
        doc["runtime"] = runtime
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    body = doc["report"]
    if "passed" in body and result.asserted:
        status = "PASS" if body["passed"] else "FAIL"
        flags = ",".join(body.get("flags") or []) or "-"
        print(f"{body.get('statement')}: {status} min_margin={body.get('min_margin')} flags={flags}",
              file=sys.stderr)
        return EXIT_OK if body["passed"] else EXIT_FAILED
    return EXIT_OK


def _rerun(args):
    with open(args.report) as fh:
        doc = json.load(fh)
    argv = list(doc["config"]["command"])
    if args.workers is not None:
        argv += ["--workers", str(args.workers)]
    if args.out is not None:
        argv += ["--out", args.out]
    return main(argv, expect_sha256=doc["config"].get("object_sha256"))


_COMMANDS = {
    "gen": _cmd_gen,
    "spectrum": _cmd_spectrum,
    "discrepancy": _cmd_discrepancy,
    "verify": _cmd_verify,
    "experiment": _cmd_experiment,
}


def main(argv=None, expect_sha256: str | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    if args.command == "rerun":
        return _rerun(args)
    if expect_sha256 is not None and _config(argv, args).get("object_sha256") != expect_sha256:
        print(f"specmix: error: {args.input} differs from the object the report was made from", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        result = _COMMANDS[args.command](args)
    except (UsageError, BudgetExceeded, ObjectFormatError, FileNotFoundError, ValueError) as err:
        print(f"specmix: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    if result is None:
        return EXIT_OK
    return _emit(result, argv, args, time.perf_counter() - start)


if __name__ == "__main__":
    sys.exit(main())
