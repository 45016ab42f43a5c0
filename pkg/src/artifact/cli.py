"""Command-line front end.

Subcommands: index, generators, homology, cohomology, hecke, cuspidal,
dvf, quad, contract.  Output is plain text by default and a versioned
JSON document with --format json; every run is deterministic for a fixed
configuration and package version (the vector-field search and all
lattice normal forms are deterministic algorithms, so no seeds are
involved).  Errors exit nonzero: 2 for configuration problems, 3 for
computational ones, and in JSON mode the document carries a
machine-readable error object instead of a result.

The ARTIFACT_THREADS environment variable is validated and recorded in
the configuration for forward compatibility; the computations here are
single-threaded, so today it only caps what a batch driver may assume.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field

from .chaincx import all_homology, contract, homology as chain_homology
from .coeffmod import PolynomialModule, cohomology, hom_complex
from .congruence import CongruenceSubgroup, generators, index
from .cuspidal import cuspidal_cohomology
from .cwdvf import bing_house, critical_complex, load_complex, maximal_dvf
from .errors import ArtifactError, ConfigError
from .exactlin import charpoly
from .hecke import hecke_eigenvalues, hecke_operator, hecke_representative
from .quadring import (ideal_from_generators, gamma0_index, l_ratio,
                       parse_quad, torsion_ratio)
from .resolutions import restrict_resolution, sl2z_resolution, tensor_with_z

SCHEMA = "artifact-report/1"

GROUP_COMMANDS = ("index", "generators", "homology", "cohomology",
                  "hecke", "cuspidal")


@dataclass
class RunConfig:
    """Validated options for one invocation.

    The group is given either by kind + level (congruence subcommands) or
    by d + ideal (quad); degree, weight, and module_degree only apply
    where the subcommand consumes them, and validate() rejects stray
    combinations rather than ignoring them.
    """

    subcommand: str
    kind: str = None
    level: int = None
    d: int = None
    ideal: str = None
    degree: int = None
    weight: int = None
    module_degree: int = None
    ops: list = field(default_factory=list)
    emit: str = "eigenvalues"
    report: list = field(default_factory=list)
    orders: list = field(default_factory=list)
    complex_path: str = None
    do_contract: bool = False
    depth: int = None
    fmt: str = "plain"
    threads: int = 1

    def group(self):
        return CongruenceSubgroup(self.kind, self.level)

    def validate(self):
        if self.subcommand in GROUP_COMMANDS:
            if self.kind is None:
                raise ConfigError("%s needs a group: --gamma0, --gamma1, "
                                  "or --gamma" % self.subcommand)
        if self.ops and self.subcommand != "hecke":
            raise ConfigError("--ops only makes sense with hecke")
        if self.subcommand == "hecke":
            if not self.ops:
                raise ConfigError("hecke needs --ops")
            if self.weight is None:
                raise ConfigError("hecke needs --weight")
        if self.weight is not None:
            if self.subcommand not in ("hecke", "cohomology"):
                raise ConfigError("--weight only makes sense with hecke "
                                  "or cohomology")
            if self.weight < 2:
                raise ConfigError("weight is k + 2 >= 2, got %d" % self.weight)
        if self.module_degree is not None and self.subcommand != "cuspidal":
            raise ConfigError("--module-degree only makes sense with cuspidal")
        if self.subcommand == "quad":
            if self.d is None or self.ideal is None:
                raise ConfigError("quad needs --d and --ideal")
            known = {"norm", "prime", "index", "l-ratio", "torsion-ratio"}
            for r in self.report:
                if r not in known:
                    raise ConfigError("unknown report field %r" % r)
            if "torsion-ratio" in self.report and not self.orders:
                raise ConfigError("torsion-ratio needs --orders")
        if self.do_contract and self.subcommand not in ("homology", "contract"):
            raise ConfigError("--contract only makes sense with homology")
        if self.depth is not None and self.depth < 1:
            raise ConfigError("depth must be >= 1")
        if self.threads < 1:
            raise ConfigError("ARTIFACT_THREADS must be a positive integer")
        return self


def _group_args(p):
    g = p.add_mutually_exclusive_group(required=False)
    g.add_argument("--gamma0", type=int, metavar="N")
    g.add_argument("--gamma1", type=int, metavar="N")
    g.add_argument("--gamma", type=int, metavar="N",
                   help="principal congruence subgroup")


def _csv_ints(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError("expected a comma-separated integer list, got %r"
                          % text)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="artifact",
        description="integral cohomology and Hecke operators for "
                    "congruence subgroups")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("plain", "json"),
                        default="plain")
    sub = ap.add_subparsers(dest="subcommand", required=True,
                            parser_class=lambda **kw: argparse.ArgumentParser(
                                parents=[common], **kw))

    p = sub.add_parser("index", help="index in the full modular group")
    _group_args(p)

    p = sub.add_parser("generators", help="generating matrices")
    _group_args(p)

    p = sub.add_parser("homology", help="integral homology H_n")
    _group_args(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--contract", action="store_true",
                   help="collapse the chain complex before taking homology")
    p.add_argument("--depth", type=int,
                   help="resolution length (default degree + 1)")

    p = sub.add_parser("cohomology", help="H^n with polynomial coefficients")
    _group_args(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--weight", type=int, default=2,
                   help="module weight k + 2 (2 = trivial coefficients)")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("hecke", help="Hecke operators on H^n")
    _group_args(p)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--weight", type=int)
    p.add_argument("--ops", type=str,
                   help="comma-separated operator indices, e.g. 2,3,5,7")
    p.add_argument("--emit", choices=("eigenvalues", "matrix", "charpoly"),
                   default="eigenvalues")

    p = sub.add_parser("cuspidal", help="kernel of restriction to the boundary")
    _group_args(p)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--module-degree", type=int, default=0,
                   help="polynomial coefficient degree k (weight k + 2)")

    p = sub.add_parser("dvf", help="discrete vector field on a CW complex")
    p.add_argument("--complex", type=str, metavar="FILE",
                   help="complex file (default: the bundled two-room house)")

    p = sub.add_parser("quad", help="quadratic integer ring reports")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--ideal", type=str, required=True,
                   help="generator, e.g. \"41+56i\"")
    p.add_argument("--report", type=str, default="norm,prime,index",
                   help="comma-separated fields: norm, prime, index, "
                        "l-ratio, torsion-ratio")
    p.add_argument("--orders", type=str, default="",
                   help="torsion orders for torsion-ratio")

    p = sub.add_parser("contract", help="collapse a chain complex")
    _group_args(p)
    p.add_argument("--complex", type=str, metavar="FILE")
    p.add_argument("--depth", type=int)
    return ap


def config_from_args(ns):
    kind = level = None
    if getattr(ns, "gamma0", None) is not None:
        kind, level = "gamma0", ns.gamma0
    elif getattr(ns, "gamma1", None) is not None:
        kind, level = "gamma1", ns.gamma1
    elif getattr(ns, "gamma", None) is not None:
        kind, level = "principal", ns.gamma
    threads_raw = os.environ.get("ARTIFACT_THREADS", "1")
    try:
        threads = int(threads_raw)
    except ValueError:
        raise ConfigError("ARTIFACT_THREADS must be an integer, got %r"
                          % threads_raw)
    cfg = RunConfig(
        subcommand=ns.subcommand,
        kind=kind,
        level=level,
        d=getattr(ns, "d", None),
        ideal=getattr(ns, "ideal", None),
        degree=getattr(ns, "degree", None),
        weight=getattr(ns, "weight", None),
        module_degree=getattr(ns, "module_degree", None),
        ops=_csv_ints(ns.ops) if getattr(ns, "ops", None) else [],
        emit=getattr(ns, "emit", "eigenvalues"),
        report=[r.strip() for r in getattr(ns, "report", "").split(",")
                if r.strip()],
        orders=_csv_ints(ns.orders) if getattr(ns, "orders", None) else [],
        complex_path=getattr(ns, "complex", None),
        do_contract=getattr(ns, "contract", False),
        depth=getattr(ns, "depth", None),
        fmt=ns.format,
        threads=threads,
    )
    return cfg.validate()


# ------------------------------------------------------------ subcommands


def _run_index(cfg):
    n = index(cfg.group())
    return {"group": str(cfg.group()), "index": n}, [str(n)]


def _run_generators(cfg):
    gens = generators(cfg.group())
    rows = [list(g.entries()) for g in gens]
    lines = ["%d %d %d %d" % tuple(r) for r in rows]
    return {"group": str(cfg.group()), "count": len(rows),
            "generators": rows}, lines


def _group_chain_complex(cfg, depth):
    res = restrict_resolution(sl2z_resolution(depth), cfg.group())
    return tensor_with_z(res)


def _run_homology(cfg):
    n = cfg.degree
    depth = cfg.depth if cfg.depth is not None else n + 1
    if depth < n + 1:
        raise ConfigError("depth %d cannot reach degree %d" % (depth, n))
    C = _group_chain_complex(cfg, depth)
    ranks_before = list(C.ranks)
    if cfg.do_contract:
        C = contract(C)
    inv = chain_homology(C, n)
    result = {"group": str(cfg.group()), "degree": n,
              "invariants": str(inv), "torsion": list(inv.torsion),
              "free_rank": inv.free_rank, "contracted": cfg.do_contract,
              "ranks": ranks_before}
    if cfg.do_contract:
        result["ranks_contracted"] = list(C.ranks)
    return result, [str(inv)]


def _run_cohomology(cfg):
    n = cfg.degree
    depth = cfg.depth if cfg.depth is not None else n + 1
    if depth < n + 1:
        raise ConfigError("depth %d cannot reach degree %d" % (depth, n))
    module = PolynomialModule(cfg.weight - 2)
    res = restrict_resolution(sl2z_resolution(depth), cfg.group())
    inv = cohomology(hom_complex(res, module), n)
    return {"group": str(cfg.group()), "degree": n, "weight": cfg.weight,
            "invariants": str(inv), "torsion": list(inv.torsion),
            "free_rank": inv.free_rank}, [str(inv)]


def _run_hecke(cfg):
    gamma = cfg.group()
    n = cfg.degree
    module = PolynomialModule(cfg.weight - 2)
    results = []
    lines = []
    if cfg.emit == "eigenvalues":
        reports = hecke_eigenvalues(gamma, n, cfg.ops, module=module)
        for p in sorted(reports):
            rep = reports[p]
            ordered = sorted(rep.roots, reverse=True)
            results.append({"p": rep.p, "eigenvalues": ordered,
                            "residual": list(rep.residual)})
            lines.append("T%d {%s}" % (rep.p,
                                       ", ".join(str(r) for r in ordered)))
    else:
        resolution = restrict_resolution(sl2z_resolution(n + 1), gamma)
        for p in cfg.ops:
            T = hecke_operator(gamma, n, hecke_representative(p),
                               module=module, resolution=resolution)
            if cfg.emit == "matrix":
                results.append({"p": p, "orders": list(T.orders),
                                "matrix": [list(r) for r in T.matrix.data]})
                lines.append("T%d orders %s" % (p, list(T.orders)))
                lines.extend("  " + " ".join(str(x) for x in row)
                             for row in T.matrix.data)
            else:
                # charpoly of the free block: torsion has no spectrum over Q
                poly = charpoly(T.free_block())
                results.append({"p": p, "charpoly": poly})
                lines.append("T%d %s" % (p, " ".join(str(c) for c in poly)))
    return {"group": str(gamma), "degree": n, "weight": cfg.weight,
            "emit": cfg.emit, "operators": results}, lines


def _run_cuspidal(cfg):
    module = PolynomialModule(cfg.module_degree)
    r = cuspidal_cohomology(cfg.group(), cfg.degree, module)
    doc = r.descriptor()
    lines = ["ambient %s" % doc["ambient"],
             "boundary %s" % doc["boundary"],
             "cuspidal %s" % doc["cuspidal"]]
    return doc, lines


def _run_dvf(cfg):
    if cfg.complex_path:
        X = load_complex(cfg.complex_path)
    else:
        X = bing_house()
    V = maximal_dvf(X)
    M = critical_complex(X, V)
    hom = [str(h) for h in all_homology(M)]
    crit = [len(level) for level in V.critical_cells(X)]
    result = {"cells": list(X.counts), "critical": crit, "homology": hom}
    lines = ["cells " + " ".join(str(c) for c in X.counts),
             "critical " + " ".join(str(c) for c in crit),
             "homology " + " | ".join(hom)]
    return result, lines


def _run_quad(cfg):
    x = parse_quad(cfg.ideal, cfg.d)
    a = ideal_from_generators([x])
    result = {"d": cfg.d, "ideal": cfg.ideal, "element_norm": x.norm()}
    lines = []
    for fieldname in cfg.report:
        if fieldname == "norm":
            result["norm"] = a.norm()
            lines.append("norm %d" % a.norm())
        elif fieldname == "prime":
            result["prime"] = a.is_prime()
            lines.append("prime %s" % a.is_prime())
        elif fieldname == "index":
            result["index"] = gamma0_index(a)
            lines.append("index %d" % result["index"])
        elif fieldname == "l-ratio":
            # both normalizations in circulation, reported side by side
            v18 = l_ratio(cfg.d, pi_multiple=18)
            v6 = l_ratio(cfg.d, pi_multiple=6)
            result["l_ratio_18pi"] = round(v18, 7)
            result["l_ratio_6pi"] = round(v6, 7)
            lines.append("l-ratio(18pi) %.7f" % v18)
            lines.append("l-ratio(6pi) %.7f" % v6)
        elif fieldname == "torsion-ratio":
            v = torsion_ratio(cfg.orders, a)
            result["torsion_ratio"] = round(v, 8)
            lines.append("torsion-ratio %.8f" % v)
    return result, lines


def _run_contract(cfg):
    if cfg.complex_path and cfg.kind:
        raise ConfigError("give either --complex or a group, not both")
    if cfg.complex_path:
        C = load_complex(cfg.complex_path).as_chain_complex()
        label = cfg.complex_path
        report_top = C.top_degree
    elif cfg.kind:
        depth = cfg.depth if cfg.depth is not None else 2
        C = _group_chain_complex(cfg, depth)
        label = str(cfg.group())
        # the complex is a truncation, so its top homology is an artifact
        # of cutting the resolution off and is not reported
        report_top = C.top_degree - 1
    else:
        raise ConfigError("contract needs --complex or a group")
    ranks_before = list(C.ranks)
    D = contract(C)
    hom = [str(h) for h in all_homology(D)[:report_top + 1]]
    result = {"source": label, "ranks": ranks_before,
              "ranks_contracted": list(D.ranks), "collapses": len(D.trace),
              "homology": hom}
    lines = ["ranks " + " ".join(str(r) for r in ranks_before),
             "contracted " + " ".join(str(r) for r in D.ranks),
             "homology " + " | ".join(hom)]
    return result, lines


_RUNNERS = {
    "index": _run_index,
    "generators": _run_generators,
    "homology": _run_homology,
    "cohomology": _run_cohomology,
    "hecke": _run_hecke,
    "cuspidal": _run_cuspidal,
    "dvf": _run_dvf,
    "quad": _run_quad,
    "contract": _run_contract,
}


def run(cfg, out=None):
    """Execute a validated configuration; returns the process exit code."""
    out = out if out is not None else sys.stdout
    try:
        result, lines = _RUNNERS[cfg.subcommand](cfg)
    except ConfigError:
        raise
    except ArtifactError as err:
        if cfg.fmt == "json":
            doc = {"schema": SCHEMA, "subcommand": cfg.subcommand,
                   "error": {"type": type(err).__name__, "message": str(err)}}
            print(json.dumps(doc, sort_keys=True), file=out)
        else:
            print("error %s: %s" % (type(err).__name__, err), file=sys.stderr)
        return 3
    if cfg.fmt == "json":
        doc = {"schema": SCHEMA, "subcommand": cfg.subcommand,
               "result": result}
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        for line in lines:
            print(line, file=out)
    return 0


def main(argv=None):
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except ConfigError as err:
        if ns.format == "json":
            doc = {"schema": SCHEMA, "subcommand": ns.subcommand,
                   "error": {"type": "ConfigError", "message": str(err)}}
            print(json.dumps(doc, sort_keys=True))
        else:
            print("error ConfigError: %s" % err, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
