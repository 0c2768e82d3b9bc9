"""Command line frontend: ``santalo <command> ...``.

Exit status: 0 on success, 1 on invalid input (bad body files, unknown commands,
failed preconditions), 2 when a numerical solver does not converge.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import lab
from ._numerics import unit
from .bodies import Polygon, PolytopeV, RevolutionBody, body_to_dict, load_body, save_body
from .bodies.hyperplane import Hyperplane
from .errors import ConvergenceError, GeometryError, InvalidBody
from .measures import (affine_ratios, affine_surface_area, bm_distance_ball, bonnesen_report,
                       difference_body_gap, minkowski_q)
from .polar import santalo_point, volume_product_report
from .symmetrize import (SCHWARZ_GRID, full_reduction, isotropic_normalize, rounding_pipeline,
                         schwarz_round, steiner)

log = logging.getLogger("santalo.cli")

FAMILY_ALIASES = {"caps": "caps_cut_ball", "lp": "lp_revolution", "random": "random_polytope",
                  "ellipsoid": "ellipsoid"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems are input errors (status 1); 2 is reserved for non-convergence
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    action: str | None = None
    body: str | None = None
    out: str | None = None
    n: int | None = None
    eps: str | None = None
    grid: int = SCHWARZ_GRID
    tol: float = 1e-9
    seed: int = 0
    threads: int = 1
    options: dict = field(default_factory=dict)

    def validate(self):
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.n is not None and self.n not in (2, 3, 4):
            raise UsageError("--n must be 2, 3 or 4")
        if self.grid < 8:
            raise UsageError("--grid must be at least 8")
        if self.threads < 1:
            raise UsageError("--threads must be at least 1")
        return self


def parse_range(text: str) -> list:
    """'a:b:geometric:k', 'a:b:linear:k' or a comma separated list."""
    parts = text.split(":")
    try:
        if len(parts) == 4:
            a, b, kind, k = float(parts[0]), float(parts[1]), parts[2], int(parts[3])
            if kind == "geometric":
                return np.geomspace(a, b, k).tolist()
            if kind == "linear":
                return np.linspace(a, b, k).tolist()
            raise UsageError(f"unknown spacing {kind!r}")
        return [float(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise UsageError(f"cannot parse range {text!r}") from exc


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _need_body(cfg):
    if not cfg.body:
        raise UsageError("--body is required")
    return load_body(cfg.body)


def _vector(text, n):
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc
    if v.shape != (n,):
        raise UsageError(f"vector must have {n} components")
    return unit(v)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------
def cmd_body(cfg):
    K = _need_body(cfg)
    if cfg.action == "validate":
        _emit({"valid": True, "kind": body_to_dict(K)["kind"], "n": K.n, "volume": K.volume()}, cfg.out)
        return
    to = cfg.options.get("to")
    if isinstance(K, RevolutionBody):
        raise UsageError("bodies of revolution have no H/V conversion")
    if to == "h":
        out = K.to_h()
    elif to == "v":
        out = Polygon(K.vertices, check=False) if K.n == 2 else PolytopeV(K.vertices, check=False)
    else:
        raise UsageError("--to must be 'h' or 'v'")
    if not cfg.out:
        raise UsageError("--out is required for convert")
    save_body(out, cfg.out)


def cmd_product(cfg):
    _emit(volume_product_report(_need_body(cfg)).to_dict(), cfg.out)


def cmd_santalo(cfg):
    z, res = santalo_point(_need_body(cfg), return_residual=True)
    _emit({"z": [float(v) for v in z], "certificate_residual": res}, cfg.out)


def cmd_symmetrize(cfg):
    K = _need_body(cfg)
    op = cfg.options.get("op")
    info = {}
    if op == "steiner":
        u = _vector(cfg.options.get("u") or "", K.n)
        out = steiner(K, Hyperplane(u, cfg.options.get("offset", 0.0)))
    elif op == "schwarz":
        out = schwarz_round(K, _vector(cfg.options.get("u") or "", K.n), grid=cfg.grid)
    elif op == "isotropic":
        rep, out = isotropic_normalize(K)
        info = rep.to_dict()
    elif op == "rounding":
        out, r = rounding_pipeline(K, grid=cfg.grid, return_info=True)
        info = {"direction": r.direction.tolist(), "h": r.h, "case": r.case}
    elif op in ("full", "reduce"):
        out, r = full_reduction(K, grid=cfg.grid, return_info=True)
        info = {"branch": r.branch, "eps": r.eps, "bm_first": r.bm_first}
    else:
        raise UsageError("--op must be one of steiner, schwarz, isotropic, rounding, full")
    if cfg.out:
        save_body(out, cfg.out)
    _emit({"op": op, "volume_in": K.volume(), "volume_out": out.volume(), **info}, None)


def cmd_measure(cfg):
    K = _need_body(cfg)
    opts = cfg.options
    wanted = [k for k in ("q", "bm", "bonnesen", "diff", "asa", "affine") if opts.get(k)]
    if not wanted:
        wanted = ["q"]
    res = {}
    if "q" in wanted:
        rep = minkowski_q(K)
        res["q"] = rep.q
        res["q_center"] = [float(c) for c in rep.center]
    if "bm" in wanted:
        res["bm_distance_ball"] = bm_distance_ball(K)
    if "bonnesen" in wanted:
        if K.n != 2 or isinstance(K, RevolutionBody):
            raise UsageError("--bonnesen needs a polygon")
        res["bonnesen"] = bonnesen_report(K).to_dict()
    if "diff" in wanted:
        res["difference_body_gap"] = difference_body_gap(K)
    if "asa" in wanted:
        if not isinstance(K, RevolutionBody):
            raise UsageError("--asa needs a body of revolution")
        res["affine_surface_area"] = affine_surface_area(K)
    if "affine" in wanted:
        iso, lut = affine_ratios(K)
        res["affine_isoperimetric_ratio"] = iso
        res["lutwak_ratio"] = lut
    _emit(res, cfg.out)


def cmd_lab(cfg):
    if cfg.action == "scan":
        fam = FAMILY_ALIASES.get(cfg.options.get("family") or "", cfg.options.get("family"))
        if cfg.n is None:
            raise UsageError("--n is required for lab scan")
        if fam == "random_polytope":
            spec = lab.FamilySpec(fam, cfg.n, count=int(cfg.options.get("count") or 10), seed=cfg.seed,
                                  symmetric=True)
        else:
            if not cfg.eps:
                raise UsageError("--eps is required for this family")
            spec = lab.FamilySpec(fam or "", cfg.n, parse_range(cfg.eps), seed=cfg.seed)
        records, exponent = lab.stability_scan(spec, threads=cfg.threads)
        if not cfg.out:
            raise UsageError("--out is required for lab scan")
        lab.write_records(records, cfg.out, exponent, timing=not cfg.options.get("no_timing"))
        _emit({"records": len(records), "fitted_exponent": exponent}, None)
    elif cfg.action == "chain":
        rep = lab.bs_chain_check(_need_body(cfg), grid=cfg.grid)
        _emit(rep.to_dict(), cfg.out)
    elif cfg.action == "falsecentre":
        q, (t, f), rep = lab.false_centre_scan(_need_body(cfg))
        rep.update({"q_max": q, "t": t[:: max(1, len(t) // 512)].tolist(),
                    "f": f[:: max(1, len(f) // 512)].tolist()})
        _emit(rep, cfg.out)
    else:
        raise UsageError("lab needs one of scan, chain, falsecentre")


COMMANDS = {"body": cmd_body, "product": cmd_product, "santalo": cmd_santalo,
            "symmetrize": cmd_symmetrize, "measure": cmd_measure, "lab": cmd_lab}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body")
    common.add_argument("--out")
    common.add_argument("--n", type=int)
    common.add_argument("--eps")
    common.add_argument("--grid", type=int, default=SCHWARZ_GRID)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)

    p = _Parser(prog="santalo", description="Polarity, symmetrization and stability experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("body", parents=[common], help="validate or convert a body file")
    b.add_argument("action", choices=["validate", "convert"])
    b.add_argument("--to", choices=["h", "v"])
    sub.add_parser("product", parents=[common], help="volume product report")
    sub.add_parser("santalo", parents=[common], help="Santalo point")
    s = sub.add_parser("symmetrize", parents=[common], help="symmetrizations and normalizations")
    s.add_argument("--op", required=True, choices=["steiner", "schwarz", "isotropic", "rounding", "full", "reduce"])
    s.add_argument("--u", "--axis", dest="u", help="comma separated direction")
    s.add_argument("--offset", type=float, default=0.0)
    m = sub.add_parser("measure", parents=[common], help="symmetry and distance functionals")
    for flag in ("q", "bm", "bonnesen", "diff", "asa"):
        m.add_argument(f"--{flag}", action="store_true")
    m.add_argument("--ratios", "--affine", dest="affine", action="store_true",
                   help="affine isoperimetric and Lutwak ratios")
    la = sub.add_parser("lab", parents=[common], help="experiments")
    la.add_argument("action", choices=["scan", "chain", "falsecentre"])
    la.add_argument("--family", choices=sorted(FAMILY_ALIASES) + sorted(lab.FAMILIES))
    la.add_argument("--count", type=int)
    la.add_argument("--no-timing", action="store_true", help="write 0 in the seconds column")
    return p


def config_from_args(ns) -> RunConfig:
    base = {"command", "action", "body", "out", "n", "eps", "grid", "tol", "seed", "threads"}
    opts = {k: v for k, v in vars(ns).items() if k not in base}
    return RunConfig(ns.command, getattr(ns, "action", None), ns.body, ns.out, ns.n, ns.eps, ns.grid,
                     ns.tol, ns.seed, ns.threads, opts).validate()


def dispatch(cfg: RunConfig) -> int:
    COMMANDS[cfg.command](cfg)
    return 0


def main(argv=None) -> int:
    lab.configure_logging()
    try:
        cfg = config_from_args(build_parser().parse_args(argv))
        return dispatch(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvalidBody as exc:
        print(f"invalid body: invariant '{exc.invariant}' violated: {exc.detail}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        # domain, representation and precondition failures are input errors
        if type(exc) is GeometryError:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
