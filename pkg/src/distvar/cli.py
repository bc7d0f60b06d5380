"""Command-line front end.

Exit codes: 0 pass, 2 fail (including invalid mathematical input), 1 I/O or
parse error.  Diagnostics go to stderr; data goes to stdout or ``--out``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import io as dio
from .dilation import (
    ContractionTuple,
    check_fundamental_eq_star,
    defects,
    is_pure_c0,
    solve_sigma_star,
    vn_check,
)
from .errors import DistvarError, ParseError, ShapeError
from .generators import KINDS, generate_sigma
from .numkernel import Tolerances
from .pencilvariety import certify_distinguished, trace_variety, validate_sigma
from .polynomials import MatrixPolynomial
from .symdisc import (
    FPencilData,
    SymPoint,
    bidisc_determinantal_fiber,
    in_gn,
    pullback_to_polydisc,
    trace_lambda,
    validate_fpencil,
)

EXIT_PASS, EXIT_IO, EXIT_FAIL = 0, 1, 2


@dataclass
class RunConfig:
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    grid_radii: tuple[float, ...] = (0.2, 0.4, 0.6, 0.8, 0.95)
    grid_angles: int = 64
    boundary_angles: int = 360
    output_format: str = "csv"

    def __post_init__(self):
        if not self.grid_radii or any(r <= 0 or r > 1 for r in self.grid_radii):
            raise ValueError("grid radii must lie in (0, 1]")
        if self.grid_angles < 1 or self.boundary_angles < 1:
            raise ValueError("angle counts must be at least 1")
        if self.output_format not in ("csv", "json"):
            raise ValueError("output format must be csv or json")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        tol = Tolerances(**data.get("tolerances", {}))
        return cls(
            tolerances=tol,
            seed=int(data.get("seed", 0)),
            grid_radii=tuple(float(r) for r in data.get("gridRadii", cls.grid_radii)),
            grid_angles=int(data.get("gridAngles", cls.grid_angles)),
            boundary_angles=int(data.get("boundaryAngles", cls.boundary_angles)),
            output_format=data.get("outputFormat", cls.output_format),
        )


def _to_jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return _to_jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return _to_jsonable(obj.to_dict())
    return obj


def _dumps(obj) -> str:
    return json.dumps(_to_jsonable(obj), indent=1) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_complex(text: str) -> complex:
    """Accept ``re``, ``re,im`` or Python complex literals such as ``0.1+0.2j``."""
    text = text.strip()
    if "," in text:
        re_, im = text.split(",", 1)
        return complex(float(re_), float(im))
    return complex(text.replace("i", "j"))


def _config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = RunConfig.from_json(json.loads(Path(args.config).read_text()))
    env_seed = os.environ.get("DISTVAR_SEED")
    if env_seed is not None:
        cfg = replace(cfg, seed=int(env_seed))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    tol = cfg.tolerances
    tol = Tolerances(
        structural=args.structural_tol if args.structural_tol is not None else tol.structural,
        spectral=args.spectral_tol if args.spectral_tol is not None else tol.spectral,
        rank=args.rank_tol if args.rank_tol is not None else tol.rank,
    )
    cfg = replace(cfg, tolerances=tol)
    if getattr(args, "radii", None):
        cfg = replace(cfg, grid_radii=tuple(sorted(args.radii)))
    if getattr(args, "angles", None):
        cfg = replace(cfg, grid_angles=args.angles)
    if getattr(args, "boundary_angles", None):
        cfg = replace(cfg, boundary_angles=args.boundary_angles)
    if getattr(args, "format", None):
        cfg = replace(cfg, output_format=args.format)
    return cfg


def cmd_validate_sigma(args, cfg: RunConfig) -> int:
    s = dio.sigma_from_named(dio.load_matrix_file(args.file))
    report = validate_sigma(s, cfg.tolerances, args.z_samples)
    _emit(_dumps(report), args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_trace(args, cfg: RunConfig) -> int:
    s = dio.sigma_from_named(dio.load_matrix_file(args.file))
    cloud = trace_variety(s, cfg.grid_radii, cfg.grid_angles, cfg.tolerances, cfg.seed)
    if cfg.output_format == "json":
        _emit(dio.cloud_to_json(cloud), args.out)
    else:
        _emit(dio.cloud_to_csv(cloud.points, s.n), args.out)
    if args.emit_plot:
        coords = cloud.coordinates()
        for i in range(s.n):
            lines = [f"{float(c.real)!r} {float(c.imag)!r}" for c in coords[:, i]]
            Path(f"{args.emit_plot}_z{i + 1}.dat").write_text("\n".join(lines) + "\n")
    return EXIT_PASS


def _certify_sigma(s, cfg: RunConfig) -> dict:
    cloud = trace_variety(s, cfg.grid_radii, cfg.grid_angles, cfg.tolerances, cfg.seed)
    cert = certify_distinguished(cloud, cfg.boundary_angles, cfg.tolerances, cfg.seed)
    return {
        **cert.to_dict(),
        "points": len(cloud.points),
        "interior": cloud.interior_count,
        "boundary": cloud.boundary_count,
    }


def cmd_certify(args, cfg: RunConfig) -> int:
    s = dio.sigma_from_named(dio.load_matrix_file(args.file))
    report = validate_sigma(s, cfg.tolerances)
    out = {"validation": report.to_dict()}
    if report.passed:
        out["certificate"] = _certify_sigma(s, cfg)
        out["verdict"] = out["certificate"]["verdict"]
    else:
        out["verdict"] = "fail"
    _emit(_dumps(out), args.out)
    return EXIT_PASS if out["verdict"] == "pass" else EXIT_FAIL


def cmd_in_gn(args, cfg: RunConfig) -> int:
    values = [_parse_complex(v) for v in args.values]
    if len(values) < 2:
        raise ParseError("in-gn needs s_1 .. s_{n-1} followed by p")
    mem = in_gn(SymPoint(tuple(values[:-1]), values[-1]), cfg.tolerances)
    _emit(_dumps(mem), args.out)
    return EXIT_PASS if mem.inside else EXIT_FAIL


def cmd_trace_fpencil(args, cfg: RunConfig) -> int:
    named = dio.load_matrix_file(args.file)
    f = FPencilData(tuple(dio.tuple_from_named(named, "F")))
    tol = cfg.tolerances
    report = validate_fpencil(f, args.z_samples, tol, cfg.seed)
    if args.pgrid:
        grid = [_parse_complex(v) for v in args.pgrid]
    else:
        grid = [r * np.exp(2j * np.pi * k / cfg.grid_angles)
                for r in cfg.grid_radii for k in range(cfg.grid_angles)]
    out = {"validation": report.to_dict()}
    if report.condition_i:
        lam = trace_lambda(f, grid, tol, cfg.seed)
        pulled = pullback_to_polydisc([q for q, _ in lam], tol)
        out["lambda"] = [{"s": list(q.s), "p": q.p, "residual": r} for q, r in lam]
        out["pullback"] = [{"coordinates": list(v.coordinates), "class": v.classification,
                            "residual": v.witness_residual} for v in pulled]
    _emit(_dumps(out), args.out)
    return EXIT_PASS if report.verdict == "pass" else EXIT_FAIL


def cmd_bidisc_fiber(args, cfg: RunConfig) -> int:
    named = dio.load_matrix_file(args.file)
    a = named.get("A", next(iter(named.values())) if named else None)
    if a is None:
        raise ParseError("no matrix in file")
    z = _parse_complex(args.z)
    ws = bidisc_determinantal_fiber(a, z, cfg.tolerances, cfg.seed)
    _emit(_dumps({"z": z, "w": ws}), args.out)
    return EXIT_PASS


def cmd_certify_dilation(args, cfg: RunConfig) -> int:
    tol = cfg.tolerances
    t = ContractionTuple.from_matrices(dio.tuple_from_named(dio.load_matrix_file(args.file)), tol)
    dd = defects(t, tol)
    pure = is_pure_c0(t.product, tol)
    out: dict = {
        "n": t.n,
        "m": t.m,
        "pure": pure,
        "defect_dim": dd.defect_dim,
        "defect_star_dim": dd.defect_star_dim,
    }
    sigma = None
    if args.sigma:
        sigma = dio.sigma_from_named(dio.load_matrix_file(args.sigma))
        out["sigma_source"] = "given"
    elif pure and dd.defect_star_dim >= 1:
        res = solve_sigma_star(t, dd, tol, args.max_iter)
        out["sigma_source"] = "solved"
        out["solver"] = {"status": res.status, "history": res.history}
        sigma = res.sigma
    verdict = pure and sigma is not None
    if sigma is not None:
        out["sigma"] = [dio.matrix_to_json(k, v) for k, v in dio.sigma_to_named(sigma).items()]
        report = validate_sigma(sigma, tol)
        out["sigma_validation"] = report.to_dict()
        if sigma.d == dd.defect_star_dim:
            star = check_fundamental_eq_star(t, sigma, dd, tol)
            out["fundamental_eq_star"] = star.to_dict()
            verdict = verdict and star.passed
        else:
            out["fundamental_eq_star"] = {"verdict": "fail", "error": "dimension mismatch"}
            verdict = False
        verdict = verdict and report.passed
        if report.passed:
            out["distinguished"] = _certify_sigma(sigma, cfg)
            verdict = verdict and out["distinguished"]["verdict"] == "pass"
    out["verdict"] = "pass" if verdict else "fail"
    _emit(_dumps(out), args.out)
    return EXIT_PASS if verdict else EXIT_FAIL


def cmd_vn_check(args, cfg: RunConfig) -> int:
    t = ContractionTuple.from_matrices(
        dio.tuple_from_named(dio.load_matrix_file(args.tuple_file)), cfg.tolerances)
    pts = dio.load_cloud(args.cloud_file)
    coords = np.array([p.coordinates for p in pts], dtype=np.complex128)
    try:
        doc = json.loads(Path(args.polys_file).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.polys_file}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    polys = [MatrixPolynomial.from_dict(d) for d in doc]
    report = vn_check(t, coords, polys, cfg.tolerances)
    _emit(_dumps(report), args.out)
    return EXIT_PASS if all(r.satisfied for r in report["results"]) else EXIT_FAIL


def cmd_gen(args, cfg: RunConfig) -> int:
    s = generate_sigma(args.kind, args.n, args.d, cfg.seed)
    _emit(dio.dump_matrices(dio.sigma_to_named(s)), args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file mirroring RunConfig")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--structural-tol", type=float, default=None)
    common.add_argument("--spectral-tol", type=float, default=None)
    common.add_argument("--rank-tol", type=float, default=None)
    common.add_argument("--out", help="write data here instead of stdout")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--radii", type=float, nargs="+")
    grid.add_argument("--angles", type=int)

    parser = argparse.ArgumentParser(prog="distvar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-sigma", parents=[common], help="check Sigma data conditions")
    p.add_argument("file")
    p.add_argument("--z-samples", type=int, default=16)
    p.set_defaults(func=cmd_validate_sigma)

    p = sub.add_parser("trace", parents=[common, grid], help="trace the set cut out by Sigma")
    p.add_argument("file")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--emit-plot", metavar="PREFIX")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("certify", parents=[common, grid], help="distinguished-set certificate")
    p.add_argument("file")
    p.add_argument("--boundary-angles", type=int)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("in-gn", parents=[common], help="membership in the symmetrized polydisc")
    p.add_argument("values", nargs="+", help="s_1 .. s_{n-1} p (re, re,im or a+bj)")
    p.set_defaults(func=cmd_in_gn)

    p = sub.add_parser("trace-fpencil", parents=[common, grid], help="trace an F-pencil variety")
    p.add_argument("file")
    p.add_argument("--pgrid", nargs="+")
    p.add_argument("--z-samples", type=int, default=16)
    p.set_defaults(func=cmd_trace_fpencil)

    p = sub.add_parser("bidisc-fiber", parents=[common], help="w-values of det(A* + Azw - (z+w)I)")
    p.add_argument("file")
    p.add_argument("--z", required=True)
    p.set_defaults(func=cmd_bidisc_fiber)

    p = sub.add_parser("certify-dilation", parents=[common, grid], help="dilation certificate")
    p.add_argument("file")
    p.add_argument("--sigma")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--boundary-angles", type=int)
    p.set_defaults(func=cmd_certify_dilation)

    p = sub.add_parser("vn-check", parents=[common], help="von Neumann inequality on a cloud")
    p.add_argument("tuple_file")
    p.add_argument("cloud_file")
    p.add_argument("polys_file")
    p.set_defaults(func=cmd_vn_check)

    p = sub.add_parser("gen", parents=[common], help="generate random valid Sigma data")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (ParseError, ShapeError, OSError, json.JSONDecodeError) as exc:
        print(f"distvar: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DistvarError, ValueError) as exc:
        print(f"distvar: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
