"""Command-line front end.

    rugosity <command> --config job.json --output out/ [--threads N] [--strict]

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 degenerate
result under ``--strict``.  Artifacts are written atomically; failures leave
only ``error.json`` in the output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import residual_check, solve_limit
from .errors import NumericalError, RugosityError, ValidationError
from .fem import RobinProblem, solve_on_mesh
from .geometry import SlabDomain, build_mesh
from .homogenize import (Combine, GraphSampler1D, GraphSampler2D, homogenize_energy,
                         homogenize_polynomial, ldg_density, ldg_effective,
                         oseen_frank_effective, polynomial_energy, rapini_papoular,
                         slab_effective, slab_sampler)
from .profile import profile_from_spec, validate
from .quadrature import QuadratureRule
from .study import SweepConfig, refinement_change, run_sweep
from .tensors import TOP_ANCHORING, QTensor2

COMMANDS = ("effective", "homogenize", "mesh", "solve", "limit", "sweep")
OUTPUT_ENV = "RUGOSITY_OUTPUT"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_DEGENERATE = 0, 2, 3, 4


@dataclass
class JobConfig:
    command: str
    payload: dict
    output_dir: Path
    seed: int = 0
    threads: int = 1
    strict: bool = False
    figures: bool = True
    reproducible: bool = False
    artifacts: dict = field(default_factory=dict)
    degenerate: bool = False

    def provenance(self) -> dict:
        return {"toolkit": "rugosity", "version": __version__, "command": self.command,
                "seed": self.seed, "config": self.payload}


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_to_builtin) + "\n"


def _to_builtin(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _csv_with_header(job: JobConfig, csv: str) -> str:
    header = "# " + json.dumps(job.provenance(), sort_keys=True, default=_to_builtin) + "\n"
    return header + csv


def _figure(job: JobConfig, name: str, render, *args):
    if not job.figures:
        return
    job.output_dir.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=job.output_dir, prefix=f".{name}.", suffix=".png")
    os.close(fd)
    try:
        render(*args, tmp)
        os.replace(tmp, job.output_dir / name)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    job.artifacts[name] = None


# payload helpers


def _require(payload: dict, key: str):
    if key not in payload:
        raise ValidationError(f"payload is missing {key!r}")
    return payload[key]


def _number(payload: dict, key: str, default=None, positive: bool = False) -> float:
    value = payload.get(key, default)
    if value is None:
        raise ValidationError(f"payload is missing {key!r}")
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{key!r} must be a number") from exc
    if not np.isfinite(value):
        raise ValidationError(f"{key!r} must be finite")
    if positive and not value > 0:
        raise ValidationError(f"{key!r} must be positive, got {value}")
    return value


def _domain(payload: dict) -> SlabDomain:
    profile = profile_from_spec(_require(payload, "profile"))
    validate(profile)
    return SlabDomain(_number(payload, "R", positive=True),
                      _number(payload, "eps", positive=True), profile)


def _sampler3d(payload: dict):
    profile = profile_from_spec(_require(payload, "profile"))
    validate(profile)
    if "profile_v" in payload:
        other = profile_from_spec(payload["profile_v"])
        validate(other)
        sampler = GraphSampler2D(profile, other, Combine(payload.get("combine", "Sum")))
        if sampler.validate() < -1e-12:
            raise ValidationError("combined 2D profile is negative")
        return sampler
    return GraphSampler1D(profile, dim=3)


# commands


def cmd_effective(job: JobConfig):
    p = job.payload
    rule = QuadratureRule.from_dict(p.get("rule"))
    dim = int(p.get("dimension", 2))
    w0 = _number(p, "w0")
    if dim == 2:
        profile = profile_from_spec(_require(p, "profile"))
        eff = slab_effective(profile, w0, rule)
        result = {"dimension": 2, "slab": eff.to_dict()}
    elif dim == 3:
        sampler = _sampler3d(p)
        of = oseen_frank_effective(sampler, w0, rule, float(p.get("tie_tol", 1e-9)))
        result = {"dimension": 3, "oseen_frank": of.to_dict()}
        if w0 > 0:
            ldg = ldg_effective(sampler, w0, _number(p, "s0", 1.0), rule)
            result["landau_de_gennes"] = ldg.to_dict()
            result["jensen_violations"] = ldg.jensen_violations()
    else:
        raise ValidationError("dimension must be 2 or 3")
    result["rule"] = rule.to_dict()
    result["provenance"] = job.provenance()
    _write_atomic(job.output_dir / "effective.json", _json_text(result))
    job.artifacts["effective.json"] = result
    print(_json_text(result), end="")


def cmd_homogenize(job: JobConfig):
    """Homogenise a Rapini-Papoular or Landau-de Gennes density at given or random states."""
    p = job.payload
    rule = QuadratureRule.from_dict(p.get("rule"))
    dim = int(p.get("dimension", 3))
    w0 = _number(p, "w0")
    density = p.get("density", "rapini-papoular")
    if dim == 2:
        sampler = slab_sampler(profile_from_spec(_require(p, "profile")))
        validate(sampler.profile)
    elif dim == 3:
        sampler = _sampler3d(p)
    else:
        raise ValidationError("dimension must be 2 or 3")
    rng = np.random.default_rng(job.seed)
    if density == "rapini-papoular":
        w = rapini_papoular(w0)
        maps = [lambda n: 0.5 * w0 * n[:, :, None] * n[:, None, :]]
        states = p.get("states") or [rng.normal(size=dim).tolist()
                                     for _ in range(int(p.get("n_random_states", 5)))]
        states = [np.asarray(s, dtype=float) for s in states]
    elif density == "ldg":
        s0 = _number(p, "s0", 1.0)
        w = ldg_density(w0, s0)
        eye = np.eye(dim)

        def a0(n):
            P = s0 * (n[:, :, None] * n[:, None, :] - eye / dim)
            return 0.5 * w0 * np.einsum("mij,mij->m", P, P)

        maps = [a0, lambda n: -w0 * s0 * (n[:, :, None] * n[:, None, :] - eye / dim).reshape(len(n), -1),
                lambda n: np.broadcast_to(0.5 * w0 * np.eye(dim * dim), (len(n), dim * dim, dim * dim))]
        raw = p.get("states")
        if raw:
            states = [np.asarray(s, dtype=float) for s in raw]
        else:
            states = []
            for _ in range(int(p.get("n_random_states", 5))):
                m = rng.normal(size=(dim, dim))
                m = 0.5 * (m + m.T)
                states.append(m - np.trace(m) / dim * eye)
    else:
        raise ValidationError(f"unknown density {density!r}")
    coeffs = homogenize_polynomial(sampler, maps, rule)
    rows = []
    for u in states:
        direct = homogenize_energy(sampler, w, u, rule)
        poly = polynomial_energy(coeffs, u)
        rows.append({"state": u.tolist(), "energy": direct, "polynomial_energy": poly,
                     "difference": abs(direct - poly)})
    result = {"density": density, "dimension": dim, "coefficients": [c.tolist() for c in coeffs],
              "evaluations": rows, "rule": rule.to_dict(), "provenance": job.provenance()}
    _write_atomic(job.output_dir / "homogenize.json", _json_text(result))
    job.artifacts["homogenize.json"] = result
    print(_json_text({"evaluations": rows}), end="")


def _mesh_params(p: dict):
    return (int(p.get("nx_per_period", 16)), int(p.get("ny", 16)), float(p.get("grading", 1.5)))


def cmd_mesh(job: JobConfig):
    domain = _domain(job.payload)
    mesh = build_mesh(domain, *_mesh_params(job.payload))
    summary = {"n_nodes": mesh.n_nodes, "n_triangles": len(mesh.triangles), "nx": mesh.nx,
               "ny": mesh.ny, "h_max": mesh.h_max, "area": mesh.area(),
               "exact_area": domain.area(), "wall_length": float(mesh.bottom_weights.sum()),
               "provenance": job.provenance()}
    text = "".join("# " + line + "\n" for line in
                   json.dumps(job.provenance(), sort_keys=True).splitlines()) + mesh.to_text()
    _write_atomic(job.output_dir / "mesh.txt", text)
    _write_atomic(job.output_dir / "mesh.json", _json_text(summary))
    job.artifacts.update({"mesh.txt": None, "mesh.json": summary})
    from .report import plot_mesh
    _figure(job, "mesh.png", plot_mesh, mesh)
    print(_json_text({k: v for k, v in summary.items() if k != "provenance"}), end="")


def cmd_solve(job: JobConfig):
    p = job.payload
    domain = _domain(p)
    c = _number(p, "c", 1.0, positive=True)
    w0 = _number(p, "w0", 2.0, positive=True)
    mesh = build_mesh(domain, *_mesh_params(p))
    sol = solve_on_mesh(mesh, RobinProblem.rugose(domain, c, w0), _number(p, "cg_tol", 1e-10, True))
    stats = sol.stats()
    if job.reproducible:
        stats = {k: (0.0 if k.endswith("_seconds") else v) for k, v in stats.items()}
    stats["provenance"] = job.provenance()
    _write_atomic(job.output_dir / "solution.csv", _csv_with_header(job, sol.to_csv()))
    _write_atomic(job.output_dir / "solver_stats.json", _json_text(stats))
    job.artifacts.update({"solution.csv": None, "solver_stats.json": stats})
    from .report import plot_solution
    _figure(job, "solution.png", plot_solution, sol)
    print(_json_text({k: v for k, v in stats.items() if k != "provenance"}), end="")


def cmd_limit(job: JobConfig):
    p = job.payload
    c = _number(p, "c", 1.0, positive=True)
    w0 = _number(p, "w0", 2.0, positive=True)
    R = _number(p, "R", 1.0, positive=True)
    if "profile" in p:
        eff = slab_effective(profile_from_spec(p["profile"]), w0)
        w_ef, Q_ef = eff.w_ef, eff.Q_ef
    else:
        w_ef = _number(p, "w_ef", positive=True)
        Q_ef = QTensor2.from_dict(_require(p, "Q_ef"))
    Q_R = QTensor2.from_dict(p["Q_R"]) if "Q_R" in p else TOP_ANCHORING
    sol = solve_limit(c, w_ef, w0, R, Q_ef, Q_R)
    n = int(p.get("n_samples", 11))
    ys = np.linspace(0.0, R, n)
    samples = [{"y": float(y), "q1": float(q[0]), "q2": float(q[1])}
               for y, q in zip(ys, sol.components(ys))]
    result = {"solution": sol.to_dict(), "samples": samples,
              "residuals": residual_check(sol, max(n, 3)).to_dict(),
              "provenance": job.provenance()}
    _write_atomic(job.output_dir / "limit.json", _json_text(result))
    job.artifacts["limit.json"] = result
    from .report import plot_limit
    _figure(job, "limit.png", plot_limit, sol)
    print(_json_text({k: v for k, v in result.items() if k != "provenance"}), end="")


def cmd_sweep(job: JobConfig):
    payload = dict(job.payload)
    check_refinement = bool(payload.pop("refinement_check", False))
    config = SweepConfig.from_dict(payload)
    report = run_sweep(config, threads=job.threads)
    if job.reproducible:
        from dataclasses import replace
        report = replace(report, rows=[replace(r, wall_time=0.0) for r in report.rows])
    summary = report.summary()
    if check_refinement and not report.degenerate:
        summary["refinement"] = refinement_change(config)
    summary["resolved_config"] = config.to_dict()
    summary["provenance"] = job.provenance()
    _write_atomic(job.output_dir / "sweep.csv", _csv_with_header(job, report.to_csv()))
    _write_atomic(job.output_dir / "sweep_summary.json", _json_text(summary))
    job.artifacts.update({"sweep.csv": None, "sweep_summary.json": summary})
    from .report import plot_rate
    _figure(job, "sweep.png", plot_rate, report)
    job.degenerate = report.degenerate
    brief = {k: summary[k] for k in ("fitted_slope", "r_squared", "theoretical_rate", "degenerate")}
    print(_json_text(brief), end="")


HANDLERS = {
    "effective": cmd_effective,
    "homogenize": cmd_homogenize,
    "mesh": cmd_mesh,
    "solve": cmd_solve,
    "limit": cmd_limit,
    "sweep": cmd_sweep,
}


def run(job: JobConfig) -> int:
    """Execute a job; returns the process exit code."""
    try:
        if job.command not in HANDLERS:
            raise ValidationError(f"unknown command {job.command!r}")
        if not isinstance(job.payload, dict):
            raise ValidationError("payload must be a JSON object")
        HANDLERS[job.command](job)
    except (RugosityError, ValueError, TypeError, KeyError) as exc:
        numerical = isinstance(exc, NumericalError)
        code = EXIT_NUMERICAL if numerical else EXIT_INVALID
        kind = "numerical" if numerical else "validation"
        print(f"rugosity {job.command}: {kind} error: {exc}", file=sys.stderr)
        error = {"error": type(exc).__name__, "kind": kind, "message": str(exc),
                 "exit_code": code, "provenance": job.provenance()}
        try:
            _write_atomic(job.output_dir / "error.json", _json_text(error))
        except OSError:
            pass
        return code
    if job.strict and job.degenerate:
        print(f"rugosity {job.command}: degenerate result (strict mode)", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rugosity",
        description="Homogenised surface energies for rugose nematic slabs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True,
                        help="JSON payload for the command ('-' reads standard input)")
    parser.add_argument("--output", default=None,
                        help=f"output directory (default ${OUTPUT_ENV} or the current directory)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--strict", action="store_true",
                        help="exit with code 4 on degenerate results")
    parser.add_argument("--no-figures", action="store_true", help="skip PNG figures")
    parser.add_argument("--reproducible", action="store_true",
                        help="zero wall-clock fields so that repeated runs are byte-identical")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    output = Path(args.output or os.environ.get(OUTPUT_ENV) or ".")
    try:
        text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text()
        payload = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"rugosity {args.command}: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    seed = args.seed
    if seed is None:
        seed = int(payload.pop("seed", 0)) if isinstance(payload, dict) else 0
    job = JobConfig(args.command, payload, output, seed, max(1, args.threads), args.strict,
                    not args.no_figures, args.reproducible)
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
