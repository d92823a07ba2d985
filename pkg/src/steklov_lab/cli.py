"""Batch front end: JSON config in, deterministic CSV/JSON/OBJ artifacts out.

Every run resolves its configuration (file, then flags) into a canonical
dictionary whose SHA-256 is stamped into each output file, so artifacts can
be traced back to the exact inputs that produced them. Floats are written
with 17 significant digits, which round-trips IEEE doubles exactly; a
repeated run with the same config and seed produces byte-identical files.

Exit codes: 0 ok, 2 bad config, 3 resolution failure, 4 invariant violation,
5 io failure. Errors print a single JSON line on stderr.
"""

import hashlib
import json
import os
import sys


def _thread_setup():
    """Pin BLAS pools before numpy loads; --threads beats the env variable."""
    n = None
    argv = sys.argv
    for i, a in enumerate(argv):
        if a == "--threads" and i + 1 < len(argv):
            n = argv[i + 1]
        elif a.startswith("--threads="):
            n = a.split("=", 1)[1]
    if n is None:
        n = os.environ.get("STEKLOV_LAB_THREADS")
    if n is not None and str(n).isdigit():
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(n))


_thread_setup()

import argparse
import dataclasses
import math

import numpy as np

from . import __version__
from .errors import (ConfigError, DependencyError, InfeasibleError,
                     InputDomainError, InvariantViolation, PositivityError,
                     ResolutionError, SpectrumError, SteklovLabError,
                     SymmetryError)
from .functional import FunctionalParams, evaluate_E, subgradient
from .optimize import OptimizerConfig, minimize, sweep_t
from .steklov import BoundaryWeight, solve_spectrum, solve_spectrum_blocks
from .trig import Parity, TrigSeries, from_grid_values, values_on_grid

TWO_PI = 2.0 * math.pi

_DESCENT_START = (1.0, 0.0, 0.2)

EXIT_OK, EXIT_CONFIG, EXIT_RESOLUTION, EXIT_INVARIANT, EXIT_IO = 0, 2, 3, 4, 5


# -------------------------------------------------------- canonical output

def _fmt(x: float) -> str:
    if not math.isfinite(x):
        return json.dumps(str(x))
    return format(float(x), ".17g")


def _json_text(obj, indent: int = 0) -> str:
    """Fixed-order JSON with 17-significant-digit floats."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = ",\n".join(f'{pad}  {json.dumps(str(k))}: '
                          f'{_json_text(v, indent + 1)}'
                          for k, v in obj.items())
        return "{\n" + rows + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        rows = ",\n".join(f"{pad}  {_json_text(v, indent + 1)}" for v in obj)
        return "[\n" + rows + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _config_hash(resolved: dict) -> str:
    return hashlib.sha256(_json_text(resolved).encode("ascii")).hexdigest()


class _Writer:
    """Single sink for all artifacts; stamps version and config hash."""

    def __init__(self, out_dir: str, cfg_hash: str):
        self.out_dir = out_dir
        self.stamp = f"steklov_lab={__version__} config_sha256={cfg_hash}"
        self.cfg_hash = cfg_hash
        os.makedirs(out_dir, exist_ok=True)
        self.paths = []

    def csv(self, name: str, header: list, rows: list) -> str:
        lines = ["# " + self.stamp, ",".join(header)]
        for row in rows:
            cells = [c if isinstance(c, str) else
                     (str(c) if isinstance(c, (int, np.integer, bool))
                      else _fmt(c)) for c in row]
            lines.append(",".join(cells))
        return self._write(name, "\n".join(lines) + "\n")

    def json(self, name: str, payload: dict) -> str:
        doc = {"version": __version__, "config_sha256": self.cfg_hash}
        doc.update(payload)
        return self._write(name, _json_text(doc) + "\n")

    def stamp_file(self, path: str):
        """Prefix an already-written artifact with the provenance comment."""
        with open(path, encoding="ascii") as fh:
            body = fh.read()
        with open(path, "w", encoding="ascii") as fh:
            fh.write("# " + self.stamp + "\n" + body)
        self.paths.append(path)

    def _write(self, name: str, text: str) -> str:
        path = os.path.join(self.out_dir, name)
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
        self.paths.append(path)
        return path


# ------------------------------------------------------------------ config

_TOP_KEYS = {"params", "optimizer", "weight_cos", "weight_log_cos", "t_grid",
             "eps_grid", "p_grid", "N", "k_max", "theta_tolerance",
             "export_resolution", "trace", "solver_N", "seed"}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError:
        raise
    except ValueError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _floats(cfg: dict, key: str, default=None):
    if key not in cfg:
        return default
    val = cfg[key]
    if (not isinstance(val, list) or not val
            or not all(isinstance(x, (int, float)) for x in val)):
        raise ConfigError(f"{key} must be a nonempty numeric array")
    return [float(x) for x in val]


def _scalar(cfg: dict, key: str, kind, default=None):
    if key not in cfg:
        return default
    val = cfg[key]
    if kind is float and isinstance(val, int):
        val = float(val)
    if not isinstance(val, kind) or isinstance(val, bool) != (kind is bool):
        raise ConfigError(f"{key} must be of type {kind.__name__}")
    return val


def _optimizer_from(cfg: dict, seed: int | None) -> OptimizerConfig:
    section = cfg.get("optimizer", {})
    if not isinstance(section, dict):
        raise ConfigError("optimizer section must be an object")
    allowed = {f.name for f in dataclasses.fields(OptimizerConfig)}
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown optimizer keys: {sorted(unknown)}")
    kwargs = dict(section)
    if seed is not None:
        kwargs["seed"] = seed
    try:
        return OptimizerConfig(**kwargs)
    except SteklovLabError:
        raise
    except TypeError as exc:
        raise ConfigError(f"bad optimizer section: {exc}") from exc


def _params_from(cfg: dict) -> FunctionalParams:
    section = cfg.get("params", {"s": 1.0, "t": 8.0})
    if (not isinstance(section, dict)
            or set(section) - {"s", "t"}
            or not all(isinstance(section.get(k, 0.0), (int, float))
                       for k in ("s", "t"))):
        raise ConfigError('params must be {"s": number, "t": number}')
    return FunctionalParams(float(section.get("s", 1.0)),
                            float(section.get("t", 8.0)))


def _weight_from(cfg: dict, default_cos=(1.0,)) -> BoundaryWeight:
    """Weight from config; the default differs by command.

    Spectrum defaults to the flat disk. The optimizing commands default to a
    slightly squeezed start instead: the flat disk is a critical point of the
    functional, so a descent started exactly there goes nowhere.
    """
    log_cos = _floats(cfg, "weight_log_cos")
    cos = _floats(cfg, "weight_cos")
    if log_cos is not None and cos is not None:
        raise ConfigError("give weight_cos or weight_log_cos, not both")
    if log_cos is not None:
        return BoundaryWeight.from_log(TrigSeries.from_cos(log_cos))
    if cos is not None:
        return BoundaryWeight.from_density(TrigSeries.from_cos(cos))
    return BoundaryWeight.from_density(TrigSeries.from_cos(list(default_cos)))


def _resolved(cmd: str, cfg: dict, seed: int | None) -> dict:
    out = {"command": cmd}
    for key in sorted(_TOP_KEYS):
        if key in cfg:
            out[key] = cfg[key]
    if seed is not None:
        out["seed"] = seed
    return out


# -------------------------------------------------------------- subcommands

def _cmd_spectrum(cfg: dict, writer: _Writer, seed: int | None) -> int:
    weight = _weight_from(cfg)
    N = _scalar(cfg, "N", int, 64)
    k_max = _scalar(cfg, "k_max", int, 6)
    if weight.symmetry_class is Parity.EVEN_BOTH:
        spec = solve_spectrum_blocks(weight, N=N, k_max=k_max)
        blocks = list(spec.block_labels)
    else:
        spec = solve_spectrum(weight, N=N, k_max=k_max)
        blocks = [""] * spec.sigmas.size
    rows = [(k, spec.sigmas[k], spec.normalized[k], blocks[k])
            for k in range(spec.sigmas.size)]
    writer.csv("spectrum.csv", ["k", "sigma", "sigma_bar", "block"], rows)
    writer.json("spectrum.json", {
        "L": float(spec.L),
        "sigma": [float(s) for s in spec.sigmas],
        "sigma_bar": [float(s) for s in spec.normalized],
        "block": blocks,
    })
    return EXIT_OK


def _optimize_payload(res) -> dict:
    log = res.weight.log_coeffs
    return {
        "E": res.objective,
        "p": res.p,
        "L": res.L,
        "sigma_bar_1": res.p * res.L,
        "sigma_bar_2": res.L,
        "converged": res.converged,
        "iterations": res.iterations,
        "subgrad_norm": res.subgrad_norm,
        "mass_residuals": list(res.mass_residuals),
        "planar": res.planarity_flag,
        "stall_reason": res.stall_reason,
        "weight_log_cos": ([float(c) for c in log.cos_coeffs]
                           if log is not None else None),
    }


def _cmd_optimize(cfg: dict, writer: _Writer, seed: int | None) -> int:
    params = _params_from(cfg)
    config = _optimizer_from(cfg, seed)
    res = minimize(params, config, _weight_from(cfg, _DESCENT_START))
    writer.json("optimize.json", _optimize_payload(res))
    if _scalar(cfg, "trace", bool, False):
        rows = [(i, e) for i, e in enumerate(res.objective_trace)]
        writer.csv("optimize_trace.csv", ["iteration", "E"], rows)
    return EXIT_OK


def _cmd_sweep(cfg: dict, writer: _Writer, seed: int | None) -> int:
    params = _params_from(cfg)
    t_grid = _floats(cfg, "t_grid")
    if t_grid is None:
        raise ConfigError("sweep needs a t_grid array")
    config = _optimizer_from(cfg, seed)
    rows = sweep_t(params.s, t_grid, config, _weight_from(cfg, _DESCENT_START))
    writer.csv("sweep.csv",
               ["t", "E", "sigma_bar_1", "sigma_bar_2", "p", "L",
                "converged", "flagged", "note"],
               [(r.t, r.E, r.sigma_bar_1, r.sigma_bar_2, r.p, r.L,
                 r.converged, r.flagged, json.dumps(r.note)) for r in rows])
    writer.json("sweep.json", {"rows": [dataclasses.asdict(r) for r in rows]})
    return EXIT_OK


def _cmd_testfamily(cfg: dict, writer: _Writer, seed: int | None) -> int:
    from .two_bubble import (asymptotics_sigma1, asymptotics_sigma2,
                             family_report)

    grid = _floats(cfg, "eps_grid")
    if grid is None:
        raise ConfigError("testfamily needs an eps_grid array")
    diffs = np.diff(grid)
    if not (np.all(diffs > 0.0) or np.all(diffs < 0.0)):
        raise ConfigError("eps_grid must be strictly monotone")
    grid = sorted(grid, reverse=True)
    rows = family_report(grid)
    header = ["epsilon", "sigma_bar_1", "sigma_bar_2", "sigma_bar_1_log",
              "deficit_rate", "rq_f1", "rq_f2"]
    writer.csv("testfamily.csv", header,
               [tuple(r[k] for k in header) for r in rows])
    writer.json("testfamily.json", {
        "rows": rows,
        "sigma_bar_1_log_limit_fit": asymptotics_sigma1(grid).fitted_constant,
        "sigma_bar_2_slope": asymptotics_sigma2(grid).slope,
    })
    return EXIT_OK


def _cmd_ellipse(cfg: dict, writer: _Writer, seed: int | None) -> int:
    from .ellipse import compute_indices

    grid = _floats(cfg, "p_grid")
    if grid is None:
        raise ConfigError("ellipse needs a p_grid array")
    diffs = np.diff(grid)
    if grid[0] != grid[-1] and not (np.all(diffs > 0.0)
                                    or np.all(diffs < 0.0)):
        raise ConfigError("p_grid must be strictly monotone")
    N = _scalar(cfg, "N", int, 160)
    results = [compute_indices(p, N=N) for p in grid]
    writer.csv("ellipse.csv",
               ["p", "k1", "k2", "sigma_bar_low", "sigma_bar_high",
                "map_residual"],
               [(r.p, r.k1, r.k2, r.sigma_bar_low, r.sigma_bar_high,
                 r.map_residual) for r in results])
    writer.json("ellipse.json",
                {"rows": [dataclasses.asdict(r) for r in results]})
    return EXIT_OK


def _cmd_thetastar(cfg: dict, writer: _Writer, seed: int | None) -> int:
    from .ellipse import estimate_theta_star

    tol = _scalar(cfg, "theta_tolerance", float, 0.1)
    est = estimate_theta_star(tolerance=tol)
    writer.json("thetastar.json", {
        "bracket_lo": est.bracket_lo,
        "bracket_hi": est.bracket_hi,
        "width": est.bracket_hi - est.bracket_lo,
        "multivalued": est.multivalued,
        "transitions": [[r, k] for r, k in est.transitions],
    })
    return EXIT_OK


def _cmd_export(cfg: dict, writer: _Writer, seed: int | None) -> int:
    from .immersion import build_immersion, collect_diagnostics, export_surface

    params = _params_from(cfg)
    config = _optimizer_from(cfg, seed)
    res = minimize(params, config, _weight_from(cfg, _DESCENT_START))
    imm = build_immersion(res.spectrum)
    resolution = _scalar(cfg, "export_resolution", int, 96)
    obj_path = os.path.join(writer.out_dir, "immersion.obj")
    csv_path = os.path.join(writer.out_dir, "boundary.csv")
    export_surface(imm, resolution, obj_path, csv_path)
    writer.stamp_file(obj_path)
    writer.stamp_file(csv_path)
    diag = collect_diagnostics(imm, res.weight)
    writer.json("export.json", {
        "optimize": _optimize_payload(res),
        "diagnostics": dataclasses.asdict(diag),
        "ellipsoid_p": imm.ellipsoid_p,
        "gauge": imm.gauge_angle,
    })
    return EXIT_OK


# ---------------------------------------------------------------- selftest

def _selftest_checks(solver_N: int, seed: int):
    """(name, kind, thunk) triples; each thunk raises AssertionError on fail."""

    def flat_ladder():
        spec = solve_spectrum(BoundaryWeight.from_density(
            TrigSeries.from_cos([1.0])), N=solver_N, k_max=6)
        ladder = np.array([0., 1., 1., 2., 2., 3., 3.])
        assert np.max(np.abs(spec.sigmas - ladder)) <= 1e-10, \
            f"sigma ladder off by {np.max(np.abs(spec.sigmas - ladder)):.3e}"
        for k in (1, 2):
            assert abs(spec.normalized[k] - TWO_PI) <= 1e-9, \
                f"sigma_bar_{k} = {spec.normalized[k]!r}"

    def scale_invariance():
        rng = np.random.default_rng(seed)
        for _ in range(3):
            v = np.zeros(7)
            v[0] = rng.uniform(-0.5, 0.5)
            v[2:7:2] = rng.uniform(-0.3, 0.3, 3)
            base = BoundaryWeight.from_log(TrigSeries.from_cos(v))
            c = float(rng.uniform(0.1, 10.0))
            v2 = v.copy()
            v2[0] += math.log(c)
            scaled = BoundaryWeight.from_log(TrigSeries.from_cos(v2))
            s0 = solve_spectrum(base, N=solver_N, k_max=4)
            s1 = solve_spectrum(scaled, N=solver_N, k_max=4)
            drift = np.max(np.abs(s0.normalized - s1.normalized))
            assert drift <= 1e-10, f"scale drift {drift:.3e}"

    def spectral_bounds():
        rng = np.random.default_rng(seed + 1)
        for _ in range(10):
            v = np.zeros(9)
            v[0] = rng.uniform(-0.5, 0.5)
            v[2:9:2] = rng.uniform(-0.4, 0.4, 4)
            w = BoundaryWeight.from_log(TrigSeries.from_cos(v))
            nb = solve_spectrum(w, N=solver_N, k_max=3).normalized
            assert nb[1] <= TWO_PI + 1e-6, f"sigma_bar_1 = {nb[1]!r}"
            assert nb[2] < 2.0 * TWO_PI, f"sigma_bar_2 = {nb[2]!r}"
            hps = 1.0 / nb[1] + 1.0 / nb[2]
            assert hps >= 1.0 / math.pi - 1e-8, f"1/sb1 + 1/sb2 = {hps!r}"

    def eigensolver_oracle():
        import scipy.linalg as sla
        from .eigen import gen_eigh

        rng = np.random.default_rng(seed + 2)
        for _ in range(10):
            n = int(rng.integers(2, 7))
            X = rng.standard_normal((n, n))
            A = X @ X.T + n * np.eye(n)
            Y = rng.standard_normal((n, n))
            B = Y @ Y.T + n * np.eye(n)
            vals, _ = gen_eigh(A, B)
            ref = sla.eigh(A, B, eigvals_only=True)
            drift = np.max(np.abs(np.sort(vals) - np.sort(ref)))
            assert drift <= 1e-10, f"eigensolver drift {drift:.3e}"

    def subgradient_fd():
        P = 1 << 12
        th = TWO_PI * np.arange(P) / P
        v0 = np.log(1.0 + 0.3 * np.cos(2.0 * th))
        params = FunctionalParams(1.0, 2.0)
        w = BoundaryWeight.from_log(from_grid_values(v0, 16))
        spec = solve_spectrum(w, N=solver_N, k_max=4)
        psi = subgradient(w, spec, params)
        psi_vals = values_on_grid(psi.direction, P)
        w_vals = values_on_grid(w.density, P)
        h = 1e-5
        dv = np.cos(2.0 * th) - 0.5 * np.cos(4.0 * th)
        def at(v):
            return evaluate_E(BoundaryWeight.from_log(from_grid_values(v, 16)),
                              params, N=solver_N)[0]
        fd = (at(v0 + h * dv) - at(v0 - h * dv)) / (2.0 * h)
        analytic = float(np.mean(psi_vals * dv * w_vals) * TWO_PI)
        rel = abs(fd - analytic) / max(abs(analytic), 1e-30)
        assert rel <= 1e-4, f"fd mismatch rel {rel:.3e}"

    def two_bubble_family():
        from .two_bubble import (family_sigmas, omega_eps_weight,
                                 rayleigh_upper_bounds)

        point = omega_eps_weight(0.1)
        length = point.weight.length
        assert abs(length - 2.0 * TWO_PI) <= 1e-9, f"length = {length!r}"
        rq1, rq2 = rayleigh_upper_bounds(0.1)
        s1, s2 = family_sigmas(0.1)
        assert s1 <= rq1 * (1.0 + 1e-10), f"sigma_1 = {s1!r} > RQ {rq1!r}"
        assert s2 <= rq2 * (1.0 + 1e-10), f"sigma_2 = {s2!r} > RQ {rq2!r}"

    def ellipse_exact():
        from .ellipse import conformal_map, pullback_weight

        p = 0.5
        w = pullback_weight(conformal_map(p))
        spec = solve_spectrum_blocks(w, N=2 * solver_N, k_max=8, check=False)
        for target in (p, 1.0, 4.0 * p / (1.0 + p), 1.0 + p):
            d = float(np.min(np.abs(spec.sigmas - target)))
            assert d <= 1e-5 * target, f"eigenvalue {target}: off {d:.3e}"

    def flat_immersion():
        from .immersion import build_immersion, embedding_diagnostics

        spec = solve_spectrum_blocks(BoundaryWeight.from_density(
            TrigSeries.from_cos([1.0])), N=solver_N, k_max=6)
        imm = build_immersion(spec)
        winding, jac_min, _ = embedding_diagnostics(imm, resolution=96)
        assert winding == 1, f"winding = {winding}"
        assert jac_min > 0.0, f"jacobian min = {jac_min!r}"

    return [
        ("flat_ladder", "resolution", flat_ladder),
        ("scale_invariance", "invariant", scale_invariance),
        ("spectral_bounds", "invariant", spectral_bounds),
        ("eigensolver_oracle", "invariant", eigensolver_oracle),
        ("subgradient_fd", "invariant", subgradient_fd),
        ("two_bubble_family", "invariant", two_bubble_family),
        ("ellipse_exact", "resolution", ellipse_exact),
        ("flat_immersion", "invariant", flat_immersion),
    ]


def _cmd_selftest(cfg: dict, writer: _Writer, seed: int | None) -> int:
    solver_N = _scalar(cfg, "solver_N", int, 64)
    lines = []
    failures = []
    for name, kind, thunk in _selftest_checks(solver_N,
                                              seed if seed is not None
                                              else 20260817):
        try:
            thunk()
        except AssertionError as exc:
            failures.append(kind)
            lines.append(f"FAIL {name} kind={kind} detail={exc}")
        except (ResolutionError, InputDomainError) as exc:
            # a check raising InputDomainError means the forced resolution
            # cannot support what the check asks of the solver
            failures.append("resolution")
            lines.append(f"FAIL {name} kind=resolution detail={exc}")
        except SteklovLabError as exc:
            kind2 = ("config" if isinstance(exc, (ConfigError,
                                                  PositivityError,
                                                  SymmetryError))
                     else "invariant")
            failures.append(kind2)
            lines.append(f"FAIL {name} kind={kind2} "
                         f"detail={type(exc).__name__}: {exc}")
        else:
            lines.append(f"PASS {name}")
    n = len(lines)
    lines.append(f"SELFTEST {n - len(failures)}/{n} checks passed")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    writer.json("selftest.json", {"report": lines,
                                  "passed": n - len(failures), "total": n})
    if not failures:
        return EXIT_OK
    if "resolution" in failures:
        return EXIT_RESOLUTION
    if "invariant" in failures:
        return EXIT_INVARIANT
    return EXIT_CONFIG


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "testfamily": _cmd_testfamily,
    "ellipse": _cmd_ellipse,
    "thetastar": _cmd_thetastar,
    "export": _cmd_export,
    "selftest": _cmd_selftest,
}


# --------------------------------------------------------------- dispatch

def _error_record(exc: Exception, code: int):
    record = {"error": type(exc).__name__, "exit_code": code,
              "message": str(exc)}
    sys.stderr.write(json.dumps(record) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="steklov-lab",
        description="batch experiments for weighted Steklov problems "
                    "on the disk")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None,
                        help="JSON run configuration")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="BLAS thread cap (or env STEKLOV_LAB_THREADS)")
    parser.add_argument("--seed", type=int, default=None,
                        help="overrides the optimizer / selftest seed")
    args = parser.parse_args(argv)
    if args.seed is not None and not (0 <= args.seed < 1 << 64):
        _error_record(ConfigError("seed must fit in u64"), EXIT_CONFIG)
        return EXIT_CONFIG
    try:
        cfg = _load_config(args.config)
        seed = args.seed if args.seed is not None \
            else _scalar(cfg, "seed", int)
        writer = _Writer(args.out, _config_hash(_resolved(args.command, cfg,
                                                          seed)))
        return _COMMANDS[args.command](cfg, writer, seed)
    except (ConfigError, InputDomainError, PositivityError,
            SymmetryError) as exc:
        _error_record(exc, EXIT_CONFIG)
        return EXIT_CONFIG
    except ResolutionError as exc:
        _error_record(exc, EXIT_RESOLUTION)
        return EXIT_RESOLUTION
    except (InvariantViolation, SpectrumError, DependencyError,
            InfeasibleError, SteklovLabError) as exc:
        _error_record(exc, EXIT_INVARIANT)
        return EXIT_INVARIANT
    except OSError as exc:
        _error_record(exc, EXIT_IO)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
