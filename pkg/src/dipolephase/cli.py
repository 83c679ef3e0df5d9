"""Config-driven command line front end.

Usage::

    dipolephase [EXPERIMENT] [--config cfg.json] [--out DIR] [--seed N] [--tolerance TOL]

``EXPERIMENT`` (one of ``phase``, ``verify``, ``potential``,
``diagnose-factorization``, ``sweep``) overrides the ``experiment`` key of the
config file. Every run writes ``result.json``; sweeps and profiles also write
``table.csv``. Wall-clock data goes to ``metadata.json`` so that
``result.json`` is byte-identical across repeated runs.

Exit status: 0 on success, 1 on configuration errors, 2 when a verification
exceeds its tolerance.
"""

import argparse
import copy
import csv
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .coupling import (
    closed_form_potential,
    effective_inverse_square,
    random_reduction_sweep,
)
from .factorization import (
    PolarGrid,
    apply_full_operator,
    azimuthal_mode,
    convergence_sweep,
    exact_operator,
    factorization_residual,
    random_manufactured,
)
from .fields import DipoleParams, Uniform, Wei, lambda_from_volume_charge
from .holonomy import (
    SCALAR_AB_NOTE,
    LoopPath,
    TimeLeg,
    analytic_phase,
    compute_phase,
)
from .spinor import (
    anticommutator,
    build_gamma_basis,
    clifford_sign,
    maxabs,
    sigma_tensor,
)

EXPERIMENTS = ("phase", "verify", "potential", "diagnose-factorization", "sweep")

CONVENTIONS = {
    "metric": "diag(-1,+1,+1,+1)",
    "levi_civita": "eps_123=+1, right-handed axes",
    "clifford": "{gamma^mu,gamma^nu} = -2 eta^{mu nu} I",
    "contraction": "(1/4) eta^{ab} K_{mu a} F_{b nu} gamma^mu gamma^nu",
    "hamiltonian": "covariant equation times gamma^0: +beta C, -beta (mu/2) Sigma^{bn} F_{bn}",
    "path_ordering": "later segments multiply on the left",
    "scalar_ab_term": "mu B0 tau beta Sigma^3",
    "operator_frame": "alpha^1, alpha^2 along r_hat, phi_hat",
}

DEFAULT_TOLERANCE = {
    "phase": 1e-9,
    "verify": 1e-12,
    "potential": 1e-12,
    "diagnose-factorization": 1e-12,
    "sweep": 1e-9,
}

SCHEMA = {
    "experiment": None,
    "fields": {"variant": None, "lambda": None, "b0": None, "rho": None, "r0": None, "e": None, "b": None},
    "params": {"m": None, "alpha_pol": None, "chi": None, "mu": None},
    "loop": {"radius": None, "segments": None, "orientation": None},
    "time_leg": {"tau": None},
    "grid": {"r_min": None, "r_max": None, "nr": None, "nphi": None},
    "verify": {"draws": None},
    "sweep": {"axis": None, "values": None},
    "diagnose": {"levels": None},
    "seed": None,
    "out": None,
    "tolerance": None,
}

DEFAULTS = {
    "fields": {"variant": "wei", "lambda": 1.0, "b0": 1.0},
    "params": {"m": 1.0, "alpha_pol": 1.0, "chi": 0.0, "mu": 0.0},
    "loop": {"radius": 1.0, "segments": 1000, "orientation": 1},
    "time_leg": {"tau": 0.0},
    "grid": {"r_min": 0.5, "r_max": 3.0, "nr": 21, "nphi": 32},
    "verify": {"draws": 100},
    "diagnose": {"levels": 4},
}


class ConfigError(ValueError):
    pass


def _check_keys(doc, schema, path):
    if not isinstance(doc, dict):
        raise ConfigError(f"{path or '<root>'}: expected an object")
    for key, value in doc.items():
        where = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(f"{where}: unknown key")
        if isinstance(schema[key], dict):
            _check_keys(value, schema[key], where)


def _number(value, path, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{path}: expected an integer")
        return int(value)
    return float(value)


def _vector(value, path):
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(f"{path}: expected a list of three numbers")
    return [_number(x, f"{path}[{i}]") for i, x in enumerate(value)]


def resolve_config(doc, experiment=None, seed=None, tolerance=None):
    """Validate a raw config document and fill in defaults.

    Raises :class:`ConfigError` naming the offending field path.
    """
    doc = copy.deepcopy(doc or {})
    _check_keys(doc, SCHEMA, "")
    if experiment is not None:
        doc["experiment"] = experiment
    if doc.get("experiment") not in EXPERIMENTS:
        raise ConfigError(f"experiment: must be one of {', '.join(EXPERIMENTS)}, got {doc.get('experiment')!r}")
    if seed is not None:
        doc["seed"] = seed
    if tolerance is not None:
        doc["tolerance"] = tolerance

    cfg = {"experiment": doc["experiment"]}
    for section in ("params", "loop", "time_leg", "grid", "verify", "diagnose"):
        merged = dict(DEFAULTS[section])
        merged.update(doc.get(section, {}))
        cfg[section] = merged

    fields = doc.get("fields", dict(DEFAULTS["fields"]))
    variant = fields.get("variant", "wei")
    if variant == "wei":
        if "lambda" in fields:
            lam = _number(fields["lambda"], "fields.lambda")
        elif "rho" in fields and "r0" in fields:
            r0 = _number(fields["r0"], "fields.r0")
            if r0 < 0:
                raise ConfigError("fields.r0: must be non-negative")
            lam = lambda_from_volume_charge(_number(fields["rho"], "fields.rho"), r0)
        else:
            raise ConfigError("fields.lambda: required for the wei variant (or give fields.rho and fields.r0)")
        if "b0" not in fields:
            raise ConfigError("fields.b0: required for the wei variant")
        b0 = _number(fields["b0"], "fields.b0")
        if b0 < 0:
            raise ConfigError("fields.b0: must be non-negative")
        cfg["fields"] = {"variant": "wei", "lambda": lam, "b0": b0}
    elif variant == "uniform":
        cfg["fields"] = {
            "variant": "uniform",
            "e": _vector(fields.get("e", [0.0, 0.0, 0.0]), "fields.e"),
            "b": _vector(fields.get("b", [0.0, 0.0, 0.0]), "fields.b"),
        }
    else:
        raise ConfigError(f"fields.variant: must be 'wei' or 'uniform', got {variant!r}")

    p = cfg["params"]
    for key in ("m", "alpha_pol", "chi", "mu"):
        p[key] = _number(p[key], f"params.{key}")
    if p["m"] < 0:
        raise ConfigError("params.m: must be non-negative")

    lp = cfg["loop"]
    lp["radius"] = _number(lp["radius"], "loop.radius")
    lp["segments"] = _number(lp["segments"], "loop.segments", integer=True)
    lp["orientation"] = _number(lp["orientation"], "loop.orientation", integer=True)
    if lp["radius"] <= 0:
        raise ConfigError("loop.radius: must be positive")
    if lp["segments"] < 1:
        raise ConfigError("loop.segments: must be at least 1")
    if lp["orientation"] not in (1, -1):
        raise ConfigError("loop.orientation: must be +1 or -1")

    cfg["time_leg"]["tau"] = _number(cfg["time_leg"]["tau"], "time_leg.tau")
    if cfg["time_leg"]["tau"] < 0:
        raise ConfigError("time_leg.tau: must be non-negative")

    g = cfg["grid"]
    g["r_min"] = _number(g["r_min"], "grid.r_min")
    g["r_max"] = _number(g["r_max"], "grid.r_max")
    g["nr"] = _number(g["nr"], "grid.nr", integer=True)
    g["nphi"] = _number(g["nphi"], "grid.nphi", integer=True)
    if g["r_min"] <= 0:
        raise ConfigError("grid.r_min: must be positive")
    if g["r_max"] <= g["r_min"]:
        raise ConfigError("grid.r_max: must exceed grid.r_min")

    cfg["verify"]["draws"] = _number(cfg["verify"]["draws"], "verify.draws", integer=True)
    cfg["diagnose"]["levels"] = _number(cfg["diagnose"]["levels"], "diagnose.levels", integer=True)

    if "seed" in doc and doc["seed"] is not None:
        cfg["seed"] = _number(doc["seed"], "seed", integer=True)
        if cfg["seed"] < 0:
            raise ConfigError("seed: must be non-negative")
    elif cfg["experiment"] == "verify":
        raise ConfigError("seed: required for randomized verification runs")
    else:
        cfg["seed"] = None

    tol = doc.get("tolerance", DEFAULT_TOLERANCE[cfg["experiment"]])
    cfg["tolerance"] = _number(tol, "tolerance")
    if cfg["tolerance"] <= 0:
        raise ConfigError("tolerance: must be positive")

    if cfg["experiment"] == "sweep":
        sweep = doc.get("sweep")
        if not sweep or "axis" not in sweep:
            raise ConfigError("sweep.axis: required for sweep runs")
        if sweep["axis"] not in ("segments", "radius", "grid"):
            raise ConfigError("sweep.axis: must be 'segments', 'radius' or 'grid'")
        values = sweep.get("values")
        if not isinstance(values, list) or len(values) < 3:
            raise ConfigError("sweep.values: need at least 3 points")
        integer = sweep["axis"] in ("segments", "grid")
        values = [_number(v, f"sweep.values[{i}]", integer=integer) for i, v in enumerate(values)]
        if any(v <= 0 for v in values):
            raise ConfigError("sweep.values: must be positive")
        cfg["sweep"] = {"axis": sweep["axis"], "values": values}

    if cfg["fields"]["variant"] != "wei" and cfg["experiment"] in ("potential", "diagnose-factorization"):
        raise ConfigError(f"fields.variant: {cfg['experiment']} runs need the wei variant")
    if cfg["experiment"] == "sweep" and cfg["fields"]["variant"] != "wei":
        raise ConfigError("fields.variant: sweeps compare against closed forms and need the wei variant")

    cfg["out"] = doc.get("out")
    return cfg


def conventions_hash():
    blob = json.dumps(CONVENTIONS, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _field_config(cfg):
    f = cfg["fields"]
    if f["variant"] == "wei":
        return Wei(f["lambda"], f["b0"])
    return Uniform(tuple(f["e"]), tuple(f["b"]))


def _params(cfg):
    return DipoleParams(**cfg["params"])


def _grid(cfg):
    g = cfg["grid"]
    return PolarGrid(g["r_min"], g["r_max"], g["nr"], g["nphi"])


def _path(cfg, **overrides):
    lp = dict(cfg["loop"])
    lp.update(overrides)
    return LoopPath(radius=lp["radius"], segments=lp["segments"], orientation=lp["orientation"])


def _matrix(m):
    m = np.asarray(m)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _scalar(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return float(x)


def _phase_payload(result):
    names = ("c_identity", "c_beta", "c_sigma3", "c_betasigma3", "remainder_norm")
    return {
        "coefficients": {n: _scalar(c) for n, c in zip(names, result.coefficients)},
        "eigenphases": [float(x) for x in result.eigenphases],
        "ordering_discrepancy": result.ordering_discrepancy,
        "commutator_bound": result.commutator_bound,
        "phi": _matrix(result.phi),
        "holonomy": _matrix(result.holonomy),
        "notes": list(result.notes),
    }


def run_phase(cfg):
    basis = build_gamma_basis()
    config = _field_config(cfg)
    params = _params(cfg)
    leg = TimeLeg(cfg["time_leg"]["tau"])
    result = compute_phase(_path(cfg), config, params, leg, basis)
    outputs = {"numeric": _phase_payload(result)}
    passed = True
    if isinstance(config, Wei):
        reference = analytic_phase(config, params, leg, basis)
        phase_dev = maxabs(result.phi - reference.phi)
        holonomy_dev = maxabs(result.holonomy - reference.holonomy)
        outputs["analytic"] = _phase_payload(reference)
        outputs["phase_deviation"] = phase_dev
        outputs["holonomy_deviation"] = holonomy_dev
        passed = phase_dev < cfg["tolerance"] and holonomy_dev < max(cfg["tolerance"], 1e-8)
    if params.mu and leg.tau:
        outputs["scalar_ab_note"] = SCALAR_AB_NOTE
    return outputs, passed, None


def run_verify(cfg):
    basis = build_gamma_basis()
    induced, dipole = random_reduction_sweep(cfg["verify"]["draws"], cfg["seed"], basis)
    sign = clifford_sign(basis)
    eta = np.diag(basis.metric)
    clifford = max(
        maxabs(anticommutator(basis.gamma[m], basis.gamma[n]) - 2 * sign * eta[m, n] * np.eye(4))
        for m in range(4)
        for n in range(4)
    )
    spin_tensor = max(
        maxabs(sigma_tensor(basis, 0, 1) - 1j * basis.alpha[0]),
        maxabs(sigma_tensor(basis, 1, 2) - basis.sigma[2]),
    )
    tol = cfg["tolerance"]
    outputs = {
        "draws": cfg["verify"]["draws"],
        "max_induced_reduction_deviation": induced,
        "max_dipole_reduction_deviation": dipole,
        "clifford_sign": sign,
        "max_clifford_deviation": clifford,
        "max_spin_tensor_deviation": spin_tensor,
    }
    passed = induced < tol and dipole < tol and clifford < tol and spin_tensor < tol
    return outputs, passed, None


def run_potential(cfg):
    basis = build_gamma_basis()
    config = _field_config(cfg)
    params = _params(cfg)
    g = cfg["grid"]
    radii = np.linspace(g["r_min"], g["r_max"], g["nr"])
    rows = []
    for r in radii:
        v = effective_inverse_square(params, config, float(r))
        e = np.array([config.lam / r, 0.0, 0.0])
        b = np.array([0.0, 0.0, config.b0])
        pot = closed_form_potential(e, b, params, basis).value
        # (beta alpha^2)^2 = -I, so the projection carries a minus sign
        cross = float(-np.trace(pot @ (basis.beta @ basis.alpha[1])).real / 4.0)
        rows.append([float(r), v, cross])
    v_min = effective_inverse_square(params, config, float(radii[0]))
    v_double = effective_inverse_square(params, config, 2.0 * float(radii[0]))
    scaling = v_double / v_min if v_min else None
    outputs = {
        "r_min": float(radii[0]),
        "potential_at_r_min": rows[0][1],
        "scaling_ratio_2r_over_r": scaling,
        "attractive": all(row[1] < 0 for row in rows),
    }
    table = (["r", "inverse_square_coefficient", "beta_alpha2_coefficient"], rows)
    return outputs, True, table


def run_diagnose(cfg):
    basis = build_gamma_basis()
    config = _field_config(cfg)
    params = _params(cfg)
    grid = _grid(cfg)
    if cfg["seed"] is None:
        psi0 = azimuthal_mode(np.ones_like, np.zeros_like, 0, [1, 0, 0, 0])
        source = "constant spinor (1,0,0,0)"
    else:
        psi0 = random_manufactured(np.random.default_rng(cfg["seed"]))
        source = f"random manufactured field, seed {cfg['seed']}"
    report = factorization_residual(psi0, grid, config, params, basis)

    levels = cfg["diagnose"]["levels"]
    h_full, err_full, slope_full = convergence_sweep(psi0, grid, config, params, levels, False, basis)
    _, err_red, slope_red = convergence_sweep(psi0, grid, config, params, levels, True, basis)
    rows = [[h, a, b] for h, a, b in zip(h_full, err_full, err_red)]
    outputs = {
        "psi0": source,
        "term_norms": report.norms,
        "total_residual": report.total,
        "cross_term_residual": report.norms["cross_term"],
        "convergence": {"full_slope": slope_full, "reduced_slope": slope_red},
    }
    passed = report.norms["cross_term"] < cfg["tolerance"]
    if levels >= 3 and np.max(err_full) > 1e-13:
        passed = passed and abs(slope_full - 4.0) <= 0.2 and abs(slope_red - 4.0) <= 0.2
    table = (["dr", "full_operator_error", "reduced_operator_error"], rows)
    return outputs, passed, table


def run_sweep(cfg):
    basis = build_gamma_basis()
    config = _field_config(cfg)
    params = _params(cfg)
    leg = TimeLeg(cfg["time_leg"]["tau"])
    axis = cfg["sweep"]["axis"]
    values = cfg["sweep"]["values"]
    rows = []
    if axis in ("segments", "radius"):
        reference = analytic_phase(config, params, leg, basis)
        for v in values:
            start = time.perf_counter()
            result = compute_phase(_path(cfg, **{axis: v}), config, params, leg, basis)
            elapsed = time.perf_counter() - start
            rows.append([v, maxabs(result.phi - reference.phi), elapsed])
        worst = max(row[1] for row in rows)
        outputs = {"axis": axis, "max_deviation": worst, "deviations": [row[1] for row in rows]}
        passed = worst < cfg["tolerance"]
    else:
        base = _grid(cfg)
        psi0 = random_manufactured(np.random.default_rng(cfg["seed"] or 0))
        errors, spacings = [], []
        for k in values:
            grid = PolarGrid(base.r_min, base.r_max, (base.nr - 1) * k + 1, base.nphi * k)
            start = time.perf_counter()
            discrete = apply_full_operator(psi0.sample(grid), config, params, basis)
            exact = exact_operator(psi0, grid, config, params, basis)
            err = maxabs(discrete.values - exact.values)
            elapsed = time.perf_counter() - start
            rows.append([grid.dr, err, elapsed])
            errors.append(err)
            spacings.append(grid.dr)
        slope = float(np.polyfit(np.log(spacings), np.log(errors), 1)[0])
        outputs = {"axis": axis, "slope": slope, "errors": errors}
        passed = abs(slope - 4.0) <= 0.2
    table = (["value", "deviation", "runtime_s"], rows)
    return outputs, passed, table


RUNNERS = {
    "phase": run_phase,
    "verify": run_verify,
    "potential": run_potential,
    "diagnose-factorization": run_diagnose,
    "sweep": run_sweep,
}


def run(cfg):
    """Execute a resolved config. Returns ``(record, passed, table)``."""
    outputs, passed, table = RUNNERS[cfg["experiment"]](cfg)
    record = {
        "tool": "dipolephase",
        "version": __version__,
        "conventions": CONVENTIONS,
        "conventions_hash": conventions_hash(),
        "config": cfg,
        "tolerance": cfg["tolerance"],
        "passed": bool(passed),
        "outputs": outputs,
    }
    return record, passed, table


def dumps(record):
    return json.dumps(record, indent=2, sort_keys=True) + "\n"


def write_outputs(out_dir, record, table, metadata):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "result.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps(record))
    with open(os.path.join(out_dir, "metadata.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(metadata, indent=2, sort_keys=True) + "\n")
    if table is not None:
        header, rows = table
        with open(os.path.join(out_dir, "table.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(x)) for x in row])


def build_parser():
    parser = argparse.ArgumentParser(prog="dipolephase", description=__doc__.split("\n\n")[0])
    parser.add_argument("experiment", nargs="?", choices=EXPERIMENTS, help="overrides the config's experiment")
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="output directory (default: config 'out' or ./dipolephase-out)")
    parser.add_argument("--seed", type=int, help="RNG seed, overrides the config")
    parser.add_argument("--tolerance", type=float, help="verification gate, overrides the default")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        doc = {}
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        cfg = resolve_config(doc, args.experiment, args.seed, args.tolerance)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    started = time.time()
    try:
        record, passed, table = run(cfg)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    out_dir = args.out or cfg["out"] or "dipolephase-out"
    metadata = {"started_unix": started, "elapsed_s": time.time() - started}
    write_outputs(out_dir, record, table, metadata)
    status = "ok" if passed else "FAILED tolerance"
    print(f"{cfg['experiment']}: {status} -> {os.path.join(out_dir, 'result.json')}")
    return 0 if passed else 2
