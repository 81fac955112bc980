"""Command-line front end.

Subcommands::

    twomode coincidence-scan   coincidence vs z by four methods (CSV)
    twomode sweep-gamma        coincidence over a gamma_a/g x z grid (CSV)
    twomode eigen-report       analytic eigenvalues and residuals (CSV)
    twomode validate           run every identity check (text, JSON via --output)

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import effective as eff
from .analytic import coincidence_closed_form, coincidence_from_density
from .config import KEYS, ExperimentConfig, build_config, parse_config_text
from .errors import ConfigurationError
from .fock import FockSpace, basis_state, dump_matrix
from .oracle import RNG_ALGORITHM, integrate_lindblad_grid, mc_trajectories_grid
from .params import ModelParams, Phase
from .propagator import PropagationPlan
from .validation import run_validation

__all__ = [
    "cmd_coincidence_scan",
    "cmd_eigen_report",
    "cmd_sweep_gamma",
    "cmd_validate",
    "default_gamma_ratios",
    "main",
]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _fmt(x: float) -> str:
    return f"{x + 0.0:.17g}"  # + 0.0 folds -0.0 into 0


def _csv(header: list[str], rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    return out.getvalue()


def _params(cfg: ExperimentConfig) -> ModelParams:
    return ModelParams(cfg.g, cfg.gamma_a, cfg.gamma_b)


def _z_grid(cfg: ExperimentConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.z_max, cfg.z_points)


def cmd_coincidence_scan(cfg: ExperimentConfig, with_mc: bool = False) -> str:
    """CSV of the |1,1> coincidence rate from closed form, exact matrices and RK4.

    ``with_mc`` appends the trajectory estimate and its standard error.
    """
    params = _params(cfg)
    space = FockSpace(cfg.n_max)
    zs = _z_grid(cfg)
    psi0 = basis_state(1, 1, space)
    rho0 = np.outer(psi0, psi0.conj())
    exact = PropagationPlan(params, space, zs).run(rho0)
    rk4 = integrate_lindblad_grid(rho0, params, space, zs)
    header = ["z", "coincidence_closed_form", "coincidence_exact_matrix", "coincidence_rk4"]
    columns = [
        [float(z) for z in zs],
        [coincidence_closed_form(params, float(z)) for z in zs],
        [coincidence_from_density(x) for x in exact],
        [coincidence_from_density(x) for x in rk4],
    ]
    if with_mc:
        stats = mc_trajectories_grid(psi0, params, space, zs, rho0, cfg.n_traj, cfg.seed)
        header += ["coincidence_mc", "mc_std_error"]
        columns += [[s.mean for s in stats], [s.std_error for s in stats]]
    return _csv(header, zip(*columns))


def default_gamma_ratios() -> list[float]:
    """``gamma_a / g`` from 0 to 2.5 in steps of 0.05."""
    return [round(0.05 * i, 12) for i in range(51)]


def cmd_sweep_gamma(cfg: ExperimentConfig, gamma_ratios=None) -> str:
    """Long-format CSV ``gamma_a_over_g, z, coincidence`` (closed form)."""
    ratios = default_gamma_ratios() if gamma_ratios is None else [float(r) for r in gamma_ratios]
    zs = _z_grid(cfg)
    rows = []
    for ratio in ratios:
        params = ModelParams(cfg.g, ratio * cfg.g, cfg.gamma_b)
        rows.extend((ratio, float(z), coincidence_closed_form(params, float(z))) for z in zs)
    return _csv(["gamma_a_over_g", "z", "coincidence"], rows)


def cmd_eigen_report(cfg: ExperimentConfig) -> str:
    """Eigenvalues ``lambda_jk`` for ``j + k <= n_max`` with residuals.

    At the exceptional point the residual column is replaced by the Jordan
    block order of the ``(j + k)``-photon sector.
    """
    params = _params(cfg)
    space = FockSpace(cfg.n_max)
    pairs = [(j, k) for j in range(cfg.n_max + 1) for k in range(cfg.n_max + 1 - j)]
    at_ep = params.regime.tag is Phase.AT_EP
    rows = []
    if at_ep:
        orders = {n: eff.jordan_block_order(params, space, n) for n in range(cfg.n_max + 1)}
        for j, k in pairs:
            lam = eff.eigenvalue(j, k, params)
            rows.append((j, k, lam.real, lam.imag, orders[j + k]))
        return _csv(["j", "k", "re_lambda", "im_lambda", "jordan_block_order"], rows)
    h = eff.h_eff(params, space)
    r = eff.r_transform(eff.eta(params), space)
    for j, k in pairs:
        lam = eff.eigenvalue(j, k, params)
        v = r[:, space.index(j, k)]
        rows.append((j, k, lam.real, lam.imag, float(np.linalg.norm(h @ v - lam * v))))
    return _csv(["j", "k", "re_lambda", "im_lambda", "residual_norm"], rows)


def cmd_validate(cfg: ExperimentConfig, tolerance_scale: float = 1.0):
    return run_validation(cfg, tolerance_scale=tolerance_scale)


def _dump(cfg: ExperimentConfig, base: str) -> list[Path]:
    params = _params(cfg)
    space = FockSpace(cfg.n_max)
    plan = PropagationPlan(params, space)
    mats = {"h_eff": eff.h_eff(params, space), "u_zmax": plan.u(cfg.z_max)}
    if not plan.ep_fallback:
        mats["r_transform"] = eff.r_transform(eff.eta(params), space)
        mats["h_diag"] = eff.h_diag(params, space)
    paths = []
    for name, m in mats.items():
        path = Path(f"{base}.{name}.txt")
        path.write_text(dump_matrix(m), encoding="utf-8", newline="\n")
        paths.append(path)
    return paths


def _flag_names(key: str) -> list[str]:
    names = [f"--{key.replace('_', '-')}"]
    if "_" in key:
        names.append(f"--{key}")
    if key == "output_path":
        names.insert(0, "--output")
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'key = value' configuration file")
    for key in KEYS:
        common.add_argument(*_flag_names(key), dest=key, default=None, help=f"override '{key}'")
    common.add_argument("--dump", action="store_true", help="write debug matrix dumps next to the output")

    parser = argparse.ArgumentParser(prog="twomode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    scan = sub.add_parser("coincidence-scan", parents=[common], help="coincidence rate vs z")
    scan.add_argument("--with-mc", action="store_true", help="add Monte-Carlo trajectory columns")
    sweep = sub.add_parser("sweep-gamma", parents=[common], help="coincidence over gamma_a/g and z")
    sweep.add_argument(
        "--gamma-a-values",
        default=None,
        help="gamma_a/g values: comma list or start:stop:step (default 0:2.5:0.05)",
    )
    sub.add_parser("eigen-report", parents=[common], help="analytic eigenvalues and residuals")
    val = sub.add_parser("validate", parents=[common], help="run all identity checks")
    val.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def _parse_ratios(text: str | None):
    if text is None:
        return None
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(n)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigurationError(f"gamma-a-values: cannot parse {text!r}") from None


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict[str, str] = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"config: cannot read {args.config}: {exc.strerror}") from None
        raw.update(parse_config_text(text))
    for key in KEYS:
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    return build_config(raw)


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = load_config(args)
        if args.command == "coincidence-scan":
            _write(cmd_coincidence_scan(cfg, with_mc=args.with_mc), cfg.output_path)
            if args.with_mc:
                print(f"trajectories: n={cfg.n_traj} seed={cfg.seed} rng={RNG_ALGORITHM}", file=sys.stderr)
        elif args.command == "sweep-gamma":
            _write(cmd_sweep_gamma(cfg, _parse_ratios(args.gamma_a_values)), cfg.output_path)
        elif args.command == "eigen-report":
            _write(cmd_eigen_report(cfg), cfg.output_path)
        else:
            report = cmd_validate(cfg, args.tolerance_scale)
            sys.stdout.write(report.to_text())
            if cfg.output_path:
                _write(report.to_json(), cfg.output_path)
        if args.dump:
            for path in _dump(cfg, cfg.output_path or "twomode"):
                print(f"dumped {path}", file=sys.stderr)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "validate" and not report.passed:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
