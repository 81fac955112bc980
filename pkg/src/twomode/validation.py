"""Measured deviations for every identity the solver relies on.

Each ``*_defects`` helper returns ``{check name: measured deviation}``; the
report pairs them with tolerances.  The same helpers back the test suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import effective as eff
from .analytic import coincidence_closed_form, coincidence_from_density
from .config import ExperimentConfig
from .fock import FockSpace, basis_state, hermiticity_defect, min_eigenvalue, trace_deviation, trace_distance
from .oracle import IntegratorConfig, integrate_lindblad, integrate_lindblad_grid, mc_trajectories_grid
from .params import ModelParams, Phase
from .propagator import PropagationPlan
from .states import random_density, random_operator, standard_initial_states
from .superop import anticomm_super, exp_jump, interaction_super, jump_super, lindblad_rhs, total_jump, vn_rhs

__all__ = [
    "CheckResult",
    "ValidationReport",
    "algebra_defects",
    "ep_continuity_defects",
    "jump_removal_errors",
    "oracle_sweep",
    "run_validation",
    "spectral_defects",
    "trajectory_defects",
]


def _maxabs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def _restrict(m: np.ndarray, space: FockSpace) -> np.ndarray:
    keep = space.sector_mask(space.n_max)
    return m[np.ix_(keep, keep)]


def _comm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def algebra_defects(
    space: FockSpace,
    rng: np.random.Generator,
    n_random: int = 50,
    eta_value: complex | None = None,
) -> dict[str, float]:
    """Superoperator commutators, su(2) relations and the R-similarity identities.

    Superoperator identities use random matrices supported on states with at
    most ``n_max`` photons, where truncation is exact; operator identities are
    compared on the sub-cutoff block.
    """
    out = {"[J_a+J_b, S]": 0.0, "[J_a, L_a] - 2 J_a": 0.0, "[J_b, L_b] - 2 J_b": 0.0}
    for _ in range(n_random):
        rho = random_operator(space, rng)
        scale = max(_maxabs(rho), 1e-300)
        d = total_jump(interaction_super(rho)) - interaction_super(total_jump(rho))
        out["[J_a+J_b, S]"] = max(out["[J_a+J_b, S]"], _maxabs(d) / scale)
        for mode in ("a", "b"):
            d = (
                jump_super(mode, anticomm_super(mode, rho))
                - anticomm_super(mode, jump_super(mode, rho))
                - 2.0 * jump_super(mode, rho)
            )
            key = f"[J_{mode}, L_{mode}] - 2 J_{mode}"
            out[key] = max(out[key], _maxabs(d) / scale)

    ops = eff.schwinger_ops(space)
    jx, jy, jz, n = ops.Jx, ops.Jy, ops.Jz, ops.N
    out["[Jx, Jy] - i Jz"] = _maxabs(_restrict(_comm(jx, jy) - 1j * jz, space))
    out["[Jy, Jz] - i Jx"] = _maxabs(_restrict(_comm(jy, jz) - 1j * jx, space))
    out["[Jz, Jx] - i Jy"] = _maxabs(_restrict(_comm(jz, jx) - 1j * jy, space))
    out["[N, J]"] = max(_maxabs(_restrict(_comm(n, j), space)) for j in (jx, jy, jz))

    etas = [eta_value] if eta_value is not None else []
    for _ in range(n_random if eta_value is None else 0):
        etas.append(complex(rng.uniform(-1.5, 1.5), rng.uniform(-math.pi, math.pi)))
    sim_z = sim_x = 0.0
    for e in etas:
        r, r_inv = eff.r_transform(e, space), eff.r_inverse(e, space)
        ch, sh = np.cosh(e), np.sinh(e)
        sim_z = max(sim_z, _maxabs(_restrict(r_inv @ jz @ r - (ch * jz - 1j * sh * jx), space)))
        sim_x = max(sim_x, _maxabs(_restrict(r_inv @ jx @ r - (ch * jx + 1j * sh * jz), space)))
    out["R^-1 Jz R identity"] = sim_z
    out["R^-1 Jx R identity"] = sim_x
    return out


def spectral_defects(params: ModelParams, space: FockSpace, max_total: int = 4) -> dict[str, float]:
    """Relative residuals of the analytic eigensystem, or the EP Jordan test.

    Away from the EP: similarity ``R^-1 H R - H_diag`` and eigen-residuals
    relative to ``|H_eff|``, plus the bi-orthogonality defect.  At the EP:
    nilpotency of the one-photon block and a check that it is not zero.
    """
    h = eff.h_eff(params, space)
    hnorm = np.linalg.norm(h, 2)
    top = min(max_total, space.n_max)
    out = {"H_eff constructions agree": _maxabs(h - eff.h_eff_rewritten(params, space))}
    if params.regime.tag is Phase.AT_EP:
        block = eff.sector_block(h, 1, space) + 0.5j * params.gamma * np.eye(2)
        out["EP one-photon nilpotency"] = float(np.linalg.norm(block @ block, 2) / hnorm**2)
        # a non-zero nilpotent 2x2 block is a genuine Jordan block; <= 1 means non-zero
        out["EP block smallness"] = float(1e-6 * hnorm / max(np.linalg.norm(block, 2), 1e-300))
        return out
    e = eff.eta(params)
    r, r_inv = eff.r_transform(e, space), eff.r_inverse(e, space)
    out["eta balance"] = eff.eta_balance_residual(e, params) / params.max_rate
    out["similarity R^-1 H R - H_diag"] = _maxabs(_restrict(r_inv @ h @ r - eff.h_diag(params, space), space)) / hnorm
    pairs = [(j, n - j) for n in range(top + 1) for j in range(n + 1)]
    resid = left_resid = bio = 0.0
    for j, k in pairs:
        lam = eff.eigenvalue(j, k, params)
        i = space.index(j, k)
        right, left = r[:, i], r_inv[i, :]
        resid = max(resid, np.linalg.norm(h @ right - lam * right) / hnorm)
        left_resid = max(left_resid, np.linalg.norm(left @ h - lam * left) / hnorm)
        for l, m in pairs:
            want = 1.0 if (j, k) == (l, m) else 0.0
            bio = max(bio, abs(left @ r[:, space.index(l, m)] - want))
    out["right eigen-residual"] = float(resid)
    out["left eigen-residual"] = float(left_resid)
    out["bi-orthogonality"] = float(bio)
    return out


def oracle_sweep(
    params: ModelParams,
    space: FockSpace,
    states: dict[str, np.ndarray],
    z_grid,
    rk4: IntegratorConfig = IntegratorConfig(),
) -> dict[str, float]:
    """Exact pipeline against RK4 and the physicality of the exact output."""
    plan = PropagationPlan(params, space, z_grid)
    dist = trace_dev = herm = 0.0
    min_eig = math.inf
    coinc = 0.0
    for rho0 in states.values():
        exact = plan.run(rho0)
        ref = integrate_lindblad_grid(rho0, params, space, plan.z_grid, rk4)
        for z, x, y in zip(plan.z_grid, exact, ref):
            dist = max(dist, trace_distance(x, y))
            trace_dev = max(trace_dev, trace_deviation(x))
            herm = max(herm, hermiticity_defect(x))
            min_eig = min(min_eig, min_eigenvalue(x))
    rho11 = np.outer(basis_state(1, 1, space), basis_state(1, 1, space))
    for z, x in zip(plan.z_grid, plan.run(rho11)):
        coinc = max(coinc, abs(coincidence_from_density(x) - coincidence_closed_form(params, float(z))))
    return {
        "exact vs RK4 trace distance": dist,
        "trace deviation": trace_dev,
        "hermiticity defect": herm,
        "negative eigenvalue": max(0.0, -min_eig),
        "closed form vs matrix coincidence": coinc,
    }


def jump_removal_errors(
    params: ModelParams,
    rho: np.ndarray,
    dz0: float | None = None,
    halvings: int = 3,
) -> tuple[float, list[float]]:
    """Differential equivalence of the Lindblad and jump-free generators.

    Returns the generator-level defect
    ``|exp_jump(-1, varrho + dz vn(varrho)) - (rho + dz L rho)|`` (exact in
    exact arithmetic) and, for ``dz0, dz0/2, ...``, the distance of the
    transformed Euler step from the true Lindblad flow ``rho(dz)``, which must
    shrink like ``dz^2``.
    """
    space = FockSpace(math.isqrt(rho.shape[0]) - 1)
    h = eff.h_eff(params, space)
    varrho = exp_jump(1, rho)
    dz0 = 0.05 / params.max_rate if dz0 is None else dz0
    scale = max(_maxabs(rho), 1e-300)
    ident = 0.0
    errors = []
    for i in range(halvings + 1):
        dz = dz0 / 2**i
        step = exp_jump(-1, varrho + dz * vn_rhs(h, varrho))
        ident = max(ident, _maxabs(step - (rho + dz * lindblad_rhs(params, rho))) / scale)
        flow = integrate_lindblad(rho, params, space, dz, IntegratorConfig(step=dz / 64))
        errors.append(float(np.linalg.norm(step - flow)))
    return ident, errors


def ep_continuity_defects(g: float, space: FockSpace, z_grid, rel: float = 1e-6) -> dict[str, float]:
    """Coincidence just off the EP (both sides) against the EP values."""
    at = ModelParams(g, 2.0 * g, 0.0)
    near = [ModelParams(g, 2.0 * g * (1 + s * rel), 0.0) for s in (-1.0, 1.0)]
    rho11 = np.outer(basis_state(1, 1, space), basis_state(1, 1, space))
    ref_plan = PropagationPlan(at, space, z_grid)
    ref = [coincidence_from_density(x) for x in ref_plan.run(rho11)]
    closed = matrix = 0.0
    for p in near:
        plan = PropagationPlan(p, space, z_grid)
        for z, x, y in zip(plan.z_grid, plan.run(rho11), ref):
            matrix = max(matrix, abs(coincidence_from_density(x) - y))
            closed = max(closed, abs(coincidence_closed_form(p, float(z)) - coincidence_closed_form(at, float(z))))
    return {"EP continuity (matrix)": matrix, "EP continuity (closed form)": closed}


def trajectory_defects(params: ModelParams, space: FockSpace, z_points, n_traj: int, seed: int) -> dict[str, float]:
    """Largest MC deviation from the exact coincidence, absolute and in standard errors."""
    psi0 = basis_state(1, 1, space)
    obs = np.outer(psi0, psi0)
    stats = mc_trajectories_grid(psi0, params, space, z_points, obs, n_traj, seed)
    exact = PropagationPlan(params, space, z_points).run(obs)
    worst_abs = worst_se = 0.0
    for s, x in zip(stats, exact):
        diff = abs(s.mean - coincidence_from_density(x))
        worst_abs = max(worst_abs, diff)
        # without losses no jump ever fires and the spread is exactly zero;
        # only the absolute deviation is meaningful then
        if s.std_error > 0:
            worst_se = max(worst_se, diff / s.std_error)
    return {"MC vs exact (absolute)": worst_abs, "MC vs exact (standard errors)": worst_se}


@dataclass
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    passed: bool


@dataclass
class ValidationReport:
    rows: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, deviation: float, tolerance: float) -> None:
        deviation = float(deviation)
        self.rows.append(CheckResult(name, deviation, tolerance, bool(deviation <= tolerance)))

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_text(self) -> str:
        width = max((len(r.name) for r in self.rows), default=10)
        lines = [
            f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.deviation:.3e} <= {r.tolerance:.1e}"
            for r in self.rows
        ]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"passed": self.passed, "checks": [asdict(r) for r in self.rows]}, indent=2) + "\n"


def run_validation(cfg: ExperimentConfig, tolerance_scale: float = 1.0, with_mc: bool = True) -> ValidationReport:
    """Run every check for one configuration.

    ``tolerance_scale`` multiplies all tolerances; a negative value forces
    every row to fail and exists to exercise the failure path.
    """
    space = FockSpace(cfg.n_max)
    params = ModelParams(cfg.g, cfg.gamma_a, cfg.gamma_b)
    rng = np.random.default_rng(cfg.seed)
    report = ValidationReport()

    def add_all(defects: dict[str, float], tol: float) -> None:
        for name, value in defects.items():
            report.add(name, value, tol * tolerance_scale)

    alg_space = FockSpace(min(cfg.n_max, 4))
    add_all(algebra_defects(alg_space, rng), 1e-10)

    spectral = spectral_defects(params, space)
    for name, value in spectral.items():
        tol = {"EP one-photon nilpotency": 1e-12, "EP block smallness": 1.0, "H_eff constructions agree": 1e-14}
        report.add(name, value, tol.get(name, 1e-9 if "residual" in name or "similarity" in name else 1e-10) * tolerance_scale)

    z_max = min(cfg.z_max, 3.0 / cfg.g)
    z_grid = np.linspace(0.0, z_max, min(cfg.z_points, 101))
    sweep = oracle_sweep(params, space, standard_initial_states(space, rng), z_grid)
    tols = {
        "exact vs RK4 trace distance": 1e-6,
        "trace deviation": 1e-9,
        "hermiticity defect": 1e-10,
        "negative eigenvalue": 1e-8,
        "closed form vs matrix coincidence": 1e-9,
    }
    for name, value in sweep.items():
        report.add(name, value, tols[name] * tolerance_scale)

    ident, errors = jump_removal_errors(params, random_density(space, rng, rank=2, max_total=2))
    report.add("jump-removal generator identity", ident, 1e-12 * tolerance_scale)
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    report.add("jump-removal |ratio - 4|", max(abs(r - 4.0) for r in ratios), 0.5 * tolerance_scale)

    add_all(ep_continuity_defects(cfg.g, space, z_grid[:: max(1, len(z_grid) // 20)]), 1e-4)

    if with_mc:
        z_mc = np.linspace(0.0, z_max, 6)[1:]
        mc = trajectory_defects(params, space, z_mc, cfg.n_traj, cfg.seed)
        report.add("MC vs exact (absolute)", mc["MC vs exact (absolute)"], 0.02 * tolerance_scale)
        report.add("MC vs exact (standard errors)", mc["MC vs exact (standard errors)"], 5.0 * tolerance_scale)
    return report
