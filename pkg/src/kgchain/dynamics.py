"""Symplectic integration of the chain and adiabatic-invariance experiments.

The integrator is a Strang splitting between the full quadratic flow,
solved exactly in DFT normal modes, and the on-site quartic kick.  Solving
the linear part exactly removes stiffness from the comparison and isolates
the nonlinear drift, which is the object under study.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .chainpoly import SeedPoly, poly_norm
from .cyclic import FieldEvaluator, RealizedEvaluator
from .linearize import LinearNF, apply_linear, build_A, linear_normalize
from .normalform import GdnlsModel, NormalFormResult


class IntegratorError(RuntimeError):
    pass


@dataclass
class SimConfig:
    n: int = 16
    a: float = 0.05
    radius: float = 0.05            # amplitude scale in the chosen norm
    norm: str = "l2"                # "l2" (total) | "linf" (specific)
    dt: float = 0.01
    horizon: float = 1e3
    order: int = 1
    initial: str = "uniform-random-phase"   # or "single-site", "state"
    state: np.ndarray | None = None
    seed: int = 0
    quartic: bool = True            # harmonic test mode when False
    soft: bool = False
    sample_every: int | None = None
    energy_guard: float = 1e-3

    def steps(self) -> int:
        # dt < 0 integrates backwards over the same horizon
        steps = self.horizon / abs(self.dt)
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("horizon must be an integer multiple of dt")
        return int(round(steps))

    def validate(self):
        lam_max = 1.0 + 4.0 * self.a
        if abs(self.dt) * math.sqrt(lam_max) >= 0.5:
            raise ValueError("dt too large: dt * max frequency must be < 0.5")
        if self.norm not in ("l2", "linf"):
            raise ValueError("norm must be 'l2' or 'linf'")
        self.steps()


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray              # (samples, 2N)
    energy: np.ndarray              # H at the sample times
    energy_error: np.ndarray        # relative |H - H(0)| / |H(0)|
    config: SimConfig
    observables: dict = field(default_factory=dict)


def initial_state(cfg: SimConfig, n: int) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    x = np.zeros(n)
    y = np.zeros(n)
    if cfg.initial == "single-site":
        x[0] = cfg.radius
    elif cfg.initial == "uniform-random-phase":
        phases = rng.uniform(0.0, 2.0 * np.pi, n)
        amp = cfg.radius if cfg.norm == "linf" else cfg.radius / math.sqrt(n)
        x = amp * np.cos(phases)
        y = amp * np.sin(phases)
    elif cfg.initial == "state":
        if cfg.state is None:
            raise ValueError("initial='state' needs cfg.state")
        z = np.asarray(cfg.state, dtype=float)
        if z.shape != (2 * n,):
            raise ValueError("state must have length 2N")
        return z.copy()
    else:
        raise ValueError(f"unknown initial condition {cfg.initial!r}")
    return np.concatenate([x, y])


def kg_energy(x: np.ndarray, y: np.ndarray, a: float,
              quartic: bool = True, soft: bool = False) -> float:
    """H = 1/2 sum (y^2 + x^2 + a (x_{j+1}-x_j)^2) +- 1/4 sum x^4."""
    coupling = a * np.sum((np.roll(x, -1) - x) ** 2)
    h = 0.5 * (np.sum(y * y) + np.sum(x * x) + coupling)
    if quartic:
        h += (-0.25 if soft else 0.25) * np.sum(x ** 4)
    return float(h)


class _ModeRotation:
    """Exact flow of the quadratic part in Fourier modes."""

    def __init__(self, spectrum: np.ndarray, dt: float,
                 momentum_matches_position: bool = False):
        om = np.sqrt(spectrum)
        self.om = om
        self.cos = np.cos(om * dt)
        self.sin = np.sin(om * dt)
        # q' = p-block coupling: xdot = y uses sin/omega, ydot = -A x uses
        # -omega sin; for the B-quadratic GdNLS flow both blocks carry B.
        self.same = momentum_matches_position

    def apply(self, x: np.ndarray, y: np.ndarray):
        xh = np.fft.fft(x)
        yh = np.fft.fft(y)
        if self.same:
            xh, yh = (self.cos * xh + self.sin * yh,
                      -self.sin * xh + self.cos * yh)
        else:
            xh, yh = (self.cos * xh + self.sin / self.om * yh,
                      -self.om * self.sin * xh + self.cos * yh)
        return np.fft.ifft(xh).real, np.fft.ifft(yh).real


def integrate_kg(cfg: SimConfig) -> Trajectory:
    """Strang splitting: half quartic kick, exact linear flow, half kick.

    Aborts with :class:`IntegratorError` when the relative energy drift
    exceeds the instability guard.
    """
    cfg.validate()
    n = cfg.n
    steps = cfg.steps()
    sample_every = cfg.sample_every or max(1, steps // 2000)
    circ = build_A(cfg.a, n)
    rot = _ModeRotation(circ.spectrum, cfg.dt)
    z = initial_state(cfg, n)
    x, y = z[:n].copy(), z[n:].copy()
    sign = -1.0 if cfg.soft else 1.0

    times, states, energies = [], [], []
    e0 = kg_energy(x, y, cfg.a, cfg.quartic, cfg.soft)
    scale = max(abs(e0), 1e-300)

    def record(t):
        times.append(t)
        states.append(np.concatenate([x, y]))
        energies.append(kg_energy(x, y, cfg.a, cfg.quartic, cfg.soft))

    record(0.0)
    half = 0.5 * cfg.dt
    for step in range(1, steps + 1):
        if cfg.quartic:
            y -= half * sign * x ** 3
        x, y = rot.apply(x, y)
        if cfg.quartic:
            y -= half * sign * x ** 3
        if step % sample_every == 0 or step == steps:
            record(step * cfg.dt)
            if abs(energies[-1] - e0) / scale > cfg.energy_guard:
                raise IntegratorError(
                    f"energy drift {abs(energies[-1]-e0)/scale:.2e} exceeds "
                    f"guard {cfg.energy_guard:g} at t={step*cfg.dt:g}")

    energies = np.array(energies)
    return Trajectory(times=np.array(times), states=np.array(states),
                      energy=energies,
                      energy_error=np.abs(energies - e0) / scale,
                      config=cfg)


def observables(traj: Trajectory, res: NormalFormResult,
                orders: tuple[int, ...] | None = None) -> dict:
    """Series of H_Omega and the normal-form truncations along a trajectory.

    Everything is evaluated in the linearly normalized coordinates
    q = A^{1/4} x, p = A^{-1/4} y; the full nonlinear coordinate map is not
    applied (its effect is the deformation term, reported separately by the
    bound machinery).  Returns, for each requested order rho, the series
    J_rho = H_Omega + Z_0 + ... + Z_rho.
    """
    lnf = res.lnf
    if traj.config.n != lnf.n or traj.config.a != lnf.a:
        raise ValueError("trajectory and normal form parameters differ")
    n = lnf.n
    if orders is None:
        orders = tuple(range(res.order + 1))
    qp = apply_linear(lnf, traj.states)
    q, p = qp[..., :n], qp[..., n:]
    h_omega = 0.5 * lnf.omega * np.sum(q * q + p * p, axis=-1)

    # Z_0 in closed quadratic form: 1/2 (q.Bq + p.Bp) - H_Omega
    lam_half = np.sqrt(lnf.circ.spectrum)
    bq = np.fft.ifft(lam_half * np.fft.fft(q, axis=-1), axis=-1).real
    bp = np.fft.ifft(lam_half * np.fft.fft(p, axis=-1), axis=-1).real
    z0 = 0.5 * (np.sum(q * bq, axis=-1) + np.sum(p * bp, axis=-1)) - h_omega

    series = {"t": traj.times, "H": traj.energy,
              "H_Omega": h_omega, "Z0": z0,
              "energy_error": traj.energy_error}
    zs = []
    for s, zeta in enumerate(res.zetas, 1):
        if s > max(orders, default=0):
            break
        ev = RealizedEvaluator(zeta, n)
        zs.append(np.array([ev(state) for state in qp]))
        series[f"Z{s}"] = zs[-1]
    for rho in orders:
        j = h_omega + z0
        for s in range(1, rho + 1):
            j = j + zs[s - 1]
        series[f"J{rho}"] = j
    series["Z"] = series[f"J{max(orders)}"] - h_omega
    traj.observables.update(series)
    return series


def drift_experiment(base_cfg: SimConfig, ladder: list[float],
                     res: NormalFormResult) -> dict:
    """Maximal drifts of H_Omega and of the normal-form combination over an
    amplitude ladder, with the log-log slope against the radius.

    The report carries the fourth-power reference bounds Omega R^4 and
    R^4 (C_zeta0 mu + C_h1 R^2) for comparison.
    """
    if len(ladder) < 2:
        raise ValueError("ladder needs at least two amplitudes")
    from .chainpoly import decay_decompose, envelope_constant
    lnf = res.lnf
    sig0 = lnf.sigma0 if math.isfinite(lnf.sigma0) else 50.0
    c_z0 = envelope_constant(
        [(m, poly_norm(p, 1.0))
         for m, p in decay_decompose(lnf.zeta0).items()], sig0)
    c_h1 = envelope_constant(
        [(m, poly_norm(p, 1.0))
         for m, p in decay_decompose(lnf.h1).items()], lnf.sigma1 / 1.0
        if math.isfinite(lnf.sigma1) else 25.0)

    rows = []
    for radius in sorted(ladder, reverse=True):
        cfg = replace(base_cfg, radius=radius)
        traj = integrate_kg(cfg)
        obs = observables(traj, res)
        dh = float(np.max(np.abs(obs["H_Omega"] - obs["H_Omega"][0])))
        dz = float(np.max(np.abs(obs["Z"] - obs["Z"][0])))
        rows.append({
            "radius": radius,
            "max_dH_Omega": dh,
            "max_dZ": dz,
            "bound_H_Omega": lnf.omega * radius ** 4,
            "bound_Z": radius ** 4 * (c_z0 * lnf.mu + c_h1 * radius ** 2),
            "max_energy_error": float(np.max(traj.energy_error)),
        })
    radii = np.array([r["radius"] for r in rows])
    dhs = np.array([r["max_dH_Omega"] for r in rows])
    dzs = np.array([r["max_dZ"] for r in rows])
    slope_h = float(np.polyfit(np.log(radii), np.log(np.maximum(dhs, 1e-300)),
                               1)[0])
    slope_z = float(np.polyfit(np.log(radii), np.log(np.maximum(dzs, 1e-300)),
                               1)[0])
    return {
        "ladder": rows,
        "slope_H_Omega": slope_h,
        "slope_Z": slope_z,
        "monotone_H_Omega": bool(np.all(np.diff(dhs) < 0)),
        "within_10x_bound": bool(all(r["max_dH_Omega"]
                                     <= 10.0 * r["bound_H_Omega"]
                                     for r in rows)),
    }


# -- GdNLS flow ---------------------------------------------------------------

def integrate_gdnls(model: GdnlsModel, cfg: SimConfig,
                    state_qp: np.ndarray | None = None) -> Trajectory:
    """Flow of K = H_Omega + Z_0 + Z_1 in the normalized coordinates.

    Strang composition of the exact quadratic flow (H_Omega + Z_0 is the
    circulant quadratic form of A^{1/2} in both blocks) with an implicit
    midpoint substep for the quartic Z_1.  The midpoint rule preserves
    quadratic invariants, so H_Omega is conserved up to the fixed-point
    tolerance even across the nonlinear kick.
    """
    cfg.validate()
    n = model.n
    lnf = linear_normalize(model.a, n)
    if state_qp is None:
        state_qp = apply_linear(lnf, initial_state(cfg, n))
    z = np.asarray(state_qp, dtype=float).copy()
    steps = cfg.steps()
    sample_every = cfg.sample_every or max(1, steps // 2000)
    rot = _ModeRotation(lnf.circ.spectrum, cfg.dt,
                        momentum_matches_position=True)
    field_eval = FieldEvaluator(model.zeta1, n)
    half = 0.5 * cfg.dt

    lam_half = np.sqrt(lnf.circ.spectrum)

    def k_energy(zz):
        q, p = zz[:n], zz[n:]
        bq = np.fft.ifft(lam_half * np.fft.fft(q)).real
        bp = np.fft.ifft(lam_half * np.fft.fft(p)).real
        ev = self_z1(zz)
        return 0.5 * (q @ bq + p @ bp) + ev

    z1_eval = RealizedEvaluator(model.zeta1, n)

    def self_z1(zz):
        return z1_eval(zz)

    def midpoint_kick(zz, tau):
        if tau == 0.0:
            return zz
        m = zz.copy()
        for _ in range(80):
            nxt = zz + 0.5 * tau * field_eval(m)
            if np.max(np.abs(nxt - m)) < 1e-15 * max(1.0,
                                                     np.max(np.abs(zz))):
                m = nxt
                break
            m = nxt
        return zz + tau * field_eval(m)

    times, states, energies = [], [], []
    e0 = k_energy(z)
    scale = max(abs(e0), 1e-300)

    def record(t):
        times.append(t)
        states.append(z.copy())
        energies.append(k_energy(z))

    record(0.0)
    for step in range(1, steps + 1):
        z = midpoint_kick(z, half)
        q, p = rot.apply(z[:n], z[n:])
        z = np.concatenate([q, p])
        z = midpoint_kick(z, half)
        if step % sample_every == 0 or step == steps:
            record(step * cfg.dt)
            if abs(energies[-1] - e0) / scale > cfg.energy_guard:
                raise IntegratorError("GdNLS energy drift exceeds guard")

    energies = np.array(energies)
    traj = Trajectory(times=np.array(times), states=np.array(states),
                      energy=energies,
                      energy_error=np.abs(energies - e0) / scale,
                      config=cfg)
    q, p = traj.states[..., :n], traj.states[..., n:]
    traj.observables["H_Omega"] = 0.5 * model.omega * np.sum(
        q * q + p * p, axis=-1)
    return traj


def compare_models(kg_traj: Trajectory, gdnls_traj: Trajectory,
                   lnf: LinearNF) -> dict:
    """Sup-norm deviation between the KG flow (mapped to normalized
    coordinates) and the GdNLS flow, per sample time."""
    n = lnf.n
    if len(kg_traj.times) != len(gdnls_traj.times) or \
            not np.allclose(kg_traj.times, gdnls_traj.times):
        raise ValueError("trajectories must share sample times")
    kg_qp = apply_linear(lnf, kg_traj.states)
    dev = np.max(np.abs(kg_qp - gdnls_traj.states), axis=-1)
    return {"t": kg_traj.times, "deviation": dev,
            "max_deviation": float(np.max(dev))}


def write_trajectory_csv(path, traj: Trajectory):
    """Atomic CSV dump: t, H, H_Omega, Z, energy_error per sample."""
    import os
    import tempfile
    obs = traj.observables
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "H", "H_Omega", "Z", "energy_error"])
            for i, t in enumerate(traj.times):
                w.writerow([repr(float(t)), repr(float(traj.energy[i])),
                            repr(float(obs["H_Omega"][i]))
                            if "H_Omega" in obs else "",
                            repr(float(obs["Z"][i])) if "Z" in obs else "",
                            repr(float(traj.energy_error[i]))])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
