"""
Classical world lines under the Lorentz force and their path-dependent potential.

The equation of motion in the path parameter s is

    d^2 y^mu / ds^2 = kappa F^{mu nu} dy_nu / ds,   kappa = q / (m c)

with kappa held fixed; boundary-value families run over s in [0, 1].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from pathgauge.config import (
    CLASSICAL_FD_STEP,
    CLASSICAL_QUAD_TOL,
    ODE_ATOL_FACTOR,
    ODE_TOL,
    QUAD_ORDER,
    SHOOTING_FD_STEP,
    SHOOTING_MAX_COND,
    SHOOTING_MAX_ITER,
    SHOOTING_TOL,
)
from pathgauge.errors import ActionError, IntegrationError, ShootingError, SingularityError
from pathgauge.fields import FieldConfig
from pathgauge.paths import PathFamily, SegmentSpec
from pathgauge.potential import Potential
from pathgauge.quadrature import get_rule
from pathgauge.spacetime import METRIC_DIAG, NATURAL, Constants, VectorLike, as_array, minkowski_dot

logger = logging.getLogger(__name__)


# =========================
# World Lines
# =========================
@dataclass(frozen=True, eq=False)
class WorldLine:
    """Integrated world line with dense output over [s[0], s[-1]]."""

    s: np.ndarray
    y: np.ndarray
    u: np.ndarray
    kappa: float
    charge: float
    mass: float
    dense: Optional[object] = None

    @property
    def samples(self) -> list[tuple[float, np.ndarray, np.ndarray]]:
        return list(zip(self.s, self.y, self.u))

    @property
    def span(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    def at(self, s) -> tuple[np.ndarray, np.ndarray]:
        """(y, dy/ds) at parameters s, shapes (M, 4) each."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.dense is None:
            # degenerate line resting at its start point
            return np.broadcast_to(self.y[0], (len(s), 4)).copy(), np.zeros((len(s), 4))
        state = self.dense(s).T
        return state[:, :4], state[:, 4:]

    def mass_shell(self) -> np.ndarray:
        """u . u at the stored samples; constant for an exact solution."""
        return minkowski_dot(self.u, self.u)

    def acceleration(self, field: FieldConfig, s) -> np.ndarray:
        y, u = self.at(s)
        F = field.evaluate(y)
        return self.kappa * METRIC_DIAG * np.einsum("nab,nb->na", F, u)


def _rhs(field: FieldConfig, kappa: float):
    def rhs(_s, state):
        y, u = state[:4], state[4:]
        try:
            F = field.evaluate(y)
        except SingularityError as exc:
            raise IntegrationError(f"world line ran into a singular locus at y = {y.tolist()}") from exc
        return np.concatenate([u, kappa * METRIC_DIAG * (F @ u)])

    return rhs


def integrate_worldline(
    field: FieldConfig,
    y_init: VectorLike,
    u_init: VectorLike,
    s_span: Sequence[float] = (0.0, 1.0),
    tol: float = ODE_TOL,
    *,
    charge: float = 1.0,
    mass: float = 1.0,
    constants: Constants = NATURAL,
) -> WorldLine:
    """
    Integrate the Lorentz-force equation with DOP853 and dense output.

    Raises:
        ValueError: u_init is zero or mass is not positive
        IntegrationError: step-size underflow or a singular locus on the way
    """
    y0 = as_array(y_init).astype(float)
    u0 = as_array(u_init).astype(float)
    if not np.any(u0):
        raise ValueError("u_init must be nonzero")
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
    kappa = charge / (mass * constants.c)
    sol = solve_ivp(
        _rhs(field, kappa),
        tuple(s_span),
        np.concatenate([y0, u0]),
        method="DOP853",
        rtol=tol,
        atol=tol * ODE_ATOL_FACTOR,
        dense_output=True,
    )
    if sol.status < 0:
        raise IntegrationError(f"world-line integration failed: {sol.message}")
    return WorldLine(
        s=sol.t,
        y=sol.y[:4].T.copy(),
        u=sol.y[4:].T.copy(),
        kappa=kappa,
        charge=charge,
        mass=mass,
        dense=sol.sol,
    )


# =========================
# Boundary-Value Families
# =========================
class ShootingSolver:
    """
    Classical paths from x0 to x over s in [0, 1] by single shooting on u_init.

    Damped Newton with a finite-difference Jacobian. The Jacobian is kept and
    reused across iterations and solves (chord steps) until progress stalls.
    """

    def __init__(
        self,
        field: FieldConfig,
        x0: VectorLike,
        *,
        charge: float = 1.0,
        mass: float = 1.0,
        constants: Constants = NATURAL,
        tol: float = ODE_TOL,
        bvp_tol: float = SHOOTING_TOL,
        max_iter: int = SHOOTING_MAX_ITER,
        fd_step: float = SHOOTING_FD_STEP,
        max_cond: float = SHOOTING_MAX_COND,
    ):
        self.field = field
        self.x0 = as_array(x0).astype(float)
        self.charge = charge
        self.mass = mass
        self.constants = constants
        self.tol = tol
        self.bvp_tol = bvp_tol
        self.max_iter = max_iter
        self.fd_step = fd_step
        self.max_cond = max_cond
        self.kappa = charge / (mass * constants.c)
        self._cache: dict[tuple, WorldLine] = {}
        self._jac: Optional[np.ndarray] = None

    def _integrate(self, u: np.ndarray) -> WorldLine:
        return integrate_worldline(
            self.field, self.x0, u, (0.0, 1.0), self.tol,
            charge=self.charge, mass=self.mass, constants=self.constants,
        )

    def _endpoint(self, u: np.ndarray) -> np.ndarray:
        return self._integrate(u).y[-1]

    def _jacobian(self, u: np.ndarray) -> np.ndarray:
        h = self.fd_step * max(1.0, float(np.max(np.abs(u))))
        J = np.empty((4, 4))
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            J[:, j] = (self._endpoint(u + e) - self._endpoint(u - e)) / (2.0 * h)
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond > self.max_cond:
            raise ShootingError(f"shooting Jacobian is singular (cond {cond:.3g}); conjugate point ahead")
        return J

    def solve(self, x: VectorLike) -> WorldLine:
        """The classical world line from x0 to x."""
        x = as_array(x).astype(float)
        key = tuple(x)
        if key in self._cache:
            return self._cache[key]
        if np.allclose(x, self.x0, rtol=0.0, atol=1e-15):
            line = WorldLine(np.array([0.0, 1.0]), np.array([x, x]), np.zeros((2, 4)),
                             self.kappa, self.charge, self.mass)
            self._cache[key] = line
            return line

        scale = max(1.0, float(np.max(np.abs(x - self.x0))))
        u = x - self.x0
        r = self._endpoint(u) - x
        fresh = False
        for it in range(self.max_iter):
            norm = float(np.max(np.abs(r)))
            if norm <= self.bvp_tol * scale:
                logger.debug("shooting to %s converged in %d iterations", x.tolist(), it)
                line = self._integrate(u)
                self._cache[key] = line
                return line
            if self._jac is None:
                self._jac = self._jacobian(u)
                fresh = True
            delta = np.linalg.solve(self._jac, -r)
            lam = 1.0
            accepted = False
            while lam >= 1.0 / 1024:
                trial = u + lam * delta
                r_trial = self._endpoint(trial) - x
                if np.max(np.abs(r_trial)) < (1.0 - 1e-4 * lam) * norm:
                    accepted = True
                    break
                lam *= 0.5
            if not accepted:
                if fresh:
                    raise ShootingError(f"damped Newton made no progress towards {x.tolist()}")
                self._jac = None
                continue
            if np.max(np.abs(r_trial)) > 0.5 * norm:
                self._jac = None
            fresh = False
            u, r = trial, r_trial
        raise ShootingError(f"shooting to {x.tolist()} did not converge in {self.max_iter} iterations")

    def endpoint_jacobian(self, x: np.ndarray, s: np.ndarray, step: float = CLASSICAL_FD_STEP) -> np.ndarray:
        """dy^lambda/dx^mu (M, 4, 4) by central differences over re-solved paths."""
        J = np.empty((len(s), 4, 4))
        for mu in range(4):
            h = step * max(1.0, abs(x[mu]))
            e = np.zeros(4)
            e[mu] = h
            y_plus, _ = self.solve(x + e).at(s)
            y_minus, _ = self.solve(x - e).at(s)
            J[:, :, mu] = (y_plus - y_minus) / (2.0 * h)
        return J


class ClassicalSegment(SegmentSpec):
    """The classical world line to x as a single path segment."""

    def __init__(self, solver: ShootingSolver, step: float = CLASSICAL_FD_STEP):
        self.solver = solver
        self.step = step

    def point(self, s, x):
        return self.solver.solve(x).at(s)[0]

    def dyds(self, s, x):
        return self.solver.solve(x).at(s)[1]

    def dydx(self, s, x):
        return self.solver.endpoint_jacobian(np.asarray(x, dtype=float), np.asarray(s, dtype=float), self.step)


def classical_path_family(solver: ShootingSolver, step: float = CLASSICAL_FD_STEP) -> PathFamily:
    """The family of classical paths from the solver's x0, usable with potential_at."""
    return PathFamily((ClassicalSegment(solver, step),), solver.x0, name="classical")


def classical_potential(
    field: FieldConfig,
    family: ShootingSolver,
    x: VectorLike,
    *,
    step: float = CLASSICAL_FD_STEP,
    tol: float = CLASSICAL_QUAD_TOL,
    order: int = QUAD_ORDER,
) -> np.ndarray:
    """
    Covariant A_mu(P_c, x) = -(1/kappa) int_0^1 d^2y_lambda/ds^2 dy^lambda/dx^mu ds.

    Raises:
        ShootingError: a boundary-value solve fails
    """
    if family.kappa == 0:
        raise ValueError("classical potential needs a nonzero coupling q/(m c)")
    x = as_array(x).astype(float)
    field.check_singular(x)
    line = family.solve(x)

    def fn(s):
        acc_lower = METRIC_DIAG * line.acceleration(field, s)
        J = family.endpoint_jacobian(x, s, step)
        return -np.einsum("nl,nlm->nm", acc_lower, J) / family.kappa

    return np.asarray(get_rule(order).integrate(fn, 0.0, 1.0, tol=tol).value)


# =========================
# Action
# =========================
class ActionTerms(NamedTuple):
    proper_time_action: float
    interaction_integral: float
    interaction_action: float
    phase: float


def action_and_phase(
    worldline: WorldLine,
    constants: Constants = NATURAL,
    potential: Optional[Potential] = None,
    *,
    tol: float = CLASSICAL_QUAD_TOL,
    order: int = QUAD_ORDER,
) -> ActionTerms:
    """
    -m c int sqrt(u.u) ds and int A^mu u_mu ds along a world line.

    The interaction action is -(q/c) times the interaction integral and the
    phase is the total action over hbar.

    Raises:
        ActionError: the world line is spacelike somewhere
    """
    rule = get_rule(order)
    s0, s1 = worldline.span
    shell = worldline.mass_shell()
    if np.any(shell < 0):
        raise ActionError(f"spacelike stretch on the world line (min u.u = {float(shell.min()):.3g})")

    def proper(s):
        _, u = worldline.at(s)
        uu = minkowski_dot(u, u)
        if np.any(uu < 0):
            raise ActionError(f"spacelike stretch on the world line (u.u = {float(uu.min()):.3g})")
        return np.sqrt(uu)

    proper_time_action = -worldline.mass * constants.c * float(rule.integrate(proper, s0, s1, tol=tol).value)

    interaction = 0.0
    if potential is not None:
        def coupling(s):
            y, u = worldline.at(s)
            return minkowski_dot(potential(y), u)

        interaction = float(rule.integrate(coupling, s0, s1, tol=tol).value)

    interaction_action = -(worldline.charge / constants.c) * interaction
    phase = (proper_time_action + interaction_action) / constants.hbar
    return ActionTerms(proper_time_action, interaction, interaction_action, phase)
