"""System definitions: constant-coefficient symmetric hyperbolic systems.

A system is d_t w + sum_k A_k d_k w + B w = 0 with symmetric constant
Jacobians A_k and a (generally nonsymmetric) constant source matrix B.
The barotropic Euler equations linearized at a uniform background state
are provided in their symmetrized form, together with the closed-form
eigenstructure of their directional pencil.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidScenario, NonFinite, NonUnitDirection, NotSymmetric, SizeMismatch
from .symlin import EigenDecomposition, SymMatrix, eigendecompose

# Relative step for central-difference flux linearization.
FD_STEP_RTOL = 1e-5
# linearize_flux tolerates this much asymmetry in each recovered Jacobian.
FD_ASYMMETRY_RTOL = 1e-6


@dataclass(frozen=True)
class HyperbolicSystem:
    """Constant-coefficient linear symmetric hyperbolic system."""

    jacobians: tuple[SymMatrix, ...]
    source: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        jac = tuple(self.jacobians)
        if not 1 <= len(jac) <= 3:
            raise SizeMismatch(f"space dimension {len(jac)} unsupported")
        n = jac[0].n
        if any(j.n != n for j in jac):
            raise SizeMismatch("Jacobians have differing dimensions")
        b = np.array(self.source, dtype=float)
        if b.shape != (n, n):
            raise SizeMismatch(f"source matrix shape {b.shape} does not match n = {n}")
        if not np.isfinite(b).all():
            raise NonFinite("source matrix entries must be finite")
        b.setflags(write=False)
        object.__setattr__(self, "jacobians", jac)
        object.__setattr__(self, "source", b)

    @property
    def d(self) -> int:
        return len(self.jacobians)

    @property
    def n(self) -> int:
        return self.jacobians[0].n

    def source_sym(self) -> np.ndarray:
        """Symmetric part of the source matrix."""
        return (self.source + self.source.T) / 2.0

    def max_wave_speed(self) -> float:
        """Largest spectral radius over the coordinate Jacobians."""
        speed = 0.0
        for jac in self.jacobians:
            lam = eigendecompose(jac).eigenvalues
            speed = max(speed, abs(lam[0]), abs(lam[-1]))
        return speed


@dataclass(frozen=True)
class EulerScenario:
    """Uniform background state for the linearized barotropic Euler equations."""

    rho_bar: float
    v_bar: tuple[float, float]
    a_bar: float

    def __post_init__(self) -> None:
        v = tuple(float(c) for c in self.v_bar)
        if len(v) != 2:
            raise InvalidScenario("background velocity must have two components")
        vals = (self.rho_bar, *v, self.a_bar)
        if not all(np.isfinite(vals)):
            raise InvalidScenario("scenario parameters must be finite")
        if self.rho_bar <= 0.0:
            raise InvalidScenario(f"background density {self.rho_bar} must be positive")
        if self.a_bar <= 0.0:
            raise InvalidScenario(f"background sound speed {self.a_bar} must be positive")
        object.__setattr__(self, "rho_bar", float(self.rho_bar))
        object.__setattr__(self, "v_bar", v)
        object.__setattr__(self, "a_bar", float(self.a_bar))

    @property
    def speed(self) -> float:
        return float(np.hypot(*self.v_bar))


def euler_symmetrized(scenario: EulerScenario) -> HyperbolicSystem:
    """Symmetrized linearized barotropic Euler system in d = 2.

    The state is (r, v1, v2) where r is the density perturbation rescaled
    by a_bar / rho_bar; that rescaling makes both Jacobians symmetric and
    leaves no zeroth-order term.
    """
    v1, v2 = scenario.v_bar
    a = scenario.a_bar
    a1 = SymMatrix([[v1, a, 0.0], [a, v1, 0.0], [0.0, 0.0, v1]])
    a2 = SymMatrix([[v2, 0.0, a], [0.0, v2, 0.0], [a, 0.0, v2]])
    label = f"euler(rho={scenario.rho_bar:g}, v=({v1:g},{v2:g}), a={a:g})"
    return HyperbolicSystem((a1, a2), np.zeros((3, 3)), label)


def _check_unit_direction(nu: np.ndarray) -> None:
    if nu.shape != (2,):
        raise SizeMismatch(f"direction must have two components, got shape {nu.shape}")
    if abs(np.linalg.norm(nu) - 1.0) > 1e-12:
        raise NonUnitDirection(f"|nu| = {np.linalg.norm(nu)!r} is not 1 within 1e-12")


def euler_eigenstructure(scenario: EulerScenario, nu) -> EigenDecomposition:
    """Closed-form eigendecomposition of the Euler pencil along unit nu.

    Eigenvalues are nu.v - a, nu.v, nu.v + a (always ascending since a > 0);
    the eigenvector columns couple the acoustic modes to the direction nu
    and leave a transverse shear mode in between.
    """
    nu = np.asarray(nu, dtype=float)
    _check_unit_direction(nu)
    n1, n2 = nu
    vn = n1 * scenario.v_bar[0] + n2 * scenario.v_bar[1]
    a = scenario.a_bar
    lam = np.array([vn - a, vn, vn + a])
    r = 1.0 / np.sqrt(2.0)
    t = np.array(
        [
            [r, 0.0, r],
            [-r * n1, -n2, r * n1],
            [-r * n2, n1, r * n2],
        ]
    )
    return EigenDecomposition(lam, t)


def characteristic_transform(scenario: EulerScenario, nu, w) -> np.ndarray:
    """Map a physical state w = (r, v1, v2) to characteristic variables along nu."""
    nu = np.asarray(nu, dtype=float)
    _check_unit_direction(nu)
    w = np.asarray(w, dtype=float)
    if w.shape != (3,):
        raise SizeMismatch(f"state must have three components, got shape {w.shape}")
    n1, n2 = nu
    rr, v1, v2 = w
    vn = n1 * v1 + n2 * v2
    r = 1.0 / np.sqrt(2.0)
    return np.array([r * (rr - vn), -(n2 * v1 - n1 * v2), r * (rr + vn)])


@dataclass(frozen=True)
class FluxSpec:
    """A quasilinear flux F(x, u, p) with p = (d_1 u, ..., d_d u).

    The evaluator must accept x of shape (d,), u of shape (n,) and p of
    shape (d, n), returning shape (n,).
    """

    d: int
    n: int
    evaluator: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray] = field(repr=False)


def linearize_flux(spec: FluxSpec, x_ref, u_ref, p_ref) -> HyperbolicSystem:
    """Linearize a flux around a reference state by central differences.

    Returns the system d_t w + sum_k A_k d_k w + B w = 0 with
    A_k = dF/dp_k and B = dF/du, both evaluated at the reference point.
    Each A_k must come out symmetric to within FD_ASYMMETRY_RTOL of its
    magnitude; B may be arbitrary.
    """
    x = np.asarray(x_ref, dtype=float)
    u = np.asarray(u_ref, dtype=float)
    p = np.asarray(p_ref, dtype=float)
    if u.shape != (spec.n,) or p.shape != (spec.d, spec.n):
        raise SizeMismatch(
            f"reference shapes u{u.shape}, p{p.shape} do not match (n={spec.n}, d={spec.d})"
        )

    def evaluate(uu: np.ndarray, pp: np.ndarray) -> np.ndarray:
        out = np.asarray(spec.evaluator(x, uu, pp), dtype=float)
        if out.shape != (spec.n,):
            raise SizeMismatch(f"flux evaluator returned shape {out.shape}")
        if not np.isfinite(out).all():
            raise NonFinite("flux evaluator returned non-finite values")
        return out

    source = np.zeros((spec.n, spec.n))
    for j in range(spec.n):
        h = FD_STEP_RTOL * (1.0 + abs(u[j]))
        up = u.copy()
        um = u.copy()
        up[j] += h
        um[j] -= h
        source[:, j] = (evaluate(up, p) - evaluate(um, p)) / (2.0 * h)

    jacobians = []
    for k in range(spec.d):
        a_k = np.zeros((spec.n, spec.n))
        for j in range(spec.n):
            h = FD_STEP_RTOL * (1.0 + abs(p[k, j]))
            pp = p.copy()
            pm = p.copy()
            pp[k, j] += h
            pm[k, j] -= h
            a_k[:, j] = (evaluate(u, pp) - evaluate(u, pm)) / (2.0 * h)
        scale = 1.0 + np.abs(a_k).max()
        asym = np.abs(a_k - a_k.T).max()
        if asym > FD_ASYMMETRY_RTOL * scale:
            raise NotSymmetric(
                f"Jacobian for axis {k + 1} is asymmetric: {asym:.3e} > "
                f"{FD_ASYMMETRY_RTOL * scale:.3e}"
            )
        jacobians.append(SymMatrix((a_k + a_k.T) / 2.0))

    return HyperbolicSystem(tuple(jacobians), source, label="linearized flux")


def advection_system(speeds: Sequence[float] | float) -> HyperbolicSystem:
    """Scalar advection in one space dimension, or a diagonal system of them."""
    arr = np.atleast_1d(np.asarray(speeds, dtype=float))
    return HyperbolicSystem(
        (SymMatrix(np.diag(arr)),),
        np.zeros((arr.size, arr.size)),
        label=f"advection({', '.join(f'{c:g}' for c in arr)})",
    )
