"""Two-span bridge finite-element model on elastic supports.

Vertical-bending Euler-Bernoulli beam with three translational springs
(abutment / pier / abutment).  Damage softens the pier spring,
K_pier(x) = K_0 / (1 + x), and temperature scales the effective system
stiffness through a modulus factor, so eigenvalues obey
lambda_m(c * E, x) = c * lambda_m(E, x).  The same model provides the
static normalized-capacity curve r(x) used for reliability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh


class ConfigurationError(ValueError):
    """Invalid structural configuration (bad sections, rigid-body system)."""


class StructuralSolveError(RuntimeError):
    """Eigen or static solve failed."""


DEFAULT_SENSOR_NODES = (3, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33, 36)


@dataclass(frozen=True)
class BridgeConfig:
    """Geometry, section, and support parameters of the two-span beam.

    Spans rest on three vertical springs; the middle one deteriorates.
    Horizontal support stiffness is carried for configuration fidelity but
    does not enter the vertical bending problem.
    """

    span_lengths_m: tuple[float, float] = (25.0, 25.0)
    section_area_m2: float = 0.4
    section_inertia_m4: float = 0.02133
    density_kgm3: float = 2500.0
    elements_per_span: int = 20
    support_stiffness_horizontal: float = 1.0e8
    support_stiffness_vertical: tuple[float, float, float] = (1.0e7, 1.0e7, 1.0e7)
    nominal_youngs_modulus: float = 29.11e9
    n_modes: int = 5
    sensor_nodes: tuple[int, ...] = DEFAULT_SENSOR_NODES

    def __post_init__(self):
        if len(self.span_lengths_m) != 2 or any(l <= 0 for l in self.span_lengths_m):
            raise ConfigurationError("span_lengths_m must be two positive lengths")
        for name in ("section_area_m2", "section_inertia_m4", "density_kgm3",
                     "nominal_youngs_modulus"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be strictly positive")
        if self.elements_per_span < 4:
            raise ConfigurationError("elements_per_span must be >= 4")
        if len(self.support_stiffness_vertical) != 3:
            raise ConfigurationError("support_stiffness_vertical needs 3 entries")
        if any(k < 0 for k in self.support_stiffness_vertical):
            raise ConfigurationError("support stiffness must be nonnegative")
        if not 3 <= self.n_modes <= 5:
            raise ConfigurationError("n_modes must lie in [3, 5]")
        n_nodes = 2 * self.elements_per_span + 1
        for node in self.sensor_nodes:
            if not 0 < node < n_nodes - 1:
                raise ConfigurationError(f"sensor node {node} is not interior")

    @property
    def n_nodes(self) -> int:
        return 2 * self.elements_per_span + 1

    @property
    def support_node_ids(self) -> tuple[int, int, int]:
        return (0, self.elements_per_span, 2 * self.elements_per_span)


def damaged_support_stiffness(k_y0: float, x: float) -> float:
    """Pier spring stiffness after deterioration x: k_y0 / (1 + x)."""
    if x < 0:
        raise ValueError(f"deterioration must be nonnegative, got {x}")
    return k_y0 / (1.0 + x)


def _hermite_element_matrices(ei: float, rho_a: float, length: float):
    l = length
    k = (ei / l**3) * np.array([
        [12.0, 6.0 * l, -12.0, 6.0 * l],
        [6.0 * l, 4.0 * l**2, -6.0 * l, 2.0 * l**2],
        [-12.0, -6.0 * l, 12.0, -6.0 * l],
        [6.0 * l, 2.0 * l**2, -6.0 * l, 4.0 * l**2],
    ])
    m = (rho_a * l / 420.0) * np.array([
        [156.0, 22.0 * l, 54.0, -13.0 * l],
        [22.0 * l, 4.0 * l**2, 13.0 * l, -3.0 * l**2],
        [54.0, 13.0 * l, 156.0, -22.0 * l],
        [-13.0 * l, -3.0 * l**2, -22.0 * l, 4.0 * l**2],
    ])
    return k, m


@dataclass
class ModalResult:
    """Lowest eigensolution: eigenvalues in (rad/s)^2 and frequencies in Hz."""

    eigenvalues: np.ndarray
    eigenfrequencies: np.ndarray = field(init=False)

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        if np.any(lam <= 0) or np.any(np.diff(lam) < 0):
            raise StructuralSolveError("eigenvalues must be positive ascending")
        self.eigenvalues = lam
        self.eigenfrequencies = np.sqrt(lam) / (2.0 * np.pi)


@dataclass
class CapacityCurve:
    """Normalized load-bearing capacity r(x) on an ascending damage grid.

    Piecewise-linear in x; beyond the last knot the last segment slope is
    extrapolated and the result floored at ``r_min``.
    """

    x_grid: np.ndarray
    r_values: np.ndarray
    r_min: float = 1.0e-3

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        r = np.asarray(self.r_values, dtype=float)
        if x[0] != 0.0 or np.any(np.diff(x) <= 0):
            raise ValueError("x_grid must ascend from 0")
        if abs(r[0] - 1.0) > 1e-12:
            raise ValueError("capacity must be normalized to r(0) = 1")
        if np.any(np.diff(r) >= 0) or np.any(r <= 0):
            raise ValueError("capacity must be strictly decreasing and positive")
        self.x_grid, self.r_values = x, r

    def evaluate(self, x):
        """Capacity at deterioration x (scalar or array), total on x >= 0."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("deterioration must be nonnegative")
        r = np.interp(x, self.x_grid, self.r_values)
        beyond = x > self.x_grid[-1]
        if np.any(beyond):
            slope = ((self.r_values[-1] - self.r_values[-2])
                     / (self.x_grid[-1] - self.x_grid[-2]))
            tail = self.r_values[-1] + slope * (x[beyond] - self.x_grid[-1])
            r = np.array(r, copy=True)
            r[beyond] = np.maximum(tail, self.r_min)
        return r if r.ndim else float(r)


class BridgeModel:
    """Assembled mass/stiffness operators with damage- and modulus-aware solves.

    The reference stiffness is assembled once at the nominal modulus with an
    undamaged pier spring; damage replaces the pier spring entry and the
    modulus factor scales the whole operator (support stiffness follows the
    seasonal stiffening of the ground, keeping eigenvalue homogeneity exact).
    """

    def __init__(self, config: BridgeConfig):
        self.config = config
        self._assemble()
        self._check_positive_definite()

    # -- assembly -----------------------------------------------------------

    def _assemble(self):
        cfg = self.config
        n_el = 2 * cfg.elements_per_span
        n_dof = 2 * (n_el + 1)
        ei = cfg.nominal_youngs_modulus * cfg.section_inertia_m4
        rho_a = cfg.density_kgm3 * cfg.section_area_m2

        k_glob = np.zeros((n_dof, n_dof))
        m_glob = np.zeros((n_dof, n_dof))
        lengths = np.concatenate([
            np.full(cfg.elements_per_span, cfg.span_lengths_m[0] / cfg.elements_per_span),
            np.full(cfg.elements_per_span, cfg.span_lengths_m[1] / cfg.elements_per_span),
        ])
        for el, l in enumerate(lengths):
            k_e, m_e = _hermite_element_matrices(ei, rho_a, l)
            sl = slice(2 * el, 2 * el + 4)
            k_glob[sl, sl] += k_e
            m_glob[sl, sl] += m_e

        self._element_lengths = lengths
        self._k_beam = k_glob
        self.mass = m_glob
        self._support_dofs = tuple(2 * n for n in cfg.support_node_ids)
        self.n_dof = n_dof

    def _check_positive_definite(self):
        try:
            np.linalg.cholesky(self.mass)
        except np.linalg.LinAlgError as exc:
            raise ConfigurationError("mass operator not positive definite") from exc
        lam = eigh(self.stiffness(0.0), self.mass, eigvals_only=True,
                   subset_by_index=(0, 0))
        # any genuine mode of a bridge sits far above 1 mHz
        if lam[0] <= (2.0 * np.pi * 1.0e-3) ** 2:
            raise ConfigurationError(
                "near-zero eigenvalue: support stiffness leaves a rigid-body mode")

    # -- operators ----------------------------------------------------------

    def stiffness(self, x: float, e_eff: float | None = None) -> np.ndarray:
        """Stiffness operator at deterioration x and effective modulus e_eff."""
        if x < 0:
            raise ValueError("deterioration must be nonnegative")
        cfg = self.config
        k = self._k_beam.copy()
        springs = list(cfg.support_stiffness_vertical)
        springs[1] = damaged_support_stiffness(springs[1], x)
        for dof, k_s in zip(self._support_dofs, springs):
            k[dof, dof] += k_s
        if e_eff is not None:
            if e_eff <= 0:
                raise ValueError("effective modulus must be positive")
            k *= e_eff / cfg.nominal_youngs_modulus
        return k

    # -- modal analysis -----------------------------------------------------

    def modal_analysis(self, x: float = 0.0, e_eff: float | None = None,
                       n_modes: int | None = None) -> ModalResult:
        """Lowest ``n_modes`` eigenvalues of the damaged, temperature-scaled system."""
        n = n_modes if n_modes is not None else self.config.n_modes
        if not 3 <= n <= 5:
            raise ValueError("n_modes must lie in [3, 5]")
        lam, _ = self.modal_eigensystem(x, e_eff, n)
        return ModalResult(eigenvalues=lam)

    def modal_eigensystem(self, x: float = 0.0, e_eff: float | None = None,
                          n_modes: int = 5) -> tuple[np.ndarray, np.ndarray]:
        """Lowest eigenpairs (eigenvalues ascending, eigenvectors as columns)."""
        k = self.stiffness(x, e_eff)
        try:
            lam, vec = eigh(k, self.mass, subset_by_index=(0, n_modes - 1))
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise StructuralSolveError(
                f"eigensolve failed at x={x}, e_eff={e_eff}: {exc}") from exc
        return lam, vec

    # -- static capacity ----------------------------------------------------

    def _static_midspan_stress(self, x: float, q: float = 1.0e4) -> float:
        """Peak bending stress at the right midspan under a uniform load q."""
        k = self.stiffness(x)
        f = np.zeros(self.n_dof)
        for el, l in enumerate(self._element_lengths):
            sl = slice(2 * el, 2 * el + 4)
            f[sl] += q * np.array([l / 2, l**2 / 12, l / 2, -(l**2) / 12])
        try:
            u = np.linalg.solve(k, f)
        except np.linalg.LinAlgError as exc:
            raise StructuralSolveError(f"static solve failed at x={x}") from exc

        cfg = self.config
        node = cfg.elements_per_span + cfg.elements_per_span // 2  # right midspan
        ei = cfg.nominal_youngs_modulus * cfg.section_inertia_m4
        moments = []
        for el, end in ((node - 1, 1.0), (node, 0.0)):
            l = self._element_lengths[el]
            v1, t1, v2, t2 = u[2 * el: 2 * el + 4]
            xi = end
            curv = ((12 * xi - 6) * v1 + l * (6 * xi - 4) * t1
                    + (6 - 12 * xi) * v2 + l * (6 * xi - 2) * t2) / l**2
            moments.append(ei * curv)
        moment = 0.5 * (moments[0] + moments[1])
        half_depth = 0.5 * np.sqrt(12.0 * cfg.section_inertia_m4 / cfg.section_area_m2)
        return abs(moment) * half_depth / cfg.section_inertia_m4

    def capacity_curve(self, x_grid) -> CapacityCurve:
        """Normalized capacity r(x) = sigma(0) / sigma(x) on the given grid."""
        x_grid = np.asarray(x_grid, dtype=float)
        if x_grid[0] != 0.0 or np.any(np.diff(x_grid) <= 0):
            raise ValueError("x_grid must ascend from 0")
        sigma = np.array([self._static_midspan_stress(x) for x in x_grid])
        return CapacityCurve(x_grid=x_grid, r_values=sigma[0] / sigma)
