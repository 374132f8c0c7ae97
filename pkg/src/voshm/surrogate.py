"""Polynomial ridge response surface for the modal map.

Replaces the finite-element eigensolve inside filtering loops.  Each modal
branch's log-eigenfrequency is fit as a total-degree polynomial over
transformed coordinates (v, u) with

    v = log(1 + x)       log of the pier-spring stiffness divisor,
    u = log(e / e0)      log-scaled effective modulus,

which turn the stiff rational damage dependence and the multiplicative
modulus dependence into low-order polynomial behavior (the u-dependence of
a log-frequency is exactly linear).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from voshm.structural import BridgeModel, ModalResult


class SurrogateFitError(RuntimeError):
    """Degenerate design matrix or fit quality failure."""


def _monomial_exponents(degree: int) -> list[tuple[int, int]]:
    return [(i, j) for total in range(degree + 1)
            for i in range(total + 1) for j in [total - i]]


def _design(v: np.ndarray, u: np.ndarray, exponents) -> np.ndarray:
    cols = [v**i * u**j for i, j in exponents]
    return np.stack(cols, axis=-1)


@dataclass
class ModalSurrogate:
    """Per-mode log-eigenfrequency polynomials over (damage, effective modulus)."""

    coefficients: np.ndarray      # (n_branches, n_terms) on standardized features
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    y_mean: np.ndarray            # (n_modes,)
    degree: int
    regularization: float
    x_bounds: tuple[float, float]
    e_bounds: tuple[float, float]
    e_ref: float
    n_modes: int

    def _features(self, x, e_eff):
        x = np.asarray(x, dtype=float)
        e = np.asarray(e_eff, dtype=float)
        out_of_domain = (
            (x < self.x_bounds[0]) | (x > self.x_bounds[1])
            | (e < self.e_bounds[0]) | (e > self.e_bounds[1]))
        x = np.clip(x, *self.x_bounds)
        e = np.clip(e, *self.e_bounds)
        v = np.log1p(x)
        u = np.log(e / self.e_ref)
        phi = _design(v, u, _monomial_exponents(self.degree))
        phi = (phi - self.feature_mean) / self.feature_scale
        return phi, np.any(out_of_domain)

    def predict_frequencies(self, x, e_eff, n_modes: int | None = None):
        """Lowest eigenfrequencies in Hz; returns (frequencies, out_of_domain_flag).

        ``x`` and ``e_eff`` broadcast; frequencies gain a trailing mode axis,
        ascending.  All fit branches are evaluated and sorted, so the result
        stays consistent with a sorted eigensolve across branch crossings.
        Out-of-domain inputs are evaluated at the clamped domain boundary.
        """
        n = n_modes if n_modes is not None else self.n_modes
        phi, flagged = self._features(x, e_eff)
        f = np.exp(phi @ self.coefficients.T + self.y_mean)
        f = np.sort(f, axis=-1)[..., :n]
        return f, flagged

    def predict_eigenvalues(self, x, e_eff, n_modes: int | None = None):
        """Eigenvalues in (rad/s)^2; returns (eigenvalues, out_of_domain_flag)."""
        f, flagged = self.predict_frequencies(x, e_eff, n_modes)
        return (2.0 * np.pi * f) ** 2, flagged

    def predict_modal(self, x: float, e_eff: float) -> tuple[ModalResult, bool]:
        lam, flagged = self.predict_eigenvalues(x, e_eff)
        return ModalResult(eigenvalues=lam), flagged

    # -- persistence --------------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "coefficients": self.coefficients.tolist(),
            "feature_mean": self.feature_mean.tolist(),
            "feature_scale": self.feature_scale.tolist(),
            "y_mean": self.y_mean.tolist(),
            "degree": self.degree,
            "regularization": self.regularization,
            "x_bounds": list(self.x_bounds),
            "e_bounds": list(self.e_bounds),
            "e_ref": self.e_ref,
            "n_modes": self.n_modes,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ModalSurrogate":
        doc = json.loads(text)
        return cls(
            coefficients=np.asarray(doc["coefficients"], dtype=float),
            feature_mean=np.asarray(doc["feature_mean"], dtype=float),
            feature_scale=np.asarray(doc["feature_scale"], dtype=float),
            y_mean=np.asarray(doc["y_mean"], dtype=float),
            degree=int(doc["degree"]),
            regularization=float(doc["regularization"]),
            x_bounds=tuple(doc["x_bounds"]),
            e_bounds=tuple(doc["e_bounds"]),
            e_ref=float(doc["e_ref"]),
            n_modes=int(doc["n_modes"]),
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "ModalSurrogate":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def _track_branches(model: BridgeModel, x_grid: np.ndarray, n_track: int):
    """Follow modal branches along the damage sweep at the nominal modulus.

    Sorted eigenvalue indices swap where branches cross, which puts kinks in
    the sorted-frequency surfaces; matching eigenvectors step to step by
    mass-weighted correlation recovers smooth branches.  Returns, per damage
    value, the permutation taking branch index -> sorted index.
    """
    from scipy.optimize import linear_sum_assignment

    n_solve = min(n_track + 2, model.n_dof)
    perms = np.empty((x_grid.size, n_track), dtype=int)
    prev_vec = None
    for i, x in enumerate(x_grid):
        lam, vec = model.modal_eigensystem(x, n_modes=n_solve)
        if prev_vec is None:
            perms[i] = np.arange(n_track)
        else:
            mac = np.abs(prev_vec.T @ (model.mass @ vec))
            _, cols = linear_sum_assignment(-mac)
            perms[i] = cols[:n_track]
        prev_vec = vec[:, perms[i]]
    return perms


def fit_surrogate(model: BridgeModel, x_grid, e_grid, n_modes: int | None = None,
                  degree: int = 4, regularization: float = 1.0e-6,
                  n_track: int = 6) -> ModalSurrogate:
    """Fit the eigenfrequency response surface on a full (x, e) grid.

    The grids must cover the operating envelope: x up to the largest damage
    the filter may visit, e across the temperature-induced modulus range.
    ``n_track`` branches are fit (a margin above the reported mode count so
    sorted predictions stay correct across branch crossings).
    """
    x_grid = np.asarray(x_grid, dtype=float)
    e_grid = np.asarray(e_grid, dtype=float)
    if x_grid.size < degree + 2 or e_grid.size < degree + 2:
        raise SurrogateFitError("grid too coarse for the requested degree")
    n = n_modes if n_modes is not None else model.config.n_modes
    if n_track < n + 1:
        raise SurrogateFitError("n_track must exceed the reported mode count")

    perms = _track_branches(model, x_grid, n_track)

    # The modulus factor scales the whole stiffness operator, so the sorted
    # order (hence the branch permutation) is the same in every e column.
    freqs = np.empty((x_grid.size, e_grid.size, n_track))
    for i, x in enumerate(x_grid):
        for j, e in enumerate(e_grid):
            lam, _ = model.modal_eigensystem(x, e, n_modes=n_track + 2)
            freqs[i, j] = np.sqrt(lam[perms[i]]) / (2.0 * np.pi)

    e_ref = model.config.nominal_youngs_modulus
    xx, ee = np.meshgrid(x_grid, e_grid, indexing="ij")
    v = np.log1p(xx.ravel())
    u = np.log(ee.ravel() / e_ref)
    phi = _design(v, u, _monomial_exponents(degree))
    mean = phi.mean(axis=0)
    scale = phi.std(axis=0)
    scale[scale < 1e-12] = 1.0
    mean[0], scale[0] = 0.0, 1.0  # keep the intercept column as plain ones
    phi_std = (phi - mean) / scale

    gram = phi_std.T @ phi_std + regularization * np.eye(phi.shape[1])
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > 1e14:
        raise SurrogateFitError(f"ill-conditioned design matrix (cond={cond:.3g})")

    # fit log-frequency: the modulus dependence is exactly linear in u there
    # and the ridge residual becomes a relative-error objective
    y = np.log(freqs.reshape(-1, n_track))
    y_mean = y.mean(axis=0)
    coef = np.linalg.solve(gram, phi_std.T @ (y - y_mean)).T

    return ModalSurrogate(
        coefficients=coef,
        feature_mean=mean,
        feature_scale=scale,
        y_mean=y_mean,
        degree=degree,
        regularization=regularization,
        x_bounds=(float(x_grid[0]), float(x_grid[-1])),
        e_bounds=(float(e_grid[0]), float(e_grid[-1])),
        e_ref=e_ref,
        n_modes=n,
    )


def default_damage_grid(n: int = 15, x_max: float = 40.0) -> np.ndarray:
    """Damage grid uniform in v = log(1+x), from 0 to x_max."""
    return np.expm1(np.linspace(0.0, np.log1p(x_max), n))


def default_modulus_grid(e_ref: float, n: int = 9,
                         lo: float = 0.7, hi: float = 1.8) -> np.ndarray:
    """Modulus grid geometric over the temperature-induced envelope."""
    return e_ref * np.exp(np.linspace(np.log(lo), np.log(hi), n))
