"""Tempered sequential Monte Carlo sampler (transitional MCMC family).

Moves a prior sample set to the posterior through adaptively chosen
likelihood-tempering stages; each stage reweights, resamples, and applies
Metropolis moves with a proposal scaled from the weighted sample covariance.
Likelihood callables are evaluated on full sample batches, so vectorized
models run fast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InferenceError(RuntimeError):
    """Sampler degeneracy or stage failure, with diagnostics in the message."""


@dataclass(frozen=True)
class TmcmcSettings:
    n_samples: int = 1000
    target_weight_cv: float = 1.0
    proposal_scale: float = 0.2
    n_moves: int = 5
    max_stages: int = 50


def _stage_increment(loglik: np.ndarray, beta: float, target_cv: float) -> float:
    """Largest tempering increment keeping the stage weight cv near target."""
    shifted = loglik - loglik.max()

    def weight_cv(dbeta):
        w = np.exp(dbeta * shifted)
        mean = w.mean()
        return np.inf if mean == 0 else w.std() / mean

    remaining = 1.0 - beta
    if weight_cv(remaining) <= target_cv:
        return remaining
    lo, hi = 0.0, remaining
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if weight_cv(mid) > target_cv:
            hi = mid
        else:
            lo = mid
    return max(hi, 1e-12)


def tmcmc_sample(log_likelihood, sample_prior, log_prior, rng: np.random.Generator,
                 settings: TmcmcSettings = TmcmcSettings()) -> np.ndarray:
    """Draw equally weighted posterior samples.

    Parameters
    ----------
    log_likelihood : callable
        Maps a parameter batch (n, d) to log-likelihood values (n,).
        May return -inf for invalid parameters.
    sample_prior : callable
        Maps (n, rng) to a prior sample batch (n, d).
    log_prior : callable
        Maps a parameter batch (n, d) to log prior density values (n,).
    """
    n = settings.n_samples
    theta = np.asarray(sample_prior(n, rng), dtype=float)
    loglik = np.asarray(log_likelihood(theta), dtype=float)
    if not np.any(np.isfinite(loglik)):
        raise InferenceError("no prior sample has finite likelihood")

    beta = 0.0
    stage = 0
    while beta < 1.0:
        stage += 1
        if stage > settings.max_stages:
            raise InferenceError(
                f"tempering did not reach beta=1 in {settings.max_stages} stages "
                f"(beta={beta:.4f})")
        dbeta = _stage_increment(loglik, beta, settings.target_weight_cv)
        beta = min(1.0, beta + dbeta)

        w = np.exp(dbeta * (loglik - loglik.max()))
        w_sum = w.sum()
        ess = w_sum**2 / np.sum(w**2)
        if ess < 2.0:
            raise InferenceError(
                f"stage {stage}: weights collapsed onto one sample "
                f"(ess={ess:.2f}, beta={beta:.4f})")
        w /= w_sum

        mu = w @ theta
        centered = theta - mu
        cov = (centered * w[:, None]).T @ centered
        cov += 1e-12 * np.trace(cov) / cov.shape[0] * np.eye(cov.shape[0])
        chol = settings.proposal_scale * np.linalg.cholesky(cov)

        idx = rng.choice(n, size=n, p=w)
        theta = theta[idx]
        loglik = loglik[idx]
        logpri = np.asarray(log_prior(theta), dtype=float)

        for _ in range(settings.n_moves):
            proposal = theta + rng.standard_normal(theta.shape) @ chol.T
            lp_prop = np.asarray(log_prior(proposal), dtype=float)
            ll_prop = np.asarray(log_likelihood(proposal), dtype=float)
            with np.errstate(invalid="ignore"):
                log_accept = beta * (ll_prop - loglik) + lp_prop - logpri
            accept = np.log(rng.random(n)) < log_accept
            theta[accept] = proposal[accept]
            loglik[accept] = ll_prop[accept]
            logpri[accept] = lp_prop[accept]

    return theta
