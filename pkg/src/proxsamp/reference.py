"""Reference ensembles: long-run full-gradient MALA with on-disk caching.

The TV metric needs a trustworthy stand-in for exact target samples. This module
runs many parallel full-gradient MALA chains with burn-in and thinning and pools
their draws. Chains initialize overdispersed: targets that expose
``overdispersed_init`` (e.g. the benchmark mixture, which draws from its
component-mode overlay with exactly balanced well assignment) use it, others
start from N(0, I). For well-separated multimodal targets the across-mode weights
of a MALA run are frozen at initialization, so supplying a mode-covering init is
what makes the pooled ensemble a valid reference.

Ensembles are cached as raw little-endian float64 C-order binaries next to a JSON
sidecar holding the shape, dtype and the full parameter key. The cache directory
is, in order: the explicit argument, the PROXSAMP_CACHE_DIR environment variable,
then ~/.cache/proxsamp. Regeneration is bit-identical, so cache files can be
verified by byte comparison.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .rng import stream
from .targets import FiniteSumTarget

__all__ = ["CACHE_DIR_ENV", "ReferenceResult", "reference_cache_dir", "reference_ensemble"]

CACHE_DIR_ENV = "PROXSAMP_CACHE_DIR"
_FORMAT_VERSION = 1


class ReferenceResult(NamedTuple):
    """Pooled reference draws (n_particles, dim) plus provenance info."""

    particles: np.ndarray
    accept_rate: float
    path: Path | None
    from_cache: bool


def reference_cache_dir(cache_dir: str | os.PathLike | None = None) -> Path:
    """Resolve the cache directory (argument > env var > ~/.cache/proxsamp)."""
    if cache_dir is not None:
        return Path(cache_dir)
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "proxsamp"


def _target_key(target: FiniteSumTarget) -> dict:
    key = {
        "class": type(target).__name__,
        "dim": target.dim,
        "n_components": target.n_components,
        "smoothness": target.smoothness,
    }
    seed = getattr(target, "seed", None)
    if seed is not None:
        key["seed"] = seed
    centers = getattr(target, "centers", None)
    if centers is not None:
        key["centers_digest"] = hashlib.blake2b(
            np.ascontiguousarray(centers, dtype="<f8").tobytes(), digest_size=16
        ).hexdigest()
    mus = getattr(target, "mus", None)
    if mus is not None:
        key["mus_digest"] = hashlib.blake2b(
            np.ascontiguousarray(mus, dtype="<f8").tobytes(), digest_size=16
        ).hexdigest()
    return key


def _mala_chains(
    target: FiniteSumTarget,
    n_chains: int,
    n_steps: int,
    burn_in: int,
    thin: int,
    step_size: float,
    seed: int,
) -> tuple[np.ndarray, float]:
    """Vectorized full-gradient MALA; returns pooled draws and accept rate.

    Generator order (one stream, ``stream(seed, "reference")``): the init draw
    (delegated to the target when it provides ``overdispersed_init``), then per
    step the (n_chains, dim) proposal noise followed by the (n_chains,)
    acceptance uniforms. Draws are collected after ``burn_in`` every ``thin``
    steps, pooled draw-major.
    """
    rng = stream(seed, "reference")
    init = getattr(target, "overdispersed_init", None)
    if init is not None:
        x = init(n_chains, rng)
    else:
        x = rng.standard_normal((n_chains, target.dim))
    energy = target.full_energy(x)
    grad = target.full_grad(x)
    scale = math.sqrt(2.0 * step_size)
    accepted = 0
    collected = []
    for t in range(1, n_steps + 1):
        xi = rng.standard_normal(x.shape)
        u = rng.uniform(size=x.shape[0])
        prop = x - step_size * grad + scale * xi
        energy_p = target.full_energy(prop)
        grad_p = target.full_grad(prop)
        phi_fwd = np.square(prop - (x - step_size * grad)).sum(axis=-1) / (4.0 * step_size)
        phi_rev = np.square(x - (prop - step_size * grad_p)).sum(axis=-1) / (4.0 * step_size)
        log_acc = (energy + phi_fwd) - (energy_p + phi_rev)
        acc = np.log(u) <= log_acc
        x = np.where(acc[:, None], prop, x)
        energy = np.where(acc, energy_p, energy)
        grad = np.where(acc[:, None], grad_p, grad)
        accepted += int(acc.sum())
        if t > burn_in and (t - burn_in) % thin == 0:
            collected.append(x.copy())
    particles = np.concatenate(collected, axis=0)
    return particles, accepted / (n_steps * x.shape[0])


def reference_ensemble(
    target: FiniteSumTarget,
    budget: int = 1_000_000,
    seed: int = 0,
    *,
    n_chains: int = 5000,
    burn_in: int = 150,
    thin: int = 2,
    min_particles: int = 100_000,
    step_size: float = 0.25,
    cache: bool = True,
    cache_dir: str | os.PathLike | None = None,
) -> ReferenceResult:
    """Build (or load) the cached full-gradient MALA reference ensemble.

    Each chain takes ``burn_in + thin * draws`` full-gradient steps with
    ``draws = ceil(min_particles / n_chains)``; the total step count must fit
    within ``budget`` (full-gradient evaluations, all chains combined).

    Args:
        target: Finite-sum target.
        budget: Total full-gradient evaluation budget.
        seed: Reference stream seed (independent of algorithm seeds).
        n_chains: Parallel chains.
        burn_in: Steps discarded per chain.
        thin: Keep every ``thin``-th step after burn-in.
        min_particles: Minimum pooled ensemble size.
        step_size: MALA proposal step size.
        cache: Read/write the on-disk cache.
        cache_dir: Cache directory override (else env var / default).

    Returns:
        ReferenceResult; ``particles`` has at least ``min_particles`` rows.

    Raises:
        ValueError: If the requested plan exceeds the budget.
    """
    if min(budget, n_chains, burn_in + 1, thin, min_particles) < 1 or step_size <= 0:
        raise ValueError("reference parameters must be positive")
    draws = math.ceil(min_particles / n_chains)
    n_steps = burn_in + thin * draws
    total = n_steps * n_chains
    if total > budget:
        raise ValueError(
            f"reference plan needs {total} full-gradient steps "
            f"(chains={n_chains}, steps/chain={n_steps}) but budget={budget}; "
            "raise the budget or lower chains/burn_in/thin/min_particles"
        )

    key = {
        "kind": "mala-reference",
        "version": _FORMAT_VERSION,
        "target": _target_key(target),
        "budget": budget,
        "seed": seed,
        "n_chains": n_chains,
        "burn_in": burn_in,
        "thin": thin,
        "min_particles": min_particles,
        "step_size": step_size,
    }
    key_json = json.dumps(key, sort_keys=True)
    digest = hashlib.blake2b(key_json.encode(), digest_size=16).hexdigest()

    bin_path = meta_path = None
    if cache:
        cdir = reference_cache_dir(cache_dir)
        bin_path = cdir / f"reference-{digest}.f64"
        meta_path = cdir / f"reference-{digest}.json"
        if bin_path.exists() and meta_path.exists():
            meta = json.loads(meta_path.read_text())
            if meta["key"] == key:
                particles = np.frombuffer(bin_path.read_bytes(), dtype="<f8").reshape(
                    meta["shape"]
                )
                return ReferenceResult(particles, meta["accept_rate"], bin_path, True)

    particles, accept_rate = _mala_chains(
        target, n_chains, n_steps, burn_in, thin, step_size, seed
    )
    if cache:
        bin_path.parent.mkdir(parents=True, exist_ok=True)
        bin_path.write_bytes(np.ascontiguousarray(particles, dtype="<f8").tobytes())
        meta = {
            "key": key,
            "shape": list(particles.shape),
            "dtype": "<f8",
            "order": "C",
            "accept_rate": accept_rate,
        }
        meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return ReferenceResult(particles, accept_rate, bin_path, False)
