"""Shared fixtures: a fast end-to-end benchmark config and cache isolation.

The tiny config exercises every algorithm and the full CSV/JSON emission path
in a few seconds; tests that need the real shipped benchmark read
``configs/bench_d10.cfg`` instead.
"""

from __future__ import annotations

from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
SHIPPED_CONFIG = REPO_ROOT / "configs" / "bench_d10.cfg"

TINY_CONFIG_TEMPLATE = """\
# Minimal smoke-test experiment: tiny mixture, tiny budget, two seeds.
algorithms = sps-sgld, sps-mala, sgld
seeds = 0, 1
budget = 400
n_chains = 200

target.dim = 2
target.components = 5
target.seed = 3

sps.tau = 0.2, 0.4
sps.steps = 4
sps.eta = 0.5
sps.outer_batch = full
sps.inner_batch = 1

sgld.step = 0.3, 0.6
sgld.batch = 1

mala.warm_steps = 2

hist.bins = 40
hist.padding = 0.05

reference.budget = 30000
reference.chains = 100
reference.burn_in = 30
reference.thin = 2
reference.min_particles = 2000
reference.step = 0.3
reference.seed = 11

out.csv = {csv_path}
out.summary = {summary_path}
"""


@pytest.fixture()
def tiny_config_text(tmp_path):
    """Config text whose outputs land in the test's tmp directory."""

    def make(csv_name: str = "rows.csv", summary_name: str = "summary.json") -> str:
        return TINY_CONFIG_TEMPLATE.format(
            csv_path=tmp_path / csv_name, summary_path=tmp_path / summary_name
        )

    return make


@pytest.fixture()
def isolated_cache(tmp_path, monkeypatch):
    """Point the reference cache at a fresh directory for this test."""
    cache = tmp_path / "refcache"
    monkeypatch.setenv("PROXSAMP_CACHE_DIR", str(cache))
    return cache
