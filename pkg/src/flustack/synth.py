"""Deterministic synthetic multi-source panels.

The real hospital-visit, microblog, survey and search feeds are
proprietary or retired, so the toolkit ships a generator producing a
latent seasonal %ILI curve plus noisy source signals around it.  The
optional bias episode inflates one source during the peak of the last
complete season, mimicking the documented overshoot of a retired search
-based estimator.  Output is a pure function of the config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .epiweek import EpiWeek, from_label
from .vintages import VintagedObservation, VintagedSeries

SEASON_WEEKS = 52
MIN_WEEKS = 104

DEFAULT_SOURCES = ("cdc", "fny", "ath", "gt", "gft", "twt")
DEFAULT_LAGS = {"cdc": 2, "fny": 1, "ath": 1, "gt": 1, "gft": 1, "twt": 1}

N_QUERIES = 100
N_INFORMATIVE = 10


@dataclass(frozen=True)
class BiasEpisode:
    source: str = "gft"
    multiplier: float = 1.15
    weeks: Optional[tuple] = None  # None -> peak +/- 4 of last complete season


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 42
    n_weeks: int = 180
    start: EpiWeek = field(default_factory=lambda: from_label("2012-W34"))
    sources: tuple = DEFAULT_SOURCES
    bias_episode: Optional[BiasEpisode] = field(default_factory=BiasEpisode)

    def __post_init__(self):
        if self.n_weeks < MIN_WEEKS:
            raise ValueError(f"n_weeks must be >= {MIN_WEEKS}, got {self.n_weeks}")
        if "cdc" not in self.sources:
            raise ValueError("the cdc source cannot be disabled")
        unknown = set(self.sources) - set(DEFAULT_SOURCES)
        if unknown:
            raise ValueError(f"unknown sources {sorted(unknown)}")


def generate_panel(cfg: SynthConfig):
    """Return (panel, truth): per-source VintagedSeries plus the latent curve."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_weeks
    weeks = [cfg.start + i for i in range(n)]
    n_seasons = math.ceil(n / SEASON_WEEKS)

    amps = rng.uniform(1.5, 3.5, n_seasons)
    peaks = rng.uniform(20.0, 30.0, n_seasons)
    eta = rng.normal(0.0, 0.05, n)
    idx = np.arange(n)
    season = idx // SEASON_WEEKS
    pos = idx % SEASON_WEEKS
    truth = 0.8 + amps[season] * np.exp(-((pos - peaks[season]) ** 2) / 32.0) + eta
    truth = np.maximum(truth, 0.2)

    episode_mask = np.zeros(n, dtype=bool)
    episode = cfg.bias_episode
    if episode is not None:
        if episode.weeks is not None:
            lookup = {w: i for i, w in enumerate(weeks)}
            for w in episode.weeks:
                if w in lookup:
                    episode_mask[lookup[w]] = True
        else:
            last_full = n // SEASON_WEEKS - 1
            center = last_full * SEASON_WEEKS + int(round(peaks[last_full]))
            lo = max(0, center - 4)
            hi = min(n, center + 5)
            episode_mask[lo:hi] = True

    cdc_noise = rng.normal(0.0, 0.05, n)
    release_noise = rng.normal(0.0, 0.03, n)
    ath_noise = rng.normal(0.0, 0.08, n)
    gft_noise = rng.normal(0.0, 0.10, n)
    fny_noise = rng.normal(0.0, 0.12, n)
    twt_noise = rng.normal(0.0, 0.10, n)
    gt_coeffs = rng.uniform(0.5, 1.5, N_INFORMATIVE)
    gt_inf_noise = rng.normal(0.0, 0.30, (n, N_INFORMATIVE))
    gt_pure_noise = rng.normal(0.0, 0.30, (n, N_QUERIES - N_INFORMATIVE))

    panel = {}

    cdc_final = np.maximum(truth + cdc_noise, 0.0)
    cdc_first = np.maximum(cdc_final * (1.0 + release_noise), 0.0)
    obs = []
    for i, w in enumerate(weeks):
        obs.append(VintagedObservation(w, w + DEFAULT_LAGS["cdc"], float(cdc_first[i])))
        obs.append(VintagedObservation(w, w + DEFAULT_LAGS["cdc"] + 2, float(cdc_final[i])))
    panel["cdc"] = VintagedSeries("cdc", tuple(obs), unit="percent_ili")

    def scalar_series(source, values, unit="percent_ili"):
        vals = np.maximum(values, 0.0)
        lag = DEFAULT_LAGS[source]
        return VintagedSeries(
            source,
            tuple(
                VintagedObservation(w, w + lag, float(vals[i]))
                for i, w in enumerate(weeks)
            ),
            unit=unit,
        )

    if "ath" in cfg.sources:
        panel["ath"] = scalar_series("ath", 0.8 * truth + 0.3 + ath_noise)
    if "gft" in cfg.sources:
        factor = np.ones(n)
        if episode is not None and episode.source == "gft":
            factor[episode_mask] = episode.multiplier
        panel["gft"] = scalar_series("gft", truth * factor + gft_noise)
    if "fny" in cfg.sources:
        panel["fny"] = scalar_series("fny", 0.9 * truth + 0.2 + fny_noise)
    if "twt" in cfg.sources:
        panel["twt"] = scalar_series("twt", 0.5 * truth + twt_noise, unit="raw_volume")
    if "gt" in cfg.sources:
        q = np.empty((n, N_QUERIES))
        q[:, :N_INFORMATIVE] = gt_coeffs[None, :] * truth[:, None] + gt_inf_noise
        q[:, N_INFORMATIVE:] = gt_pure_noise
        np.maximum(q, 0.0, out=q)
        lag = DEFAULT_LAGS["gt"]
        panel["gt"] = VintagedSeries(
            "gt",
            tuple(
                VintagedObservation(w, w + lag, q[i].copy()) for i, w in enumerate(weeks)
            ),
            unit="raw_volume",
        )

    truth_map = {w: float(truth[i]) for i, w in enumerate(weeks)}
    return panel, truth_map


def synth_config_from_dict(d: dict) -> SynthConfig:
    episode = d.get("bias_episode")
    ep = None
    if episode is not None:
        weeks = episode.get("weeks")
        ep = BiasEpisode(
            source=episode.get("source", "gft"),
            multiplier=float(episode.get("multiplier", 1.15)),
            weeks=tuple(from_label(w) for w in weeks) if weeks is not None else None,
        )
    return SynthConfig(
        seed=int(d.get("seed", 42)),
        n_weeks=int(d.get("n_weeks", 180)),
        start=from_label(d.get("start", "2012-W34")),
        sources=tuple(d.get("sources", DEFAULT_SOURCES)),
        bias_episode=ep,
    )


def synth_config_to_dict(cfg: SynthConfig) -> dict:
    ep = None
    if cfg.bias_episode is not None:
        ep = {
            "source": cfg.bias_episode.source,
            "multiplier": cfg.bias_episode.multiplier,
            "weeks": (
                [str(w) for w in cfg.bias_episode.weeks]
                if cfg.bias_episode.weeks is not None
                else None
            ),
        }
    return {
        "seed": cfg.seed,
        "n_weeks": cfg.n_weeks,
        "start": str(cfg.start),
        "sources": list(cfg.sources),
        "bias_episode": ep,
    }
