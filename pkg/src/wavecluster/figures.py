"""Figure rendering for the CLI report paths.

Every function takes plain arrays plus an output path, draws one figure
with the non-interactive Agg backend, writes it, and returns the path.
Rendering is always additive: the delimited outputs carry the same data.
"""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

logger = logging.getLogger(__name__)

_RC = {
    "figure.dpi": 130,
    "savefig.bbox": "tight",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    logger.info("wrote figure %s", path)
    return path


def eigenvector_figure(
    estimated: np.ndarray, oracle: np.ndarray, path: str | Path
) -> Path:
    """Estimated mode coefficients next to the oracle eigenvector, per node."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4))
        nodes = np.arange(len(oracle))
        scale = np.abs(oracle).max() / max(np.abs(estimated).max(), 1e-300)
        ax.plot(nodes, estimated * scale, "o", label="wave/DMD (rescaled)", alpha=0.8)
        ax.plot(nodes, oracle, "x", label="classical oracle", alpha=0.8)
        ax.axhline(0.0, color="black", lw=0.8)
        ax.set_xlabel("node")
        ax.set_ylabel("second-mode component")
        ax.legend()
        return _save(fig, path)


def trajectory_figure(samples: np.ndarray, path: str | Path, max_nodes: int = 12) -> Path:
    """Per-node wave amplitude against time for the first few nodes."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4))
        show = min(samples.shape[0], max_nodes)
        for i in range(show):
            ax.plot(samples[i], lw=1.0, label=f"node {i}" if show <= 6 else None)
        ax.set_xlabel("time step")
        ax.set_ylabel("amplitude")
        if show <= 6:
            ax.legend()
        return _save(fig, path)


def spectrum_figure(
    estimated: np.ndarray, oracle: np.ndarray, path: str | Path
) -> Path:
    """Recovered eigenvalue estimates over the oracle spectrum."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(np.arange(len(oracle)), oracle, "x", label="oracle", alpha=0.8)
        ax.plot(
            np.arange(len(estimated)),
            estimated,
            "o",
            label="wave/DMD",
            alpha=0.8,
            fillstyle="none",
        )
        ax.set_xlabel("index (ascending)")
        ax.set_ylabel("eigenvalue")
        ax.legend()
        return _save(fig, path)


def settle_time_figure(times: np.ndarray, path: str | Path) -> Path:
    """Distribution of analog settle times across benchmark trials."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.hist(times, bins=min(30, max(5, len(times) // 4)))
        ax.set_xlabel("settle time")
        ax.set_ylabel("trials")
        return _save(fig, path)
