"""PNG renderings of the path and moment-surface figures."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_paths", "plot_surface"]


def plot_paths(t: np.ndarray, values: np.ndarray, path: str | Path, n_show: int = 8,
               title: str = "squared bridge paths") -> Path:
    """Line plot of the first ``n_show`` columns of ``values`` against t."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for j in range(min(n_show, values.shape[1])):
        ax.plot(t, values[:, j], lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("f(t)^2")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_surface(x: np.ndarray, s: np.ndarray, phi: np.ndarray, path: str | Path,
                 title: str = "moment operator surface") -> Path:
    """Surface of ``phi[i, k] = Phi(x_i, s_k)``."""
    X, S = np.meshgrid(x, s, indexing="ij")
    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(projection="3d")
    stride = max(1, s.size // 200)
    ax.plot_surface(X[:, ::stride], S[:, ::stride], phi[:, ::stride], cmap="viridis", linewidth=0)
    ax.set_xlabel("x")
    ax.set_ylabel("s")
    ax.set_zlabel("phi")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
