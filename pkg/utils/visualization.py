# utils/visualization.py
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from config.settings import settings
from core.diagnostics import InvariantSeries
from core.observability import observability

DEVIATION_PANELS = ("h", "f1", "f2", "K")


class VisualizationManager:
    """Renders invariant deviations and convergence plots to image files"""

    def __init__(self, dpi: Optional[int] = None):
        self.observability = observability
        self.dpi = dpi or settings.PLOT_DPI
        self._setup_plotting_style()

    def _setup_plotting_style(self):
        sns.set_style("whitegrid")
        plt.rcParams['figure.figsize'] = (10, 6)
        plt.rcParams['font.size'] = 10

    def deviations_frame(self, series_by_run: Dict[str, InvariantSeries],
                         invariants: Iterable[str] = DEVIATION_PANELS) -> pd.DataFrame:
        """Long-form frame of v(t) - v(0) with columns t, run, invariant, deviation"""
        parts = []
        for run, series in series_by_run.items():
            for name in invariants:
                values = series[name]
                parts.append(pd.DataFrame({
                    "t": series.times,
                    "run": run,
                    "invariant": name,
                    "deviation": values - values[0],
                }))
        return pd.concat(parts, ignore_index=True)

    def create_deviation_figure(self, series_by_run: Dict[str, InvariantSeries],
                                invariants: Sequence[str] = DEVIATION_PANELS) -> plt.Figure:
        """One panel per invariant, one line per run"""
        data = self.deviations_frame(series_by_run, invariants)
        ncols = 2
        nrows = int(np.ceil(len(invariants) / ncols))
        fig, axes = plt.subplots(nrows, ncols, figsize=(12, 4 * nrows), squeeze=False)
        for ax, name in zip(axes.flat, invariants):
            sns.lineplot(data=data[data["invariant"] == name], x="t", y="deviation",
                         hue="run", ax=ax, linewidth=0.8, errorbar=None)
            ax.set_title(f"{name}(t) - {name}(0)")
            ax.set_xlabel("t")
            ax.set_ylabel("deviation")
        for ax in list(axes.flat)[len(invariants):]:
            ax.set_visible(False)
        fig.tight_layout()
        return fig

    def create_convergence_figure(self, errors_by_method: Dict[str, Sequence[Tuple[float, float]]],
                                  orders: Optional[Dict[str, float]] = None) -> plt.Figure:
        """Global error against dt on log-log axes"""
        orders = orders or {}
        fig, ax = plt.subplots(figsize=(8, 6))
        for method, pairs in errors_by_method.items():
            dts, errs = np.asarray(pairs, dtype=np.float64).T
            label = f"{method} (order {orders[method]:.2f})" if method in orders else method
            ax.loglog(dts, errs, marker="o", label=label)
        ax.set_xlabel("dt")
        ax.set_ylabel("global error at t_final")
        ax.legend()
        fig.tight_layout()
        return fig

    def save_figure(self, fig: plt.Figure, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fig.savefig(path, dpi=self.dpi)
            self.observability.log_info("Saved figure", path=str(path))
        finally:
            plt.close(fig)
        return path
