"""Success-rate and average-cost figures, one pair per (w, d) group."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def _groups(report) -> dict:
    out: dict = {}
    for (w, d, label), pts in report.series().items():
        out.setdefault((w, d), {})[label] = pts
    return out


def plot_report(report, out_dir) -> list[Path]:
    """Write success_w{w}_d{d}.png and cost_w{w}_d{d}.png; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for (w, d), series in sorted(_groups(report).items()):
        for what, col, ylabel in (("success", 1, "success rate (%)"), ("cost", 2, "average cost |A|")):
            fig, ax = plt.subplots(figsize=(5.0, 3.5))
            for label, pts in series.items():
                xs = [p[0] for p in pts if p[col] is not None]
                ys = [p[col] for p in pts if p[col] is not None]
                if xs:
                    ax.plot(xs, ys, marker="o", label=label)
            ax.set_xlabel("n")
            ax.set_ylabel(ylabel)
            ax.set_title(f"w={w}, d={d}")
            if what == "success":
                ax.set_ylim(-5, 105)
            ax.grid(alpha=0.3)
            if ax.lines:
                ax.legend(fontsize=7)
            fig.tight_layout()
            path = out_dir / f"{what}_w{w}_d{d}.png"
            fig.savefig(path, dpi=120)
            plt.close(fig)
            written.append(path)
    return written
