"""Figures for an EvalReport, written to files with the Agg backend."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from clearbench.bench.tasks import TASKS, QType  # noqa: E402

STYLE = {
    "figure.dpi": 110,
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def accuracy_heatmap(rep, path):
    keys = sorted(rep.accuracy)
    tasks = [t for t in TASKS if any(t in rep.accuracy[k] for k in keys)]
    data = np.array(
        [[np.nan if rep.accuracy[k].get(t) is None else rep.accuracy[k][t] * 100 for k in keys] for t in tasks],
        dtype=float,
    ).reshape(len(tasks), len(keys))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(1.6 + 1.1 * len(keys), 0.9 + 0.32 * len(tasks)))
        im = ax.imshow(data, cmap="Blues", vmin=0, vmax=100, aspect="auto")
        ax.set_xticks(range(len(keys)), keys, rotation=30, ha="right")
        ax.set_yticks(range(len(tasks)), tasks)
        for i in range(len(tasks)):
            for j in range(len(keys)):
                if not np.isnan(data[i, j]):
                    ax.text(j, i, f"{data[i, j]:.1f}", ha="center", va="center", fontsize=7,
                            color="white" if data[i, j] > 60 else "black")
        fig.colorbar(im, ax=ax, label="accuracy (%)")
        ax.set_title("Accuracy by task")
        return _save(fig, path)


def qtype_bars(rep, path):
    keys = sorted(rep.b2)
    qtypes = [q.value for q in QType]
    width = 0.8 / max(1, len(keys))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 3.4))
        x = np.arange(len(qtypes))
        for i, k in enumerate(keys):
            vals = [rep.b2[k]["qtypes"].get(q) for q in qtypes]
            ax.bar(x + i * width, [0 if v is None else v * 100 for v in vals], width, label=k)
        ax.set_xticks(x + width * (len(keys) - 1) / 2, qtypes)
        ax.set_ylabel("accuracy (%)")
        ax.set_ylim(0, 100)
        ax.set_title("Accuracy by question type")
        if keys:
            ax.legend(fontsize=7, frameon=False)
        return _save(fig, path)


def style_deltas(rep, path):
    models = sorted(rep.b3)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, max(1, len(models)), figsize=(3.2 * max(1, len(models)), 3.2), squeeze=False)
        for ax, model in zip(axes[0], models):
            body = rep.b3[model]
            tasks = list(body["deltas"])
            styles = list(body["mean"])
            width = 0.8 / max(1, len(styles))
            x = np.arange(len(tasks))
            for i, s in enumerate(styles):
                ax.bar(x + i * width, [body["deltas"][t][s] for t in tasks], width, label=s)
            ax.axhline(0, color="black", lw=0.6)
            ax.set_xticks(x + width * (len(styles) - 1) / 2, tasks, rotation=45)
            ax.set_title(model)
            ax.set_ylabel("delta vs basic (points)")
            ax.legend(fontsize=7, frameon=False)
        return _save(fig, path)


def chain_lines(rep, path):
    keys = sorted(rep.b4)
    chains = [v["chain"] for v in rep.b4[keys[0]]] if keys else []
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, max(1, len(chains)), figsize=(3.0 * max(1, len(chains)), 3.0), squeeze=False)
        for j, chain in enumerate(chains):
            ax = axes[0][j]
            for k in keys:
                accs = rep.b4[k][j]["accuracies"]
                ax.plot(range(len(chain)), [np.nan if a is None else a * 100 for a in accs], marker="o", label=k)
            ax.axhline(50, color="grey", ls="--", lw=0.8)
            ax.set_xticks(range(len(chain)), chain)
            ax.set_ylim(0, 100)
            ax.set_title(" -> ".join(chain))
            ax.set_ylabel("YN accuracy (%)")
        if keys:
            axes[0][0].legend(fontsize=7, frameon=False)
        return _save(fig, path)


def render_figures(rep, out_dir) -> list:
    """Write every figure that has data; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if rep.accuracy:
        paths.append(accuracy_heatmap(rep, os.path.join(out_dir, "accuracy_by_task.png")))
        paths.append(qtype_bars(rep, os.path.join(out_dir, "accuracy_by_qtype.png")))
    if rep.b3:
        paths.append(style_deltas(rep, os.path.join(out_dir, "style_deltas.png")))
    if rep.b4:
        paths.append(chain_lines(rep, os.path.join(out_dir, "chains.png")))
    return paths
