"""Figure rendering for benchmark reports.

All figures are written to files with the Agg backend; nothing is shown
interactively.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_METHOD_LABELS = {
    "none": "Original",
    "condica": "Conditional ICA",
    "ica": "ICA",
    "cov": "Covariance",
    "icacov": "ICA + Covariance",
}


def plot_accuracy_bars(report, path, chance=None, title=None):
    """Grouped bars of mean accuracy per method, one group per classifier."""
    methods = list(dict.fromkeys(c.method for c in report.cells))
    classifiers = list(dict.fromkeys(c.classifier for c in report.cells))
    width = 0.8 / max(len(methods), 1)
    x = np.arange(len(classifiers))

    fig, ax = plt.subplots(figsize=(1.8 + 1.6 * len(classifiers), 3.6))
    for i, method in enumerate(methods):
        means = [report.cell(method, clf).mean_accuracy for clf in classifiers]
        stds = [report.cell(method, clf).std_accuracy for clf in classifiers]
        ax.bar(x + (i - (len(methods) - 1) / 2) * width, means, width,
               yerr=stds, capsize=2, label=_METHOD_LABELS.get(method, method))
    if chance is not None:
        ax.axhline(chance, color="k", ls="--", lw=0.8, label="chance")
    ax.set_xticks(x)
    ax.set_xticklabels([c.upper() for c in classifiers])
    ax.set_ylabel("accuracy")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sensitivity_curve(points, path, classifier="lda"):
    """Mean accuracy vs component count, error bars = std across splits."""
    ok = [p for p in points if p.error is None]
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    if ok:
        ks = [p.k for p in ok]
        means = [p.mean_accuracy for p in ok]
        stds = [p.std_accuracy for p in ok]
        ax.errorbar(ks, means, yerr=stds, marker="o", capsize=3)
        ax.set_xscale("log", base=2)
    ax.set_xlabel("components k")
    ax.set_ylabel(f"{classifier.upper()} accuracy")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
