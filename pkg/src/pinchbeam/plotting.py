"""Figure rendering for experiment results (PNG next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_XLABELS = {
    "sweep_power": "Transmit power (dBm)",
    "sweep_users": "Number of users K",
    "sweep_area": "Region side length D (m)",
    "single": "Transmit power (dBm)",
}

_SCHEME_STYLE = {
    "pas_fpbcd": ("o-", "PAS, FP-BCD"),
    "fixed_fpbcd": ("s--", "Fixed array, FP-BCD"),
    "fixed_zf": ("^--", "Fixed array, ZF"),
    "pas_zf_fixed_locations": ("v-", "PAS (initial locations), ZF"),
    "mrt": ("d--", "Fixed array, MRT"),
}


def _style_for(label: str):
    for scheme, (fmt, pretty) in _SCHEME_STYLE.items():
        if label == scheme:
            return fmt, pretty
        if label.startswith(scheme):
            return fmt, label.replace(scheme, pretty, 1)
    return "o-", label


def render_result(result, path) -> None:
    """Render an ExperimentResult to an image file."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    if result.kind == "convergence":
        for curve in result.curves:
            ax.plot(np.arange(len(curve.mean_objective_bits)),
                    curve.mean_objective_bits, label=curve.label)
        ax.set_xlabel("Outer iteration")
        ax.set_ylabel("Mean objective (bits/s/Hz)")
    else:
        labels = sorted({p.scheme for p in result.points},
                        key=lambda s: [p.scheme for p in result.points].index(s))
        for label in labels:
            pts = [p for p in result.points if p.scheme == label]
            x = [p.sweep_value for p in pts]
            y = [p.mean_bits for p in pts]
            err = [p.std_bits for p in pts]
            fmt, pretty = _style_for(label)
            ax.errorbar(x, y, yerr=err, fmt=fmt, capsize=3, label=pretty)
        ax.set_xlabel(_XLABELS.get(result.kind, "Sweep value"))
        ax.set_ylabel("Mean weighted sum-rate (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
