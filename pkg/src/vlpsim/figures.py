"""Render experiment results to figure files alongside the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import AccuracyResult, CoverageResult, ImageNoiseResult, TimingResult

_STYLE = {
    "eca-rssr": dict(color="tab:blue", marker="o"),
    "eca-rssr-basic": dict(color="tab:blue", marker="o"),
    "eca-rssr-comp": dict(color="tab:cyan", marker="s"),
    "ca-rssr": dict(color="tab:orange", marker="^"),
    "pnp": dict(color="tab:green", marker="v"),
    "rssr": dict(color="tab:red", marker="x"),
    "rssr-ideal": dict(color="tab:red", marker="x"),
    "rssr-portable": dict(color="tab:purple", marker="+"),
}


def _style(algorithm: str) -> dict:
    return _STYLE.get(algorithm, dict(marker="."))


def save_coverage_figure(results: list[CoverageResult], dimension: str,
                         path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    fovs = [r.fov_deg for r in sorted(results, key=lambda r: r.fov_deg)]
    algorithms = sorted(results[0].cr) if results else []
    for algorithm in algorithms:
        crs = [r.cr[algorithm] for r in sorted(results, key=lambda r: r.fov_deg)]
        ax.plot(fovs, crs, label=algorithm, **_style(algorithm))
    ax.set_xlabel("receiver field of view (deg)")
    ax.set_ylabel("coverage ratio")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"Coverage vs field of view ({dimension.upper()})")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_cdf_figure(result: AccuracyResult, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    for (algorithm, dpc_cm) in sorted(result.records):
        pes = np.sort(result.pes(algorithm, dpc_cm))
        if pes.size == 0:
            continue
        cdf = np.arange(1, pes.size + 1) / pes.size
        ax.plot(pes * 100.0, cdf, label=f"{algorithm}, offset {dpc_cm:g} cm",
                **{k: v for k, v in _style(algorithm).items() if k != "marker"})
    ax.set_xlabel("positioning error (cm)")
    ax.set_ylabel("CDF")
    ax.set_xlim(left=0.0)
    ax.set_ylim(0.0, 1.02)
    ax.set_title(f"{result.kind} error CDF ({result.dimension.upper()})")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_image_noise_figure(result: ImageNoiseResult, path: str) -> str:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    keys = sorted({(alg, dpc) for (_, alg, dpc, _, _) in result.rows})
    for (algorithm, dpc_cm) in keys:
        rows = sorted(r for r in result.rows if r[1] == algorithm and r[2] == dpc_cm)
        sig = [r[0] for r in rows]
        ax1.plot(sig, [r[3] * 100.0 for r in rows],
                 label=f"{algorithm}, offset {dpc_cm:g} cm", **_style(algorithm))
        ax2.plot(sig, [r[4] * 100.0 for r in rows],
                 label=f"{algorithm}, offset {dpc_cm:g} cm", **_style(algorithm))
    ax1.set_xlabel("pixel noise std (px)")
    ax1.set_ylabel("mean positioning error (cm)")
    ax2.set_xlabel("pixel noise std (px)")
    ax2.set_ylabel("errors beyond 1 m (%)")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.suptitle(f"Image-noise sensitivity ({result.dimension.upper()})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_timing_figure(result: TimingResult, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    algorithms = sorted(result.stats)
    medians = [result.stats[a][0] * 1e3 for a in algorithms]
    ax.bar(algorithms, medians, color=[_style(a).get("color", "grey")
                                       for a in algorithms])
    ax.set_ylabel("median time per estimate (ms)")
    if medians and min(medians) > 0:
        ax.set_yscale("log")
    ax.set_title(f"Execution time ({result.dimension.upper()})")
    ax.grid(True, axis="y", alpha=0.3)
    plt.setp(ax.get_xticklabels(), rotation=20, ha="right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
