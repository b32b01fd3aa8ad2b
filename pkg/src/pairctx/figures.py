"""Report figures rendered to PNG files (no display needed)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150
_IDEAL_TARGET = 1.0 / 12.0


def _errorbar(ax, x, rows, value_key, err_key, label, marker):
    y = [r[value_key] for r in rows]
    e = [r[err_key] for r in rows]
    ax.errorbar(x, y, yerr=e, label=label, marker=marker, capsize=2, linestyle="-")


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_protocol_figures(report, directory, stem: str = "protocol") -> list:
    """Render a sweep report: probabilities panel and contrast panel."""
    directory = Path(directory)
    rows = report.to_rows()
    x = [r["phi_s_deg"] for r in rows]
    paths = []

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _errorbar(ax, x, rows, "p_0a", "p_0a_err", "P(0,a)", "o")
    _errorbar(ax, x, rows, "p_a0", "p_a0_err", "P(a,0)", "s")
    _errorbar(ax, x, rows, "p_11", "p_11_err", "P(1,1)", "^")
    _errorbar(ax, x, rows, "p_aa", "p_aa_err", "P(a,a)", "d")
    ax.axhline(_IDEAL_TARGET, color="gray", linestyle=":", label="1/12")
    ax.set_xlabel("source angle (deg)")
    ax.set_ylabel("probability")
    ax.legend()
    fig.tight_layout()
    paths.append(_save(fig, directory / f"{stem}_probabilities.png"))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _errorbar(ax, x, rows, "k", "k_err", "contrast K", "o")
    ax.axhline(0.0, color="gray", linestyle="--")
    ax.axvline(report.best_phi_s.degrees, color="tab:red", linestyle=":",
               label=f"selected {report.best_phi_s.degrees:.1f} deg")
    ax.set_xlabel("source angle (deg)")
    ax.set_ylabel("contrast")
    ax.legend()
    fig.tight_layout()
    paths.append(_save(fig, directory / f"{stem}_contrast.png"))
    return paths


def save_analysis_figures(report, directory, stem: str = "analysis") -> list:
    """Render an analysis report: visibilities, probabilities, contrast."""
    directory = Path(directory)
    rows = report.to_rows()
    x = [r["phi_s_deg"] for r in rows]
    paths = []

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _errorbar(ax, x, rows, "c_hv", "c_hv_err", "C_HV", "o")
    _errorbar(ax, x, rows, "v_hv", "v_hv_err", "V_HV", "s")
    _errorbar(ax, x, rows, "w_e", "w_e_err", "W_E", "^")
    _errorbar(ax, x, rows, "purity", "purity_err", "(V, W) length", "d")
    ax.axhline(0.0, color="gray", linestyle="--")
    ax.set_xlabel("source angle (deg)")
    ax.set_ylabel("visibility / witness")
    ax.legend()
    fig.tight_layout()
    paths.append(_save(fig, directory / f"{stem}_visibilities.png"))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _errorbar(ax, x, rows, "p_0a", "p_0a_err", "P(0,a)", "o")
    _errorbar(ax, x, rows, "p_a0", "p_a0_err", "P(a,0)", "s")
    _errorbar(ax, x, rows, "p_11", "p_11_err", "P(1,1)", "^")
    _errorbar(ax, x, rows, "p_aa", "p_aa_err", "P(a,a)", "d")
    floor = [r["floor"] for r in rows]
    ax.plot(x, floor, color="gray", linestyle=":", label="accidental floor")
    ax.axhline(_IDEAL_TARGET, color="gray", linestyle="--", label="1/12")
    ax.set_xlabel("source angle (deg)")
    ax.set_ylabel("probability")
    ax.legend()
    fig.tight_layout()
    paths.append(_save(fig, directory / f"{stem}_probabilities.png"))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _errorbar(ax, x, rows, "k", "k_err", "contrast K", "o")
    ax.axhline(0.0, color="gray", linestyle="--")
    ax.set_xlabel("source angle (deg)")
    ax.set_ylabel("contrast")
    ax.legend()
    fig.tight_layout()
    paths.append(_save(fig, directory / f"{stem}_contrast.png"))
    return paths


def save_balance_fit_figure(results, crossing, path) -> Path:
    """Render the three-point balance fit: both count lines and the crossing."""
    path = Path(path)
    xs = np.array([r.phi_m.degrees for r in results], dtype=float)
    y00 = np.array([r.n_00 for r in results], dtype=float)
    y01 = np.array([r.n_01 for r in results], dtype=float)
    m0, a0 = np.polyfit(xs, y00, 1)
    m1, a1 = np.polyfit(xs, y01, 1)
    grid = np.linspace(min(xs.min(), crossing.degrees) - 0.5,
                       max(xs.max(), crossing.degrees) + 0.5, 50)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(xs, y00, "o", label="N(0,0)")
    ax.plot(xs, y01, "s", label="N(0,1)")
    ax.plot(grid, m0 * grid + a0, "-", color="tab:blue")
    ax.plot(grid, m1 * grid + a1, "-", color="tab:orange")
    ax.axvline(crossing.degrees, color="tab:red", linestyle=":",
               label=f"balance {crossing.degrees:.2f} deg")
    ax.set_xlabel("analyzer angle (deg)")
    ax.set_ylabel("coincidences")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)
