"""Figure rendering for sweep reports. Uses the non-interactive Agg backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "single-vacuum": dict(color="black", lw=1.5, label="single cavity (SQL-limited)"),
    "single-squeezed": dict(color="0.5", lw=1.2, ls=":", label="single cavity, squeezed input"),
    "hybrid-ideal": dict(color="tab:blue", lw=1.5, ls="--", label="hybrid spin-optomechanical"),
    "dual-lossless": dict(color="tab:green", lw=1.2, ls="-.", label="double cavity, lossless"),
    "dual-lossy": dict(color="tab:red", lw=1.8, label="double cavity"),
    "dual-lossy-pivot": dict(color="tab:orange", lw=1.2, ls="--", label="double cavity, pivot motion"),
}


def plot_spectra(spectra, path, title=None):
    """Noise relative to the SQL in dB against frequency, one line per scheme."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for s in spectra:
        ax.semilogx(s.freqs_hz, s.psd_db, **STYLE.get(s.scheme.value, {"label": s.scheme.value}))
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("noise / SQL [dB]")
    ax.set_xlim(spectra[0].freqs_hz[0], spectra[0].freqs_hz[-1])
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(frameon=False, fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
