"""Deterministic report and plot emission.

Everything written here is byte-reproducible: floats use shortest
round-trip formatting, JSON keys are sorted, SVG output carries no
timestamps and uses a fixed hash salt, and every file is written
atomically (temp file + rename).  Each JSON report embeds the resolved
config and seed needed to regenerate it.
"""

from __future__ import annotations

import io
import json
import os
import tempfile

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "mrmlink"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import __version__  # noqa: E402


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def atomic_write_bytes(path, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_csv(path, columns: dict) -> None:
    """Write named columns as a UTF-8, LF, full-precision CSV."""
    names = list(columns)
    arrays = [np.atleast_1d(np.asarray(columns[n])) for n in names]
    n_rows = arrays[0].shape[0]
    if any(a.shape[0] != n_rows for a in arrays):
        raise ValueError("all CSV columns must have equal length")
    lines = [",".join(names)]
    for i in range(n_rows):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def write_json(path, payload: dict, resolved_config: dict | None = None,
               seed: int | None = None) -> None:
    """Write a scalar report; embeds tool version, config echo and seed."""
    doc = {"tool": "mrmlink", "version": __version__}
    if seed is not None:
        doc["seed"] = int(seed)
        doc["prng"] = "numpy-PCG64"
    if resolved_config is not None:
        doc["config"] = resolved_config
    doc.update(_jsonable(payload))
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# figure recipes


def _new_fig(plot_cfg: dict):
    return plt.figure(figsize=(plot_cfg.get("width_in", 6.4),
                               plot_cfg.get("height_in", 4.8)))


def _save_svg(fig, path) -> None:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())


def plot_spectrum(path, wavelength_nm, traces: dict, plot_cfg: dict) -> None:
    fig = _new_fig(plot_cfg)
    ax = fig.add_subplot()
    for name, gain in traces.items():
        ax.plot(wavelength_nm, gain, label=name)
    ax.set_xlabel("wavelength [nm]")
    ax.set_ylabel("power gain")
    ax.legend()
    _save_svg(fig, path)


def plot_transfer(path, curves: dict, plot_cfg: dict) -> None:
    fig = _new_fig(plot_cfg)
    ax = fig.add_subplot()
    for name, (v, g) in curves.items():
        ax.plot(v, g, label=name)
    ax.set_xlabel("normalized drive")
    ax.set_ylabel("normalized gain")
    ax.legend()
    _save_svg(fig, path)


def plot_inl(path, curves: dict, plot_cfg: dict) -> None:
    fig = _new_fig(plot_cfg)
    ax = fig.add_subplot()
    for name, (v, dev) in curves.items():
        ax.plot(v, dev, label=name)
    ax.set_xlabel("normalized drive")
    ax.set_ylabel("INL [fraction of FS]")
    ax.legend()
    _save_svg(fig, path)


def plot_two_tone(path, bin_power_db, tagged: dict, plot_cfg: dict) -> None:
    fig = _new_fig(plot_cfg)
    ax = fig.add_subplot()
    floor = -160.0
    power = np.maximum(np.asarray(bin_power_db), floor)
    ax.vlines(np.arange(power.size), floor, power, linewidth=1.0)
    for name, k in tagged.items():
        ax.annotate(name, (k, power[k]), textcoords="offset points", xytext=(0, 4),
                    ha="center", fontsize=8)
    ax.set_ylim(floor, 10.0)
    ax.set_xlabel("DFT bin")
    ax.set_ylabel("power [dBc]")
    _save_svg(fig, path)


def plot_eye(path, raster, plot_cfg: dict) -> None:
    fig = _new_fig(plot_cfg)
    ax = fig.add_subplot()
    ax.imshow(np.asarray(raster).T, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xlabel("time [bins, 2 UI]")
    ax.set_ylabel("output [bins]")
    _save_svg(fig, path)
