"""Serialization of profiles, surface meshes and plots.

All writers are deterministic and write atomically (temp file + rename).
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .ode_core import ModelParams, Profile, StepStats, extend_by_symmetry

CSV_COLUMNS = ("r", "u", "slope", "v", "psi", "residual")


def atomic_write(path, data: str | bytes) -> Path:
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": "", "encoding": "utf-8"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# profiles -----------------------------------------------------------------


def profile_csv(p: Profile, shift: float = 0.0) -> str:
    """CSV text with 10 significant digits; heights are reported as ``u - shift``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    cols = (p.r, p.u - shift, p.slope, p.v, p.psi, p.residuals)
    for row in zip(*cols):
        w.writerow([f"{x:.10g}" for x in row])
    return buf.getvalue()


def profile_record(p: Profile, shift: float = 0.0, ctrl: dict | None = None, diagnostics: dict | None = None) -> dict:
    """Structured record ``{params, ctrl, samples, diagnostics}`` at full precision."""
    params = asdict(p.params)
    params["shift"] = shift
    diag = {"max_residual": p.max_residual, "n_samples": len(p)}
    diag.update(diagnostics or {})
    return {
        "params": params,
        "ctrl": ctrl if ctrl is not None else asdict(p.step_stats),
        "samples": {"r": p.r.tolist(), "u": p.u.tolist(), "v": p.v.tolist()},
        "diagnostics": diag,
    }


def export_profile(p: Profile, path, fmt: str | None = None, shift: float = 0.0, **record_kw) -> Path:
    """Write ``p`` as ``csv`` or ``json`` (chosen from the suffix when ``fmt`` is None)."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "csv":
        return atomic_write(path, profile_csv(p, shift))
    if fmt == "json":
        return atomic_write(path, json.dumps(profile_record(p, shift, **record_kw), indent=1, sort_keys=True) + "\n")
    raise DomainError(f"unknown profile format {fmt!r}")


def load_profile(path) -> Profile:
    """Read a JSON profile record; samples round-trip bit-identically."""
    rec = json.loads(Path(path).read_text(encoding="utf-8"))
    prm = rec["params"]
    params = ModelParams(prm["kappa"], prm["u0"], prm.get("lam", 0.0))
    ctrl = rec.get("ctrl") or {}
    try:
        stats = StepStats(**ctrl)
    except TypeError:
        stats = StepStats("imported", 0, 0.0, 0.0, 0.0, 0)
    s = rec["samples"]
    return Profile(params, s["r"], s["u"], s["v"], stats)


# meshes -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Cylindrical surface swept from the directrix (r, u(r)) along x2.

    ``vertices[i * n_cross + j] = (r_i, t_j, u_i)``; every ruling i is the
    horizontal segment at height ``u_i``.
    """

    vertices: np.ndarray
    faces: np.ndarray
    n_rulings: int
    n_cross: int

    def directrix(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vertices[:: self.n_cross]
        return v[:, 0], v[:, 2]

    def rulings_horizontal(self) -> bool:
        z = self.vertices[:, 2].reshape(self.n_rulings, self.n_cross)
        return bool(np.all(z == z[:, :1]))


def build_mesh(
    p: Profile,
    half_width: float,
    n_rulings: int | None = None,
    n_cross: int = 2,
    shift: float = 0.0,
    symmetric: bool = False,
) -> SurfaceMesh:
    """Mesh of ``x(s, t) = alpha(s) + t e2``, ``t`` in ``[-half_width, half_width]``.

    ``n_rulings`` resamples the directrix uniformly (quintic Hermite);
    ``None`` uses the profile samples.  ``symmetric`` first reflects the
    profile about r=0.
    """
    if half_width <= 0:
        raise DomainError("half_width must be positive")
    if n_cross < 2:
        raise DomainError("n_cross must be >= 2")
    if symmetric:
        p = extend_by_symmetry(p)
    if n_rulings is None:
        r, u = p.r, p.u
    else:
        if n_rulings < 2:
            raise DomainError("n_rulings must be >= 2")
        r = np.linspace(p.r[0], p.r[-1], n_rulings)
        u = np.asarray(p.u_at(r))
    x3 = u - shift
    t = np.linspace(-half_width, half_width, n_cross)
    nr = r.size
    verts = np.empty((nr * n_cross, 3))
    verts[:, 0] = np.repeat(r, n_cross)
    verts[:, 1] = np.tile(t, nr)
    verts[:, 2] = np.repeat(x3, n_cross)
    i, j = np.meshgrid(np.arange(nr - 1), np.arange(n_cross - 1), indexing="ij")
    base = (i * n_cross + j).ravel()
    faces = np.column_stack([base, base + n_cross, base + n_cross + 1, base + 1])
    return SurfaceMesh(verts, faces, nr, n_cross)


def mesh_obj(mesh: SurfaceMesh, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.extend(f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist())
    lines.extend("f " + " ".join(str(k + 1) for k in face) for face in mesh.faces.tolist())
    return "\n".join(lines) + "\n"


def read_obj(path) -> SurfaceMesh:
    verts, faces = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(x.split("/")[0]) - 1 for x in parts[1:]])
    verts = np.array(verts)
    n_cross = int(np.argmax(verts[1:, 0] != verts[0, 0]) + 1) if len(verts) > 1 else 1
    return SurfaceMesh(verts, np.array(faces), len(verts) // n_cross, n_cross)


def export_mesh(
    p: Profile,
    path,
    half_width: float,
    n_rulings: int | None = None,
    shift: float = 0.0,
    symmetric: bool = False,
    n_cross: int = 2,
) -> SurfaceMesh:
    """Write the swept surface as a Wavefront OBJ file and return the mesh."""
    mesh = build_mesh(p, half_width, n_rulings, n_cross, shift, symmetric)
    pr = p.params
    atomic_write(path, mesh_obj(mesh, f"stationary band kappa={pr.kappa!r} u0={pr.u0!r} shift={shift!r}"))
    return mesh


def mesh_curvature_residual(mesh: SurfaceMesh, kappa: float, shift: float = 0.0) -> tuple[float, float]:
    """Max |u''_h / (1 - u'_h^2)^(3/2) - kappa u| over interior directrix nodes.

    Central second-order differences on a uniform directrix; returns
    ``(residual, h)``.
    """
    r, x3 = mesh.directrix()
    h = np.diff(r)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise DomainError("directrix must be uniformly sampled")
    h = float(h[0])
    u = x3 + shift
    d1 = (u[2:] - u[:-2]) / (2 * h)
    d2 = (u[2:] - 2 * u[1:-1] + u[:-2]) / (h * h)
    c = d2 / (1 - d1 * d1) ** 1.5
    return float(np.max(np.abs(c - kappa * u[1:-1]))), h


# plots --------------------------------------------------------------------


def plot_profiles(
    profiles: Sequence[Profile],
    path,
    overlays: Iterable[tuple[str, object]] = (),
    envelope: tuple[object, object] | None = None,
    labels: Sequence[str] | None = None,
    r_range: tuple[float, float] | None = None,
    title: str | None = None,
) -> Path:
    """SVG plot of r vs u with optional hyperbola overlays and a shaded envelope.

    ``overlays`` are ``(label, callable)`` pairs evaluated on each profile's
    r-grid; ``envelope`` is a ``(lower, upper)`` pair shaded between.
    Output is byte-identical for identical input.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "bandsolve", "svg.fonttype": "none", "path.simplify": False}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for i, p in enumerate(profiles):
            lab = labels[i] if labels else f"kappa={p.params.kappa:g}, u0={p.params.u0:.6g}"
            ax.plot(p.r, p.u, lw=1.5, label=lab)
        lo, hi = r_range if r_range else (min(p.r[0] for p in profiles), max(p.r[-1] for p in profiles))
        rr = np.linspace(lo, hi, 400)
        for name, y in overlays:
            ax.plot(rr, y(rr), lw=1.0, ls="--", label=name)
        if envelope is not None:
            ax.fill_between(rr, envelope[0](rr), envelope[1](rr), alpha=0.15, color="gray", label="envelope")
        ax.set_xlabel("r")
        ax.set_ylabel("u")
        if title:
            ax.set_title(title)
        ax.legend(fontsize=7)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return atomic_write(path, buf.getvalue())
