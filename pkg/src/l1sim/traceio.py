"""CSV serialization of simulation traces.

Values are written with 17 significant digits, which round-trips IEEE
doubles exactly, so metrics recomputed from a re-parsed file match the
originals bit for bit.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .engine import SimTrace


def csv_header(n: int, m: int, k: int) -> str:
    """Column header for a trace with n states, m inputs and k unmatched channels."""
    cols = ["t", "r", "y", "y_M"]
    cols += ["u_a"] if m == 1 else [f"u_a_{i + 1}" for i in range(m)]
    cols += [f"sigma1_{i + 1}" for i in range(m)]
    cols += [f"sigma2_{i + 1}" for i in range(k)]
    cols += [f"x_{i + 1}" for i in range(n)]
    cols += [f"xhat_{i + 1}" for i in range(n)]
    return ",".join(cols)


def emit_csv(trace: SimTrace, path) -> Path:
    """Write one row per sample; returns the written path."""
    path = Path(path)
    n = trace.x.shape[1]
    m = trace.u_a.shape[1]
    k = trace.sigma2.shape[1]
    data = np.column_stack(
        [trace.t, trace.r, trace.y, trace.y_m, trace.u_a, trace.sigma1, trace.sigma2, trace.x, trace.x_hat]
    )
    lines = [csv_header(n, m, k)]
    for row in data:
        lines.append(",".join(format(v, ".17g") for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def load_csv(path, label: str = "") -> SimTrace:
    """Re-read an emitted trace; the prediction error is rebuilt from x and x_hat."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: row width {data.shape[1]} does not match header {len(header)}")

    def block(prefix: str) -> list[int]:
        return [i for i, name in enumerate(header) if name == prefix or name.startswith(prefix + "_")]

    m = len(block("u_a"))
    sig1 = block("sigma1")
    sig2 = block("sigma2")
    xs = block("x")
    xh = block("xhat")
    if not (m and sig1 and xs and xh) or len(xs) != len(xh):
        raise ValueError(f"{path}: header does not match the trace schema: {header}")
    x = data[:, xs]
    x_hat = data[:, xh]
    return SimTrace(
        t=data[:, 0],
        r=data[:, 1],
        y=data[:, 2],
        y_m=data[:, 3],
        u_a=data[:, block("u_a")],
        sigma1=data[:, sig1],
        sigma2=data[:, sig2] if sig2 else np.zeros((data.shape[0], 0)),
        x=x,
        x_hat=x_hat,
        x_tilde=x_hat - x,
        label=label or path.stem,
    )
