"""CSV and matrix-file helpers.

CSV output is locale-independent: ',' separators, '.' decimals, LF line
endings and 17 significant digits for reals. Complex columns are split into
``re_<name>``/``im_<name>`` pairs.
"""
from __future__ import annotations

import csv
import numbers
from pathlib import Path

import numpy as np

from .errors import ConfigError


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def complex_columns(name: str) -> list:
    return [f"re_{name}", f"im_{name}"]


def write_matrix_csv(path, matrix, name="c") -> Path:
    """Long format: n, m (1-based), re_<name>, im_<name>."""
    m = np.asarray(matrix)
    rows = (
        (i + 1, j + 1, m[i, j].real, m[i, j].imag)
        for i in range(m.shape[0])
        for j in range(m.shape[1])
    )
    return write_csv(path, ["n", "m", *complex_columns(name)], rows)


def read_matrix_csv(path) -> np.ndarray:
    header, rows = read_csv(path)
    n = max(int(r[0]) for r in rows)
    out = np.zeros((n, n), dtype=complex)
    for r in rows:
        out[int(r[0]) - 1, int(r[1]) - 1] = float(r[2]) + 1j * float(r[3])
    return out


def write_trajectory_csv(path, traj) -> Path:
    """One row per sample: time, then re/im of A_n and of C_nm (row-major)."""
    n = traj.spec.n_sites
    header = ["time"]
    for i in range(1, n + 1):
        header += complex_columns(f"a_{i}")
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            header += complex_columns(f"c_{i}_{j}")

    def rows():
        for t, a, c in zip(traj.times, traj.a_values, traj.c_values):
            flat = np.concatenate([a, c.ravel()])
            row = [t]
            for z in flat:
                row += [z.real, z.imag]
            yield row

    return write_csv(path, header, rows())


def read_hopping_file(path) -> np.ndarray:
    """Hopping matrix file: N on the first line, then N*N row-major "re,im"
    tokens separated by whitespace."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"matrix_file not found: {path}") from exc
    lines = text.splitlines()
    content = [i for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not content:
        raise ConfigError(f"{path}: empty matrix file")
    first = content[0]
    try:
        n = int(lines[first].strip())
    except ValueError:
        raise ConfigError(f"{path}:{first + 1}: first line must hold the site count N") from None
    values = []
    for i in content[1:]:
        ln, lineno = lines[i], i + 1
        for tok in ln.split():
            try:
                re_s, im_s = tok.split(",")
                values.append(complex(float(re_s), float(im_s)))
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad complex entry {tok!r} (expected re,im)") from None
    if n < 1 or len(values) != n * n:
        raise ConfigError(f"{path}: expected {n * n} entries for N={n}, found {len(values)}")
    return np.array(values).reshape(n, n)
