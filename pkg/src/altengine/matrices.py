"""Named example unitaries and the plain-text matrix exchange format.

The text format is one row per line, entries separated by whitespace, each
entry written like ``0.5``, ``-0.25+0.75i``, or ``1i``. It round-trips through
:func:`format_matrix_text` / :func:`parse_matrix_text` at full double
precision and stays diffable and hand-editable.
"""

from __future__ import annotations

import numpy as np

_R = 1.0 / np.sqrt(2.0)

#: 6x6 real unitary whose overlap pattern is primitive with minimal power 2.
SIX_LEVEL_PRIMITIVE = 0.5 * np.array([
    [0.0, 0.0, -1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0, 0.0, 0.0],
    [-np.sqrt(2.0), np.sqrt(2.0), 0.0, 0.0, 0.0, 0.0],
    [-1.0, -1.0, -1.0, -1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, np.sqrt(2.0), -np.sqrt(2.0)],
    [0.0, 0.0, 1.0, -1.0, 1.0, 1.0],
])

#: Block-diagonal 4x4 unitary (2x2 identity block plus a rotation block);
#: its overlap pattern is reducible, so no power becomes all-positive.
BLOCK_DIAGONAL_A = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, _R, -_R],
    [0.0, 0.0, _R, _R],
])

#: Block-diagonal 4x4 unitary after a basis relabeling that interleaves the
#: two blocks; still reducible.
BLOCK_DIAGONAL_B = np.array([
    [-_R, 0.0, 0.0, _R],
    [0.0, -_R, _R, 0.0],
    [0.0, _R, _R, 0.0],
    [_R, 0.0, 0.0, _R],
])

#: The 4-cycle permutation matrix; a permutation times a block-diagonal
#: factor, hence also reducible in overlap pattern.
CYCLIC_SHIFT_4 = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
])

#: Non-block-diagonal 4x4 unitary that becomes block-diagonal under a
#: permutation; the fourth standard reducible example.
SPLIT_BLOCK_4 = np.array([
    [0.0, -_R, _R, 0.0],
    [-_R, 0.0, 0.0, _R],
    [_R, 0.0, 0.0, _R],
    [0.0, _R, _R, 0.0],
])

NAMED_MATRICES = {
    "six_level_primitive": SIX_LEVEL_PRIMITIVE,
    "block_diagonal_a": BLOCK_DIAGONAL_A,
    "block_diagonal_b": BLOCK_DIAGONAL_B,
    "cyclic_shift_4": CYCLIC_SHIFT_4,
    "split_block_4": SPLIT_BLOCK_4,
}


def qubit_engine_unitary(phi: float, phase0: float = 0.0, phase1: float = 0.0) -> np.ndarray:
    """The general 2x2 unitary family (up to global phase) used for feasibility
    sweeps, parametrized by mixing angle ``phi`` and two relative phases."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([
        [np.exp(1j * phase0) * c, -np.exp(-1j * phase1) * s],
        [np.exp(1j * phase1) * s, np.exp(-1j * phase0) * c],
    ])


def _format_entry(z: complex) -> str:
    re = float(np.real(z))
    im = float(np.imag(z))
    if im == 0.0:
        return repr(re)
    if re == 0.0:
        return f"{im!r}i"
    sign = "+" if im >= 0.0 else "-"
    return f"{re!r}{sign}{abs(im)!r}i"


def format_matrix_text(matrix) -> str:
    """Render a matrix as whitespace-separated rows of ``a+bi`` entries."""
    A = np.asarray(matrix, dtype=complex)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    return "\n".join(" ".join(_format_entry(z) for z in row) for row in A) + "\n"


def parse_matrix_text(text: str) -> np.ndarray:
    """Parse the ``a+bi`` row format back into a complex matrix.

    Accepts anything :func:`complex` accepts once ``i`` is rewritten to ``j``,
    so plain reals, ``2i``, and ``1e-3-0.5i`` all work. Blank lines and lines
    starting with ``#`` are ignored.
    """
    rows: list[list[complex]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row = []
        for token in line.split():
            try:
                row.append(complex(token.replace("i", "j")))
            except ValueError as exc:
                raise ValueError(
                    f"line {lineno}: cannot parse entry {token!r}") from exc
        rows.append(row)
    if not rows:
        raise ValueError("no matrix rows found")
    width = len(rows[0])
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise ValueError(
                f"ragged matrix: row {lineno} has {len(row)} entries, expected {width}")
    return np.array(rows, dtype=complex)
