"""Classification metrics and the confusion-matrix SVG renderer.

Label order everywhere is (fake, real): confusion-matrix rows are actual
fake/real, columns predicted fake/real. Undefined per-class F1 (zero
denominator) is taken as 0.
"""

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import StateError, ValidationError
from .ioutil import atomic_write_text
from .linear import NEGATIVE_LABEL, POSITIVE_LABEL

AVERAGINGS = ("binary_real", "macro", "weighted")


def _check_pair(y_true, y_pred) -> tuple[list[str], list[str]]:
    y_true = list(y_true)
    y_pred = list(y_pred)
    if len(y_true) != len(y_pred):
        raise ValidationError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    if not y_true:
        raise ValidationError("need at least one sample")
    return y_true, y_pred


def confusion_matrix(y_true, y_pred) -> np.ndarray:
    """2x2 counts, rows = actual (fake, real), cols = predicted (fake, real)."""
    y_true, y_pred = _check_pair(y_true, y_pred)
    order = {NEGATIVE_LABEL: 0, POSITIVE_LABEL: 1}
    counts = np.zeros((2, 2), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        counts[order[t], order[p]] += 1
    return counts


def _f1_from_counts(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def f1_score(y_true, y_pred, averaging: str = "weighted") -> float:
    """F1 with the requested averaging; binary_real treats "real" as positive."""
    if averaging not in AVERAGINGS:
        raise StateError(f"unknown averaging {averaging!r}")
    cm = confusion_matrix(y_true, y_pred)
    # per-class counts with that class as positive
    f1_fake = _f1_from_counts(int(cm[0, 0]), int(cm[1, 0]), int(cm[0, 1]))
    f1_real = _f1_from_counts(int(cm[1, 1]), int(cm[0, 1]), int(cm[1, 0]))
    if averaging == "binary_real":
        return f1_real
    if averaging == "macro":
        return (f1_fake + f1_real) / 2.0
    support_fake = int(cm[0].sum())
    support_real = int(cm[1].sum())
    total = support_fake + support_real
    return (f1_fake * support_fake + f1_real * support_real) / total


# Linear white -> dark blue color scale for the heatmap cells.
_LOW_RGB = (247, 251, 255)
_HIGH_RGB = (8, 48, 107)


def _cell_color(value: float, max_value: float) -> tuple[str, str]:
    frac = 0.0 if max_value <= 0 else value / max_value
    rgb = tuple(round(lo + frac * (hi - lo)) for lo, hi in zip(_LOW_RGB, _HIGH_RGB))
    fill = f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"
    text = "#ffffff" if frac > 0.55 else "#1a1a1a"
    return fill, text


def render_confusion_svg(matrix, path: str | Path, title: str = "") -> None:
    """Write a standalone SVG heatmap of a 2x2 confusion matrix.

    Cells carry their counts; color scales linearly from 0 to the largest
    cell (an all-zero matrix renders uniformly, no division by zero).
    """
    m = np.asarray(matrix)
    if m.shape != (2, 2) or (m < 0).any():
        raise ValidationError(f"expected a nonnegative 2x2 matrix, got shape {m.shape}")
    cell = 110
    left, top = 90, 60
    width = left + 2 * cell + 30
    height = top + 2 * cell + 50
    max_value = float(m.max())
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2}" y="22" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(title)}</text>'
        )
    class_names = (NEGATIVE_LABEL, POSITIVE_LABEL)
    for col, name in enumerate(class_names):
        x = left + col * cell + cell / 2
        parts.append(
            f'<text x="{x}" y="{top - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">pred {escape(name)}</text>'
        )
    for row, name in enumerate(class_names):
        y = top + row * cell + cell / 2
        parts.append(
            f'<text x="{left - 10}" y="{y + 4}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">actual {escape(name)}</text>'
        )
    for row in range(2):
        for col in range(2):
            value = float(m[row, col])
            fill, text_color = _cell_color(value, max_value)
            x = left + col * cell
            y = top + row * cell
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{fill}" stroke="#888888"/>'
            )
            parts.append(
                f'<text x="{x + cell / 2}" y="{y + cell / 2 + 5}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="18" fill="{text_color}">'
                f"{int(m[row, col])}</text>"
            )
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")
