"""Plain-text outputs: PGM rasters and CSV verification reports."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .raster import AttractorRaster

REPORT_HEADER = ("case", "status", "measured", "bound", "detail")


def fmt(x):
    """Numbers in CLI output and reports carry 12 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return "" if x is None else str(x)


def raster_image(raster):
    """Image rows top to bottom: row 0 is the largest second coordinate; 1D gives one row."""
    bits = raster.bits
    img = bits[None, :] if bits.ndim == 1 else bits.T[::-1]
    return np.where(img, 0, 255).astype(np.uint8)


def pgm_text(raster):
    img = raster_image(raster)
    h, w = img.shape
    out = io.StringIO()
    out.write(f"P2\n{w} {h}\n255\n")
    for row in img:
        out.write(" ".join(map(str, row.tolist())))
        out.write("\n")
    return out.getvalue()


def write_pgm(raster, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(pgm_text(raster))


def read_pgm(path):
    """Pixel array of an ASCII PGM (comments allowed)."""
    tokens = []
    with open(path) as fh:
        for line in fh:
            tokens.extend(line.split("#", 1)[0].split())
    if tokens[0] != "P2":
        raise ValueError("not an ASCII PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array(tokens[4:4 + w * h], dtype=np.int64).reshape(h, w)
    return data, maxval


@dataclass(frozen=True)
class Case:
    """One row of a verification report."""

    case: str
    passed: bool
    measured: object = None
    bound: object = None
    detail: str = ""

    @property
    def status(self):
        return "pass" if self.passed else "fail"

    def row(self):
        return (self.case, self.status, fmt(self.measured), fmt(self.bound), self.detail)


def report_csv(cases):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for c in sorted(cases, key=lambda c: c.case):
        w.writerow(c.row())
    return out.getvalue()


def write_report(cases, path):
    with open(path, "w", newline="") as fh:
        fh.write(report_csv(cases))
