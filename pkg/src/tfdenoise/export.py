"""File formats: binary PGM images and CSV matrices with axes."""

from __future__ import annotations

import csv

import numpy as np

from .tfr import TFR


def write_pgm(path, img: TFR, Q: int | None = None) -> None:
    """Binary P5 PGM, maxval 255, low frequencies at the bottom."""
    Q = img.meta.get("Q", 255) if Q is None else Q
    v = np.clip(np.asarray(img.values, dtype=float), 0, Q) * (255.0 / Q)
    data = np.flipud(np.round(v)).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a P5 PGM written by :func:`write_pgm`; rows returned low frequency first."""
    with open(path, "rb") as fh:
        raw = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        end = pos
        while not raw[end : end + 1].isspace():
            end += 1
        tokens.append(raw[pos:end].decode("ascii"))
        pos = end
    if tokens[0] != "P5":
        raise ValueError(f"not a binary PGM: {tokens[0]}")
    w, h, maxval = map(int, tokens[1:])
    if maxval > 255:
        raise ValueError("16-bit PGM not supported")
    data = np.frombuffer(raw, dtype=np.uint8, count=w * h, offset=pos + 1)
    return np.flipud(data.reshape(h, w))


def write_tfr_csv(path, S: TFR) -> None:
    """Row-major CSV: header holds the time axis, first column the frequency axis."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["freq_hz\\time_s"] + [repr(float(t)) for t in S.t_axis])
        for f, row in zip(S.f_axis, np.asarray(S.values, dtype=float)):
            w.writerow([repr(float(f))] + [repr(float(x)) for x in row])


def read_tfr_csv(path, kind: str = "image") -> TFR:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    t_axis = np.array([float(x) for x in rows[0][1:]])
    body = np.array([[float(x) for x in r] for r in rows[1:]]).reshape(-1, t_axis.size + 1)
    return TFR(body[:, 1:], t_axis, body[:, 0], kind=kind)
