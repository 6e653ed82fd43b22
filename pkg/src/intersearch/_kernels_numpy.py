"""Pure-numpy implementations of the hot map kernels.

Reference path for the jit backend; selected with INTERSEARCH_BACKEND=numpy.
Cell ordering (row-major over the disc bounding box) matches the jit path.
"""
from __future__ import annotations

import numpy as np


def disc_cells(side: int, pitch: float, ox: float, oy: float,
               px: float, py: float, radius: float):
    """Indices and center distances of lattice cells within `radius` of (px, py)."""
    c_lo = max(0, int(np.ceil((px - ox - radius) / pitch)))
    c_hi = min(side - 1, int(np.floor((px - ox + radius) / pitch)))
    r_lo = max(0, int(np.ceil((py - oy - radius) / pitch)))
    r_hi = min(side - 1, int(np.floor((py - oy + radius) / pitch)))
    if c_lo > c_hi or r_lo > r_hi:
        return np.empty(0, np.int64), np.empty(0, np.float64)
    dx = ox + pitch * np.arange(c_lo, c_hi + 1) - px
    dy = oy + pitch * np.arange(r_lo, r_hi + 1) - py
    d2 = dy[:, None] * dy[:, None] + dx[None, :] * dx[None, :]
    keep = d2 <= radius * radius
    rr, cc = np.nonzero(keep)
    idx = (rr + r_lo).astype(np.int64) * side + (cc + c_lo)
    return idx, np.sqrt(d2[keep])


def bayes_update_cells(probs: np.ndarray, idx: np.ndarray, dist: np.ndarray,
                       hit: np.ndarray, range_scale: float, pfa: float,
                       pfa_matched: bool, p_floor: float, p_ceil: float) -> None:
    """In-place two-hypothesis posterior update of `probs[idx]` given hit flags.

    pfa_matched=True scales the per-cell false-alarm probability with the
    detection probability (pfa·pd, capped at 0.5); False uses pfa flat.
    """
    p = probs[idx]
    pd = np.exp(-dist / range_scale)
    fa = np.minimum(pfa * pd, 0.5) if pfa_matched else np.full_like(pd, pfa)
    num = np.where(hit, pd * p, (1.0 - pd) * p)
    alt = np.where(hit, fa * (1.0 - p), (1.0 - fa) * (1.0 - p))
    den = num + alt
    post = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), p)
    probs[idx] = np.clip(post, p_floor, p_ceil)


def _h2(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    inside = (p > 0.0) & (p < 1.0)
    q = p[inside]
    out[inside] = -(q * np.log2(q) + (1.0 - q) * np.log2(1.0 - q))
    return out


def sum_binary_entropy(probs: np.ndarray) -> float:
    """Sum of per-cell binary entropies (bits)."""
    return float(np.sum(_h2(probs)))


def gain_at(probs: np.ndarray, idx: np.ndarray, dist: np.ndarray,
            range_scale: float, pfa: float, pfa_matched: bool) -> float:
    """Unnormalized expected entropy reduction of one scan over the disc cells.

    Uses the raw (unclamped) posteriors so the expectation is a true Bayes
    average and the result is non-negative up to roundoff.
    """
    p = probs[idx]
    pd = np.exp(-dist / range_scale)
    fa = np.minimum(pfa * pd, 0.5) if pfa_matched else np.full_like(pd, pfa)
    q = pd * p + fa * (1.0 - p)
    qc = 1.0 - q
    post_hit = np.where(q > 0.0, pd * p / np.where(q > 0.0, q, 1.0), 0.0)
    post_miss = np.where(qc > 0.0, (1.0 - pd) * p / np.where(qc > 0.0, qc, 1.0), 0.0)
    exp_h = q * _h2(post_hit) + qc * _h2(post_miss)
    return float(np.sum(_h2(p) - exp_h))


def gains_at_positions(probs: np.ndarray, side: int, pitch: float, ox: float, oy: float,
                       pxs: np.ndarray, pys: np.ndarray, radius: float,
                       range_scale: float, pfa: float, pfa_matched: bool) -> np.ndarray:
    """gain_at for a batch of candidate sensor positions."""
    out = np.empty(len(pxs), np.float64)
    for i in range(len(pxs)):
        idx, dist = disc_cells(side, pitch, ox, oy, pxs[i], pys[i], radius)
        out[i] = gain_at(probs, idx, dist, range_scale, pfa, pfa_matched)
    return out
