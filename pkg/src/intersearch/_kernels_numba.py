"""Jit-compiled map kernels. Same contracts as _kernels_numpy."""
from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


@njit(cache=True)
def disc_cells(side, pitch, ox, oy, px, py, radius):
    r2 = radius * radius
    c_lo = max(0, int(math.ceil((px - ox - radius) / pitch)))
    c_hi = min(side - 1, int(math.floor((px - ox + radius) / pitch)))
    r_lo = max(0, int(math.ceil((py - oy - radius) / pitch)))
    r_hi = min(side - 1, int(math.floor((py - oy + radius) / pitch)))
    count = 0
    for r in range(r_lo, r_hi + 1):
        dy = oy + pitch * r - py
        for c in range(c_lo, c_hi + 1):
            dx = ox + pitch * c - px
            if dx * dx + dy * dy <= r2:
                count += 1
    idx = np.empty(count, np.int64)
    dist = np.empty(count, np.float64)
    k = 0
    for r in range(r_lo, r_hi + 1):
        dy = oy + pitch * r - py
        for c in range(c_lo, c_hi + 1):
            dx = ox + pitch * c - px
            d2 = dx * dx + dy * dy
            if d2 <= r2:
                idx[k] = r * side + c
                dist[k] = math.sqrt(d2)
                k += 1
    return idx, dist


@njit(cache=True)
def bayes_update_cells(probs, idx, dist, hit, range_scale, pfa, pfa_matched,
                       p_floor, p_ceil):
    for i in range(idx.shape[0]):
        p = probs[idx[i]]
        pd = math.exp(-dist[i] / range_scale)
        fa = min(pfa * pd, 0.5) if pfa_matched else pfa
        if hit[i]:
            num = pd * p
            alt = fa * (1.0 - p)
        else:
            num = (1.0 - pd) * p
            alt = (1.0 - fa) * (1.0 - p)
        den = num + alt
        post = num / den if den > 0.0 else p
        if post < p_floor:
            post = p_floor
        elif post > p_ceil:
            post = p_ceil
        probs[idx[i]] = post


@njit(cache=True)
def sum_binary_entropy(probs):
    total = 0.0
    for i in range(probs.shape[0]):
        total += _h2(probs[i])
    return total


@njit(cache=True)
def gain_at(probs, idx, dist, range_scale, pfa, pfa_matched):
    total = 0.0
    for i in range(idx.shape[0]):
        p = probs[idx[i]]
        pd = math.exp(-dist[i] / range_scale)
        fa = min(pfa * pd, 0.5) if pfa_matched else pfa
        q = pd * p + fa * (1.0 - p)
        qc = 1.0 - q
        post_hit = pd * p / q if q > 0.0 else 0.0
        post_miss = (1.0 - pd) * p / qc if qc > 0.0 else 0.0
        exp_h = q * _h2(post_hit) + qc * _h2(post_miss)
        total += _h2(p) - exp_h
    return total


@njit(cache=True)
def gains_at_positions(probs, side, pitch, ox, oy, pxs, pys, radius,
                       range_scale, pfa, pfa_matched):
    out = np.empty(pxs.shape[0], np.float64)
    for i in range(pxs.shape[0]):
        idx, dist = disc_cells(side, pitch, ox, oy, pxs[i], pys[i], radius)
        out[i] = gain_at(probs, idx, dist, range_scale, pfa, pfa_matched)
    return out
