"""Certificates for the replacement condition of ``(f, domain, I)``.

A certificate is a unit direction ``w`` with ``<f'(u), w> >= c > 0`` on
``I``; with ``L`` the width of the domain along ``w``, every state is
flushed out of the domain after ``t_star = L / c``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ._lowdisc import axis_directions, diagonal_directions, sphere_points
from .exceptions import InvalidDirection, NoCertificate
from .grid import _direction, width_along

N_SAMPLES = 10_000
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class ReplacementCertificate:
    w: tuple
    c: float
    L: float
    t_star: float
    interval: tuple

    @property
    def A(self):
        return self.interval[0]

    @property
    def B(self):
        return self.interval[1]

    def to_text(self):
        w = ",".join(repr(float(x)) for x in self.w)
        return "\n".join([
            f"w={w}", f"c={self.c!r}", f"L={self.L!r}", f"t_star={self.t_star!r}",
            f"A={self.A!r}", f"B={self.B!r}",
        ]) + "\n"

    @classmethod
    def from_text(cls, text):
        kv = dict(line.split("=", 1) for line in text.splitlines() if "=" in line)
        return cls(tuple(float(x) for x in kv["w"].split(",")), float(kv["c"]),
                   float(kv["L"]), float(kv["t_star"]), (float(kv["A"]), float(kv["B"])))


def _speed_floor(flux, interval, w, samples=None, derivs=None):
    """Conservative ``min_{u in I} <f'(u), w>``: dense sampling, then a local polish."""
    a, b = interval
    if samples is None:
        samples = np.linspace(a, b, N_SAMPLES) if b > a else np.array([a])
        derivs = flux.derivative(samples)
    g = derivs @ w
    i = int(np.argmin(g))
    c = float(g[i])
    if samples.size > 1:
        lo = samples[max(i - 1, 0)]
        hi = samples[min(i + 1, samples.size - 1)]
        res = minimize_scalar(lambda u: float(flux.derivative(u) @ w), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-14})
        c = min(c, float(res.fun))
    # round down so the Gronwall rate is never overstated
    return float(np.nextafter(c, -np.inf))


def _interval(interval):
    a, b = (float(x) for x in interval)
    if not (np.isfinite(a) and np.isfinite(b)) or b < a:
        raise ValueError(f"bad interval [{a}, {b}]")
    return a, b


def certify(flux, interval, domain, w, _cache=None):
    wv = _direction(w, domain.dimension)
    if flux.dimension != domain.dimension:
        raise InvalidDirection("flux and domain dimensions differ")
    wv = wv / np.linalg.norm(wv)
    interval = _interval(interval)
    samples, derivs = _cache if _cache is not None else (None, None)
    c = _speed_floor(flux, interval, wv, samples, derivs)
    if not c > 0.0:
        raise NoCertificate(
            f"min <f'(u), w> = {c:.6g} <= 0 on [{interval[0]}, {interval[1]}] along w={tuple(wv)}")
    L = width_along(domain, wv)
    return ReplacementCertificate(tuple(float(x) for x in wv), c, L, L / c, interval)


def candidate_directions(d, n_directions):
    cands = np.concatenate([axis_directions(d), diagonal_directions(d), sphere_points(d, n_directions)])
    cands = cands / np.linalg.norm(cands, axis=1, keepdims=True)
    _, keep = np.unique(np.round(cands, 12), axis=0, return_index=True)
    return cands[np.sort(keep)]


def search_direction(flux, interval, domain, n_directions=64):
    """Best certificate over a fixed direction set.

    Minimal ``t_star`` wins; near-ties (relative 1e-12) go to the larger
    ``c`` and then to the lexicographically smallest ``w``.
    """
    d = domain.dimension
    if n_directions < 2 * d:
        raise ValueError(f"need at least {2 * d} directions")
    a, b = _interval(interval)
    samples = np.linspace(a, b, N_SAMPLES) if b > a else np.array([a])
    cache = (samples, flux.derivative(samples))
    found = []
    for w in candidate_directions(d, n_directions):
        try:
            found.append(certify(flux, (a, b), domain, w, _cache=cache))
        except NoCertificate:
            continue
    if not found:
        raise NoCertificate(f"no direction certifies [{a}, {b}] for flux {flux.name}")
    best_t = min(cert.t_star for cert in found)
    near = [cert for cert in found if cert.t_star <= best_t * (1.0 + TIE_RTOL)]
    return min(near, key=lambda cert: (-cert.c, tuple(cert.w)))
