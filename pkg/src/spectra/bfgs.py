"""Limited-memory sequence of projected BFGS-updated preconditioners.

Each stored pair ``(s_i, r_i)`` (Newton correction and eigenresidual at the
step that produced it) contributes one rank-two modification

    P_{i+1} = -s s^T / (s^T r) + (I - s r^T / (s^T r)) P_i (I - r s^T / (s^T r))

on top of ``P_0 = (L L^T)^-1``.  Application never forms a matrix: it is a
backward sweep over the pairs, one IC solve, and a forward sweep.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .ichol import apply_p0

log = logging.getLogger(__name__)

NEAR_ZERO = 1e-14


class BfgsWindow:
    """FIFO ring buffer of at most ``k_max`` pairs ``(s, r, alpha = s^T r)``."""

    def __init__(self, k_max, n):
        if k_max < 0:
            raise ValueError("k_max must be nonnegative")
        self.k_max = int(k_max)
        self.n = n
        self._S = np.zeros((self.k_max, n))
        self._R = np.zeros((self.k_max, n))
        self._alpha = np.zeros(self.k_max)
        self._count = 0
        self._next = 0
        self.rejected = 0

    def __len__(self):
        return self._count

    def clear(self):
        self._count = 0
        self._next = 0

    def _slots(self):
        """Slot indices from oldest to newest."""
        start = (self._next - self._count) % max(self.k_max, 1)
        return [(start + t) % self.k_max for t in range(self._count)]

    def pairs(self):
        """``[(s, r, alpha), ...]`` oldest first (views, do not modify)."""
        return [(self._S[i], self._R[i], self._alpha[i]) for i in self._slots()]

    def push(self, s, r, force=False):
        """Store a pair, evicting the oldest one when full.

        Returns False (window unchanged) when ``k_max == 0`` or the pair is
        rejected: ``|s^T r|`` negligible relative to ``||s|| ||r||``, or
        ``s^T r >= 0``, which would break positive definiteness.  ``force``
        skips the sign test and exists only for adversarial testing.
        """
        if self.k_max == 0:
            return False
        s = np.asarray(s, dtype=np.float64)
        r = np.asarray(r, dtype=np.float64)
        alpha = float(s @ r)
        scale = np.linalg.norm(s) * np.linalg.norm(r)
        if scale == 0.0 or abs(alpha) <= NEAR_ZERO * scale:
            self.rejected += 1
            log.warning("BFGS pair rejected: s^T r = %.3e is negligible", alpha)
            return False
        if alpha >= 0.0 and not force:
            self.rejected += 1
            log.warning("BFGS pair rejected: s^T r = %.3e has the wrong sign", alpha)
            return False
        slot = self._next
        self._S[slot] = s
        self._R[slot] = r
        self._alpha[slot] = alpha
        self._next = (slot + 1) % self.k_max
        self._count = min(self._count + 1, self.k_max)
        return True


def push_pair(window, s, r):
    window.push(s, r)
    return window


def apply_preconditioner(window, F, basis, g):
    """``c = P_k g`` for ``g`` orthogonal to the deflation basis.

    Cost: 2k dot products, 2k axpys, one IC solve, one projection.
    """
    slots = window._slots()
    S, R, alpha = window._S, window._R, window._alpha
    w = np.array(g, dtype=np.float64)
    a = np.empty(len(slots))
    for t in range(len(slots) - 1, -1, -1):
        i = slots[t]
        a[t] = (S[i] @ w) / alpha[i]
        w -= a[t] * R[i]
    c = apply_p0(F, w)
    for t, i in enumerate(slots):
        b = (R[i] @ c) / alpha[i]
        c -= (a[t] + b) * S[i]
    return basis.project(c)


@dataclass
class SpdProbeReport:
    passed: bool
    trials: int
    failures: int
    min_rayleigh: float


def spd_probe(window, F, basis, trials=1000, rng=None):
    """Check ``z^T P_k z > 0`` for random ``z`` orthogonal to the basis."""
    rng = np.random.default_rng(rng)
    failures = 0
    worst = np.inf
    for _ in range(trials):
        z = basis.project(rng.standard_normal(window.n))
        z = basis.project(z)
        zz = z @ z
        if zz == 0.0:
            continue
        ratio = float(z @ apply_preconditioner(window, F, basis, z)) / zz
        worst = min(worst, ratio)
        if not ratio > 0.0:
            failures += 1
    return SpdProbeReport(failures == 0, trials, failures, worst)
