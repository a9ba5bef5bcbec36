"""Problem container for the linear-mixing factor graph.

The joint factorizes as

    ``prod_n p(y_n | z_n) * delta(z - A x) * prod_k p(x_k)``

with ``A`` of shape (N, K).  Scalar likelihood and prior factors are
:class:`~glmep.gmm.GmmFactor` instances; the observations are folded into the
likelihood factors (``likelihoods[n]`` is ``p(y_n | .)`` as a function of
``z_n``) and also kept as the raw vector ``y`` for estimators that use it
directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gmm import GmmFactor

__all__ = ["GlmModel"]


@dataclass(frozen=True)
class GlmModel:
    A: np.ndarray
    priors: tuple
    likelihoods: tuple
    y: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2:
            raise ValueError(f"A must be a matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("A must be finite")
        n, k = A.shape
        y = np.array(self.y, dtype=float).reshape(-1)
        if y.size != n:
            raise ValueError(f"y must have length {n}, got {y.size}")
        priors = tuple(self.priors)
        likelihoods = tuple(self.likelihoods)
        if len(priors) != k:
            raise ValueError(f"need {k} priors, got {len(priors)}")
        if len(likelihoods) != n:
            raise ValueError(f"need {n} likelihoods, got {len(likelihoods)}")
        for f in priors + likelihoods:
            if not isinstance(f, GmmFactor):
                raise TypeError("priors and likelihoods must be GmmFactor instances")
        A.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "likelihoods", likelihoods)

    @property
    def shape(self):
        """(N, K) = (observations, signal dimensions)."""
        return self.A.shape
