"""Complex linear-algebra primitives and reproducible random streams.

Complex vectors/matrices are plain numpy arrays with dtype complex128.
Random streams are ``numpy.random.Generator`` instances derived from a
:class:`SeedSpec`, so each Monte Carlo trial gets its own stream that is a
pure function of ``(master_seed, trial_index)`` and independent of the
order in which trials execute.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

_HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one trial's random stream."""

    master_seed: int
    trial_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if int(self.trial_index) < 0:
            raise ValueError("trial_index must be non-negative")


def derive_trial_stream(spec: SeedSpec) -> np.random.Generator:
    """Return the PCG64 stream for one trial.

    The stream depends only on (master_seed, trial_index); sub-streams for
    independent purposes within a trial can be split off with
    ``Generator.spawn``, which never collides with the parent stream.
    """
    ss = np.random.SeedSequence(entropy=int(spec.master_seed),
                                spawn_key=(int(spec.trial_index),))
    return np.random.default_rng(ss)


def sample_complex_gaussian(stream: np.random.Generator, variance: float,
                            size=None):
    """Draw circularly symmetric complex Gaussian CN(0, variance) samples.

    Real and imaginary parts are independent N(0, variance/2). Returns a
    scalar when ``size`` is None, else an array of the given shape.
    """
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    scale = np.sqrt(variance / 2.0)
    n = 1 if size is None else size
    z = stream.normal(0.0, scale, size=(2, n) if np.isscalar(n) else (2, *n))
    out = z[0] + 1j * z[1]
    return complex(out[0]) if size is None else out


def hermitian_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for Hermitian positive definite A via Cholesky.

    Raises ValueError for non-finite or non-Hermitian input and
    numpy.linalg.LinAlgError when the factorization fails (A not PD).
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if b.shape != (A.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({A.shape[0]},)")
    if not (np.all(np.isfinite(A.real)) and np.all(np.isfinite(A.imag))
            and np.all(np.isfinite(b.real)) and np.all(np.isfinite(b.imag))):
        raise ValueError("non-finite entries in hermitian_solve input")
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > _HERMITIAN_RTOL * max(scale, 1.0):
        raise ValueError("matrix is not Hermitian")
    c, low = cho_factor(A, lower=True, check_finite=False)
    return cho_solve((c, low), b, check_finite=False)
