import numpy as np


def sigmoid(z):
    """Logistic function, stable for large |z|."""
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    out = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out if out.ndim else float(out)


def log_sigmoid(z):
    # log sigma(z) = -softplus(-z)
    out = -np.logaddexp(0.0, -np.asarray(z, dtype=float))
    return out if np.ndim(out) else float(out)


def logit(p):
    """Log odds of ``p``; raises if ``p`` is not strictly inside (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError(f"logit undefined for probability {p!r}")
    out = np.log(p) - np.log1p(-p)
    return out if out.ndim else float(out)
