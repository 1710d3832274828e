import mmh3
import numpy as np

# ratios within this relative distance of an integer are treated as that integer
CEIL_RTOL = 1e-9


def safe_ceil(x: np.ndarray) -> np.ndarray:
    """Ceiling that ignores floating-point noise just above an integer.

    Positive inputs never round below one.
    """
    rounded = np.ceil(x - CEIL_RTOL * np.maximum(1.0, np.abs(x)))
    return np.where(x > 0, np.maximum(rounded, 1.0), 0.0)


def pair_load(load: np.ndarray, capacity: np.ndarray) -> np.ndarray:
    """max(T_ij, T_ji) / S_ij: the symmetric demand a single link count must meet."""
    sym = np.maximum(load, load.T)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(capacity > 0, sym / np.where(capacity > 0, capacity, 1.0), 0.0)
    return out


def upper_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1)


def derive_seed(*parts) -> int:
    """Stable 32-bit seed from arbitrary labels, e.g. (workload spec, base seed, index)."""
    return mmh3.hash(":".join(str(p) for p in parts), seed=0, signed=False)
