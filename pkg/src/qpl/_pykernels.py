"""Pure-Python reference versions of the compiled kernels in ``_ckernels.pyx``.

Both modules expose the same functions with the same signatures and must
produce bit-identical results; ``tests/test_kernels.py`` checks this.
"""

import numpy as np

RATIO, CARRY, NUM_ZERO, DEN_ZERO = 0, 1, 2, 3


def horner(coeffs, x):
    """Evaluate ``sum_k coeffs[k] x**k`` at every entry of ``x``."""
    coeffs = np.asarray(coeffs, dtype=float)
    x = np.asarray(x, dtype=float)
    # vectorised over points; same operation order as the compiled loop
    out = np.full(x.shape[0], coeffs[-1], dtype=float)
    for c in coeffs[-2::-1]:
        out = out * x + c
    return out


def product_recursion(factors, start, tol, blowup=np.inf):
    """Running products ``v[k] = start * prod_{j<=k} factors[j-1]``.

    Stops at the first factor with ``|factor| <= tol`` (that value is set to
    exactly 0) or when ``|v| > blowup``.  Returns ``(values, status)``;
    ``status`` is the index of the zero, ``-1`` if all factors were used,
    ``-2`` on blow-up.
    """
    factors = np.asarray(factors, dtype=float)
    n = factors.shape[0]
    out = np.empty(n + 1, dtype=float)
    out[0] = start
    acc = float(start)
    for k in range(n):
        phi = factors[k]
        if abs(phi) <= tol:
            out[k + 1] = 0.0
            return out[: k + 2], k + 1
        acc = acc * phi
        out[k + 1] = acc
        if abs(acc) > blowup:
            return out[: k + 2], -2
    return out, -1


def ratio_recursion(num, den, start, tol):
    """Solve ``g[k+1] den[k] = g[k] num[k]`` forward from ``g[0] = start``.

    Factors within ``tol`` of zero count as zero.  Per-step case codes:
    RATIO (both nonzero), CARRY (both zero, previous value kept), NUM_ZERO
    (``g[k+1] = 0``), DEN_ZERO (``g[0..k] = 0`` is forced, ``g[k+1] = 1``).
    Returns ``(values, cases, obstruction)`` where ``obstruction`` is the
    1-based step of the first one-sided zero, or ``-1``.
    """
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    n = num.shape[0]
    out = np.empty(n + 1, dtype=float)
    cases = np.empty(n, dtype=np.int8)
    out[0] = start
    obstruction = -1
    for k in range(n):
        a = num[k]
        b = den[k]
        za = abs(a) <= tol
        zb = abs(b) <= tol
        if not za and not zb:
            out[k + 1] = out[k] * a / b
            cases[k] = RATIO
        elif za and zb:
            out[k + 1] = out[k]
            cases[k] = CARRY
        elif za:
            out[k + 1] = 0.0
            cases[k] = NUM_ZERO
            if obstruction < 0:
                obstruction = k + 1
        else:
            for j in range(k + 1):
                out[j] = 0.0
            out[k + 1] = 1.0
            cases[k] = DEN_ZERO
            if obstruction < 0:
                obstruction = k + 1
    return out, cases, obstruction


def q_integral_sums(values, limit, q2):
    """``S[k] = sum_{m>=0} q2**m f[k+m]`` with ``f = limit`` past the array."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    out = np.empty(n, dtype=float)
    acc = limit / (1.0 - q2)
    for k in range(n - 1, -1, -1):
        acc = values[k] + q2 * acc
        out[k] = acc
    return out
