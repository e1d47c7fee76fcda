"""Independent oracles used to cross-check the library.

Everything here is deliberately written from first principles (brute-force
enumeration, the class-algebra character method, direct definition sums) and
shares no code path with groupmix itself.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------------------
# group enumeration oracles


def sl2_count_bruteforce(q: int) -> int:
    """Count 2x2 matrices over F_q with determinant 1 by exhaustion."""
    return sum(
        1
        for a, b, c, d in itertools.product(range(q), repeat=4)
        if (a * d - b * c) % q == 1
    )


def even_permutations_count(n: int) -> int:
    count = 0
    for p in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        if inv % 2 == 0:
            count += 1
    return count


# ---------------------------------------------------------------------------
# character table via the class algebra (Burnside/Dixon style)


def conjugacy_classes(mul: np.ndarray, inv: np.ndarray) -> list[np.ndarray]:
    """Conjugacy classes as sorted index arrays, identity's class first."""
    n = mul.shape[0]
    class_id = np.full(n, -1, dtype=np.int64)
    classes = []
    for g in range(n):
        if class_id[g] >= 0:
            continue
        orbit = np.unique(mul[mul[:, g], inv[np.arange(n)]])
        class_id[orbit] = len(classes)
        classes.append(orbit)
    assert classes[0][0] == 0 and len(classes[0]) == 1
    return classes


def character_table(mul: np.ndarray, inv: np.ndarray, seed: int = 12345):
    """Irreducible characters from simultaneous class-sum eigenvectors.

    Returns (dims, chars, classes) where chars[r, c] is the value of the
    r-th irreducible character on class c.  Works purely from the
    multiplication table through the class multiplication coefficients.
    """
    n = mul.shape[0]
    classes = conjugacy_classes(mul, inv)
    r = len(classes)
    sizes = np.array([len(c) for c in classes], dtype=np.int64)
    class_id = np.empty(n, dtype=np.int64)
    for ci, members in enumerate(classes):
        class_id[members] = ci
    reps = np.array([c[0] for c in classes], dtype=np.int64)

    # a[i, j, k] = #{(g, h) in C_i x C_j : g*h = z_k} for a fixed z_k in C_k
    a = np.zeros((r, r, r), dtype=np.int64)
    for i in range(r):
        gi_inv = inv[classes[i]]
        for k in range(r):
            h = mul[gi_inv, reps[k]]
            a[i, :, k] = np.bincount(class_id[h], minlength=r)

    rng = np.random.default_rng(seed)
    for _ in range(32):
        combo = np.tensordot(rng.standard_normal(r), a, axes=(0, 0))
        eigvals, eigvecs = np.linalg.eig(combo.astype(np.complex128))
        if np.min(np.abs(np.subtract.outer(eigvals, eigvals) + np.eye(r))) > 1e-6:
            break
    else:
        raise RuntimeError("could not separate class-algebra eigenvalues")

    dims = []
    chars = []
    for col in range(r):
        v = eigvecs[:, col]
        v = v / v[0]                       # identity-class component is 1
        denom = np.sum(np.abs(v) ** 2 / sizes)
        d = np.sqrt(n / denom.real)
        d_int = int(round(d))
        assert abs(d - d_int) < 1e-6, f"non-integer irrep dimension {d}"
        dims.append(d_int)
        chars.append(d_int * v / sizes)
    order = np.argsort(dims, kind="stable")
    dims = [dims[i] for i in order]
    chars = np.array([chars[i] for i in order])
    assert sum(d * d for d in dims) == n
    return dims, chars, classes


def characters_per_element(mul, inv, seed: int = 12345):
    """Character table expanded to length-n vectors (one row per irrep)."""
    n = mul.shape[0]
    dims, chars, classes = character_table(mul, inv, seed)
    class_id = np.empty(n, dtype=np.int64)
    for ci, members in enumerate(classes):
        class_id[members] = ci
    return dims, chars[:, class_id]


# ---------------------------------------------------------------------------
# direct-definition Fourier oracles


def fourier_forward_bruteforce(values, matrices):
    """E_x f(x) * conj(rho(x)) summed element by element."""
    n = len(values)
    d = matrices[0].shape[0]
    acc = np.zeros((d, d), dtype=np.complex128)
    for x in range(n):
        acc += values[x] * np.conj(matrices[x])
    return acc / n


def fourier_inverse_bruteforce(coeffs_and_mats):
    """sum_rho d_rho * tr(c_rho @ rho(x)^T) evaluated pointwise."""
    n = next(iter(coeffs_and_mats))[1].shape[0]
    out = None
    for coeff, mats in coeffs_and_mats:
        d = coeff.shape[0]
        vals = np.array([d * np.trace(coeff @ mats[x].T) for x in range(mats.shape[0])])
        out = vals if out is None else out + vals
    return out


def product_irrep_matrices(base_mats_by_index, tup, pg_digits):
    """Stacked kron matrices of the tuple irrep over all product elements.

    Coordinate 0 is the least significant kron factor; pg_digits is the
    (arity, N) digit array of every flat element.
    """
    m = len(tup)
    stack = base_mats_by_index[tup[0]][pg_digits[0]]
    for i in range(1, m):
        nxt = base_mats_by_index[tup[i]][pg_digits[i]]
        da, db = nxt.shape[1], stack.shape[1]
        stack = np.einsum("xij,xkl->xikjl", nxt, stack).reshape(-1, da * db, da * db)
    return stack


def product_fourier_bruteforce(values, base_mats_by_index, tuples, pg_digits):
    """Direct product-group transform: one definition sum per irrep tuple."""
    N = len(values)
    out = {}
    for tup in tuples:
        mats = product_irrep_matrices(base_mats_by_index, tup, pg_digits)
        out[tup] = np.einsum("x,xij->ij", values, np.conj(mats)) / N
    return out


# ---------------------------------------------------------------------------
# convolution oracles


def circular_convolve(p, q):
    """Cyclic-group convolution through modular index arithmetic only."""
    n = len(p)
    out = np.zeros(n)
    for x in range(n):
        out[x] = sum(p[y] * q[(x - y) % n] for y in range(n))
    return out


def convolve_bruteforce(p, q, mul_flat, inv_flat):
    """sum_y p(y) q(y^{-1} x) with explicit flat product maps."""
    n = len(p)
    out = np.zeros(n)
    for y in range(n):
        out[mul_flat(y, np.arange(n))] += p[y] * q
        # out[y*z] += p[y]*q[z] is the same sum reindexed by z = y^{-1}x
    return out


def tv_distance(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


def exact_box_counts_bruteforce(mul, inv, parties: int):
    """Exact box-distribution counts by pure-python enumeration (tiny groups)."""
    n = mul.shape[0]
    m = 2**parties
    counts = {}
    for us in itertools.product(range(n), repeat=2 * parties):
        point = []
        for j in range(m):
            acc = 0  # identity
            for i in range(parties):
                bit = (j >> i) & 1
                acc = mul[acc, us[2 * i + bit]]
            point.append(int(acc))
        key = 0
        for c in reversed(point):
            key = key * n + c
        counts[key] = counts.get(key, 0) + 1
    return counts


def exact_marginal_fraction_dev(counts_vec, n: int, m: int, subset) -> Fraction:
    """Exact max relative deviation of a marginal of an integer-count vector."""
    total = int(np.sum(counts_vec))
    arr = np.asarray(counts_vec, dtype=np.int64).reshape((n,) * m, order="F")
    other = tuple(i for i in range(m) if i not in subset)
    marg = arr.sum(axis=other) if other else arr
    cells = n ** len(subset)
    worst = Fraction(0)
    for c in marg.ravel():
        dev = abs(Fraction(int(c) * cells, total) - 1)
        if dev > worst:
            worst = dev
    return worst
