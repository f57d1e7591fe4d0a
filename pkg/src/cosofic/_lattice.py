"""Integer row-lattice arithmetic: Hermite and Smith normal forms.

Rows are tuples of Python ints; a lattice is the Z-span of its rows.  All
routines are exact and allocate new lists; nothing here knows about groups.
"""

from math import gcd


def _ext_gcd(a, b):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf_with_transform(rows, ncols):
    """Row Hermite normal form of ``rows`` together with a unimodular transform.

    Returns ``(H, U, rank)`` with ``U @ rows == H``.  The first ``rank`` rows of
    ``H`` are the canonical basis (pivots positive, strictly increasing pivot
    columns, entries above each pivot reduced into ``[0, pivot)``); the
    remaining rows are zero and the matching rows of ``U`` span the integer
    left kernel of ``rows``.
    """
    A = [list(r) for r in rows]
    m = len(A)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(ncols):
        if r == m:
            break
        # gcd-eliminate column c below row r
        for i in range(r + 1, m):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _ext_gcd(a, b)
            p, q = a // g, b // g
            Ar, Ai = A[r], A[i]
            A[r] = [x * u + y * v for u, v in zip(Ar, Ai)]
            A[i] = [-q * u + p * v for u, v in zip(Ar, Ai)]
            Ur, Ui = U[r], U[i]
            U[r] = [x * u + y * v for u, v in zip(Ur, Ui)]
            U[i] = [-q * u + p * v for u, v in zip(Ur, Ui)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-v for v in A[r]]
            U[r] = [-v for v in U[r]]
        piv = A[r][c]
        for i in range(r):
            f = A[i][c] // piv
            if f:
                A[i] = [u - f * v for u, v in zip(A[i], A[r])]
                U[i] = [u - f * v for u, v in zip(U[i], U[r])]
        r += 1
    return A, U, r


def hnf(rows, ncols):
    """Canonical HNF basis (nonzero rows only) as a tuple of tuples."""
    H, _, rank = hnf_with_transform(rows, ncols)
    return tuple(tuple(row) for row in H[:rank])


def pivots(basis):
    out = []
    for row in basis:
        for c, v in enumerate(row):
            if v:
                out.append(c)
                break
    return out


def reduce_vector(basis, vec):
    """Canonical residue of ``vec`` modulo the lattice with HNF ``basis``."""
    v = list(vec)
    for row, c in zip(basis, pivots(basis)):
        f = v[c] // row[c]
        if f:
            v = [a - f * b for a, b in zip(v, row)]
    return tuple(v)


def solve(basis, vec):
    """Coefficients ``y`` with ``y @ basis == vec``, or None if ``vec`` is outside."""
    v = list(vec)
    coeffs = []
    piv = pivots(basis)
    col = 0
    for row, c in zip(basis, piv):
        if any(v[col:c]):
            return None
        if v[c] % row[c]:
            return None
        f = v[c] // row[c]
        coeffs.append(f)
        if f:
            v = [a - f * b for a, b in zip(v, row)]
        col = c + 1
    if any(v):
        return None
    return coeffs


def left_kernel(rows, ncols):
    """HNF basis of ``{c : c @ rows == 0}``."""
    m = len(rows)
    if m == 0:
        return ()
    _, U, rank = hnf_with_transform(rows, ncols)
    return hnf(U[rank:], m)


def intersect(basis1, basis2, ncols):
    """HNF basis of the intersection of two row lattices."""
    if not basis1 or not basis2:
        return ()
    stacked = list(basis1) + [tuple(-x for x in r) for r in basis2]
    ker = left_kernel(stacked, ncols)
    k1 = len(basis1)
    vecs = []
    for c in ker:
        vecs.append([sum(c[j] * basis1[j][t] for j in range(k1)) for t in range(ncols)])
    return hnf(vecs, ncols)


def saturation(basis, ncols):
    """HNF basis of ``(span_Q basis) ∩ Z^ncols``."""
    if not basis:
        return ()
    # orthogonal complement W (rows w with basis @ w == 0), then its annihilator
    transposed = [tuple(basis[i][j] for i in range(len(basis))) for j in range(ncols)]
    perp = left_kernel(transposed, len(basis))
    if not perp:
        return hnf([[int(i == j) for j in range(ncols)] for i in range(ncols)], ncols)
    perp_t = [tuple(w[j] for w in perp) for j in range(ncols)]
    return left_kernel(perp_t, len(perp))


def smith_with_transform(rows, ncols):
    """Smith normal form ``P @ A @ C == D`` for the integer matrix ``rows``.

    Returns ``(diag, P, C)`` where ``diag`` lists the nonzero invariant factors
    in divisibility order.  ``P`` is m x m and ``C`` is ncols x ncols, both
    unimodular.
    """
    A = [list(r) for r in rows]
    m = len(A)
    n = ncols
    P = [[int(i == j) for j in range(m)] for i in range(m)]
    C = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_combo(M, i, j, a, b, c, d):
        Mi, Mj = M[i], M[j]
        M[i] = [a * u + b * v for u, v in zip(Mi, Mj)]
        M[j] = [c * u + d * v for u, v in zip(Mi, Mj)]

    def col_combo(M, i, j, a, b, c, d):
        for row in M:
            u, v = row[i], row[j]
            row[i] = a * u + b * v
            row[j] = c * u + d * v

    t = 0
    diag = []
    while t < min(m, n):
        # pick the smallest nonzero entry in the trailing block as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        P[t], P[i] = P[i], P[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in C:
            row[t], row[j] = row[j], row[t]
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    a, b = A[t][t], A[i][t]
                    g, x, y = _ext_gcd(a, b)
                    row_combo(A, t, i, x, y, -b // g, a // g)
                    row_combo(P, t, i, x, y, -b // g, a // g)
                    changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    a, b = A[t][t], A[t][j]
                    g, x, y = _ext_gcd(a, b)
                    col_combo(A, t, j, x, y, -b // g, a // g)
                    col_combo(C, t, j, x, y, -b // g, a // g)
                    changed = True
            if not changed:
                break
        piv = A[t][t]
        # enforce divisibility of the trailing block by the pivot
        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % piv:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            A[t] = [u + v for u, v in zip(A[t], A[bad])]
            P[t] = [u + v for u, v in zip(P[t], P[bad])]
            continue
        if piv < 0:
            A[t] = [-v for v in A[t]]
            P[t] = [-v for v in P[t]]
        diag.append(A[t][t])
        t += 1
    return diag, P, C


def mat_inverse_unimodular(M):
    """Exact inverse of a unimodular integer matrix (Gauss-Jordan over Z)."""
    n = len(M)
    A = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(M)]
    H, _, rank = hnf_with_transform(A, 2 * n)
    if rank < n or any(H[i][i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    return [H[i][n:] for i in range(n)]


def lcm(*values):
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out
