"""Dense linear algebra over a single p-adic field (lists of lists of PadicElement).

Pivots are chosen by minimal valuation, ties broken by lowest row index (then
lowest column).  ``tol`` lets callers declare entries of valuation >= tol as
zero, which is how rank decisions survive accumulated precision loss.
"""
from .errors import PrecisionZero
from .padic.local import PadicElement


def zeros(n, k, F):
    return [[F.zero() for _ in range(k)] for _ in range(n)]


def identity(n, F):
    out = zeros(n, n, F)
    for i in range(n):
        out[i][i] = F.one()
    return out


def matmul(A, B):
    F = (A[0][0] if A and A[0] else B[0][0]).field
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = F.zero()
            for s in range(k):
                a = A[i][s]
                if not a.is_exact_zero():
                    b = B[s][j]
                    if not b.is_exact_zero():
                        acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def vecmat(v, A):
    return matmul([v], A)[0]


def matadd(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matsub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(c, A):
    return [[c * a for a in row] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)]


def entrywise(A, fn):
    return [[fn(a) for a in row] for row in A]


def is_zero_entry(x, tol=None):
    if x.is_zero():
        return True
    return tol is not None and x.valuation() >= tol


def matrices_equal(A, B):
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def min_valuation(A):
    vals = [a.valuation() for row in A for a in row if not a.is_zero()]
    return min(vals) if vals else None


def _pick_pivot(M, rows, cols, tol):
    best = None
    for i in rows:
        for j in cols:
            x = M[i][j]
            if is_zero_entry(x, tol):
                continue
            v = x.valuation()
            if best is None or v < best[0]:
                best = (v, i, j)
    return best


def rref(M, tol=None, pivot_cols=None):
    """Reduced row echelon form with full minimal-valuation pivoting.

    Returns (R, pivots) where pivots is a list of (row, col) in elimination order.
    Only the first ``pivot_cols`` columns are eligible as pivots.
    """
    M = [list(row) for row in M]
    if not M:
        return M, []
    nrows, ncols = len(M), len(M[0])
    free_rows = list(range(nrows))
    free_cols = list(range(ncols if pivot_cols is None else pivot_cols))
    pivots = []
    while free_rows and free_cols:
        best = _pick_pivot(M, free_rows, free_cols, tol)
        if best is None:
            break
        _, i, j = best
        inv = M[i][j].inverse()
        M[i] = [x * inv for x in M[i]]
        for r in range(nrows):
            if r != i and not M[r][j].is_zero():
                c = M[r][j]
                M[r] = [a - c * b for a, b in zip(M[r], M[i])]
        pivots.append((i, j))
        free_rows.remove(i)
        free_cols.remove(j)
    return M, pivots


def rank(M, tol=None):
    return len(rref(M, tol)[1])


def right_kernel(M, tol=None):
    """Basis of {x : M x = 0} as a list of vectors."""
    F = M[0][0].field
    ncols = len(M[0])
    R, pivots = rref(M, tol)
    pcols = {j: i for i, j in pivots}
    basis = []
    for f in range(ncols):
        if f in pcols:
            continue
        x = [F.zero() for _ in range(ncols)]
        x[f] = F.one()
        for j, i in pcols.items():
            x[j] = -R[i][f]
        basis.append(x)
    return basis


def left_kernel(M, tol=None):
    """Basis of {v : v M = 0} (row vectors)."""
    return right_kernel(transpose(M), tol)


def solve_right(M, b, tol=None):
    """One solution x of M x = b, or None if inconsistent."""
    F = M[0][0].field
    ncols = len(M[0])
    R, pivots = rref([list(row) + [bi] for row, bi in zip(M, b)], tol, ncols)
    x = [F.zero() for _ in range(ncols)]
    for i, j in pivots:
        x[j] = R[i][ncols]
    # rows without a pivot must have a zero right-hand side
    prows = {i for i, _ in pivots}
    for i in range(len(R)):
        if i not in prows and not is_zero_entry(R[i][ncols], tol):
            return None
    return x


def det(A):
    n = len(A)
    F = A[0][0].field
    M = [list(row) for row in A]
    result = F.one()
    for k in range(n):
        best = None
        for i in range(k, n):
            x = M[i][k]
            if not x.is_zero() and (best is None or x.valuation() < best[0]):
                best = (x.valuation(), i)
        if best is None:
            return _zero_det(M, k, F)
        i = best[1]
        if i != k:
            M[k], M[i] = M[i], M[k]
            result = -result
        piv = M[k][k]
        result = result * piv
        inv = piv.inverse()
        for r in range(k + 1, n):
            if not M[r][k].is_zero():
                c = M[r][k] * inv
                M[r] = [a - c * b for a, b in zip(M[r], M[k])]
    return result


def _zero_det(M, k, F):
    # the determinant is zero at the precision of column k
    absprec = min((x.absolute_precision() for x in (M[i][k] for i in range(k, len(M)))), default=None)
    if absprec is None or absprec == float("inf"):
        return F.zero()
    return PadicElement(F, int(absprec), None, 0)


def inverse(A):
    n = len(A)
    F = A[0][0].field
    aug = [list(row) + [F.one() if i == j else F.zero() for j in range(n)] for i, row in enumerate(A)]
    for k in range(n):
        best = None
        for i in range(k, n):
            x = aug[i][k]
            if not x.is_zero() and (best is None or x.valuation() < best[0]):
                best = (x.valuation(), i)
        if best is None:
            raise PrecisionZero("matrix is singular at precision")
        i = best[1]
        aug[k], aug[i] = aug[i], aug[k]
        inv = aug[k][k].inverse()
        aug[k] = [x * inv for x in aug[k]]
        for r in range(n):
            if r != k and not aug[r][k].is_zero():
                c = aug[r][k]
                aug[r] = [a - c * b for a, b in zip(aug[r], aug[k])]
    return [row[n:] for row in aug]


def charpoly(A):
    """Characteristic polynomial det(tI - A), coefficients low degree first (Berkowitz)."""
    n = len(A)
    F = A[0][0].field
    # Berkowitz: division free
    vec = [F.one(), -A[0][0]]
    for r in range(1, n):
        R = [A[r][j] for j in range(r)]
        C = [A[i][r] for i in range(r)]
        Asub = [row[:r] for row in A[:r]]
        toeplitz_col = [F.one(), -A[r][r]]
        powc = C
        for _ in range(r):
            s = F.zero()
            for a, b in zip(R, powc):
                s = s + a * b
            toeplitz_col.append(-s)
            powc = [sum((Asub[i][j] * powc[j] for j in range(r)), F.zero()) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = F.zero()
            for j in range(len(vec)):
                k = i - j
                if 0 <= k < len(toeplitz_col):
                    acc = acc + toeplitz_col[k] * vec[j]
            new.append(acc)
        vec = new
    # vec holds coefficients from t^n downwards
    return list(reversed(vec))
