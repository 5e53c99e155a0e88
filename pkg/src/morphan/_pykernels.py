"""Pure-Python fallback for the compiled string kernels in ``_kernels.pyx``.

Every function here must return exactly what its compiled twin returns for
the same inputs; ``tests/test_kernels.py`` checks both backends side by side.
"""
import numpy as np


def shuffle_intersect(a, b, c, d):
    """True iff some string interleaves both (a, d) and (b, c)."""
    a, b, c, d = (list(map(int, x)) for x in (a, b, c, d))
    na, nb, nc, nd = len(a), len(b), len(c), len(d)
    if na + nd != nb + nc:
        return False
    # reach[i][j] holds the set of k (chars of b consumed) reachable with
    # i chars of a and j chars of d emitted; chars of c consumed = i + j - k.
    reach = [[set() for _ in range(nd + 1)] for _ in range(na + 1)]
    reach[0][0].add(0)
    for i in range(na + 1):
        for j in range(nd + 1):
            ks = reach[i][j]
            if not ks:
                continue
            t = i + j
            for k in ks:
                l = t - k
                for x, nxt in ((a[i] if i < na else None, reach[i + 1][j] if i < na else None),
                               (d[j] if j < nd else None, reach[i][j + 1] if j < nd else None)):
                    if nxt is None:
                        continue
                    if k < nb and b[k] == x:
                        nxt.add(k + 1)
                    if l < nc and c[l] == x:
                        nxt.add(k)
    return nb in reach[na][nd]


def alea_trials(a, b, c, u):
    a, b, c = (list(map(int, x)) for x in (a, b, c))
    na, nb, nc = len(a), len(b), len(c)
    n = nb + nc
    rho = u.shape[0]
    width = max(n - na, 0)
    out = np.zeros((rho, width), dtype=np.int32)
    ok = np.zeros(rho, dtype=np.uint8)
    if n < na:
        return out, ok
    if u.shape[1] < 2 * n:
        raise ValueError("need 2*(len(b)+len(c)) uniforms per trial")
    for r in range(rho):
        row = u[r].tolist()
        s = []
        ib = ic = 0
        for t in range(n):
            rb, rc = nb - ib, nc - ic
            if rc == 0 or (rb > 0 and row[t] * (rb + rc) < rb):
                s.append(b[ib])
                ib += 1
            else:
                s.append(c[ic])
                ic += 1
        # cnt[i][j]: number of ways to embed a[j:] as a subsequence of s[i:]
        cnt = [[0.0] * (na + 1) for _ in range(n + 1)]
        cnt[n][na] = 1.0
        for i in range(n - 1, -1, -1):
            cnt[i][na] = 1.0
            for j in range(na - 1, -1, -1):
                v = cnt[i + 1][j]
                if s[i] == a[j]:
                    v += cnt[i + 1][j + 1]
                cnt[i][j] = v
        if cnt[0][0] == 0.0:
            continue
        j = 0
        kept = []
        for i in range(n):
            if j < na and s[i] == a[j] and row[n + i] * cnt[i][j] < cnt[i + 1][j + 1]:
                j += 1
            else:
                kept.append(s[i])
        out[r, :] = kept
        ok[r] = 1
    return out, ok


def common_extension(a, b):
    """ext[i, j] = length of the longest common prefix of a[i:] and b[j:]."""
    a, b = list(map(int, a)), list(map(int, b))
    na, nb = len(a), len(b)
    ext = [[0] * (nb + 1) for _ in range(na + 1)]
    for i in range(na - 1, -1, -1):
        for j in range(nb - 1, -1, -1):
            if a[i] == b[j]:
                ext[i][j] = ext[i + 1][j + 1] + 1
    return np.asarray(ext, dtype=np.int32).reshape(na + 1, nb + 1)
