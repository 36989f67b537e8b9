"""Pure-numpy fallback for the hot kernels.

Same API as the compiled ``treecost._kernels`` extension: batch decoding of
extended Pruefer codes, batch cost evaluation, and one genetic-search epoch.
Row ``i`` of every 2-D argument describes a tree with ``ns[i]`` vertices;
columns past a row's own width are padding.

Spectral radii are taken from LAPACK's symmetric eigensolver on zero-padded
adjacency batches (padding only adds zero eigenvalues, which never beat the
true radius of a connected skeleton).
"""
import numpy as np

BACKEND = "python"

_EIG_CHUNK = 4096


def _decode_row(coderow, n, out):
    # linear smallest-leaf-first Pruefer decode, then orient away from root
    deg = [1] * n
    for i in range(n - 2):
        deg[coderow[i]] += 1
    nbr = [[] for _ in range(n)]
    ptr = 0
    leaf = -1
    for i in range(n - 2):
        c = coderow[i]
        if leaf < 0:
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
        nbr[leaf].append(c)
        nbr[c].append(leaf)
        deg[leaf] = 0
        deg[c] -= 1
        if deg[c] == 1 and c < ptr:
            leaf = c
        else:
            leaf = -1
    first = -1
    for v in range(n):
        if deg[v] == 1:
            if first < 0:
                first = v
            else:
                nbr[first].append(v)
                nbr[v].append(first)
    root = coderow[n - 2]
    out[root] = -1
    stack = [root]
    while stack:
        x = stack.pop()
        for y in nbr[x]:
            if out[y] == -2:
                out[y] = x
                stack.append(y)


def decode_codes(codes, ns):
    """Decode a batch of packed extended codes into parent arrays."""
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    ns = np.asarray(ns, dtype=np.int64)
    b = codes.shape[0]
    parents = np.full((b, codes.shape[1] + 1), -2, dtype=np.int64)
    for i in range(b):
        n = int(ns[i])
        _decode_row(codes[i].tolist(), n, parents[i])
    return parents


def costs_from_parents(parents, ns):
    """Per-row (h_ks, h_deg) in bits for a batch of parent arrays."""
    parents = np.asarray(parents, dtype=np.int64)
    ns = np.asarray(ns, dtype=np.int64)
    if (ns < 2).any():
        raise ValueError("cost kernels require n >= 2")
    b, width = parents.shape
    h_ks = np.empty(b)
    h_deg = np.empty(b)
    for i in range(b):
        n = int(ns[i])
        par = parents[i, :n]
        child_counts = np.bincount(par[par >= 0], minlength=n)
        freq = np.bincount(child_counts)
        p = freq[freq > 0] / n
        h_deg[i] = -(p * np.log2(p)).sum()
    for lo in range(0, b, _EIG_CHUNK):
        hi = min(lo + _EIG_CHUNK, b)
        chunk = parents[lo:hi]
        adj = np.zeros((hi - lo, width, width))
        ib, iv = np.nonzero(chunk >= 0)
        ip = chunk[ib, iv]
        adj[ib, ip, iv] = 1.0
        adj[ib, iv, ip] = 1.0
        lam = np.linalg.eigvalsh(adj)[:, -1]
        h_ks[lo:hi] = np.log2(lam)
    return h_ks, h_deg


def ga_epoch(codes, ns, h_ks, h_deg, pos, offset, eps, rho):
    """One mutate/evaluate/select sweep over all members, in place.

    Mutates ``codes`` rows at ``pos`` (new symbol = old + offset mod n),
    accepts a mutant iff rho*dh_ks - (1-rho)*dh_deg + eps > 0, and updates
    the cost arrays for accepted rows.  Returns the number accepted.
    """
    b = codes.shape[0]
    rows = np.arange(b)
    old = codes[rows, pos].copy()
    codes[rows, pos] = (old + offset) % ns
    parents = decode_codes(codes, ns)
    new_ks, new_deg = costs_from_parents(parents, ns)
    dlam = rho * (new_ks - h_ks) - (1.0 - rho) * (new_deg - h_deg) + eps
    accept = dlam > 0.0
    rej = rows[~accept]
    codes[rej, pos[~accept]] = old[~accept]
    h_ks[accept] = new_ks[accept]
    h_deg[accept] = new_deg[accept]
    return int(accept.sum())
