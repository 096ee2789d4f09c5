# Compiled kernel for the per-timeslot scheduling decision.
#
# Arrays are node-indexed: 0 is the left sink, 1..n the sensors; entry 0 of
# residual/q_lo/q_hi is unused padding.  indptr/indices hold the downstream
# sensor neighbors of nodes 0..n (right sink excluded; sink_ok flags it).
# Weights residual[j] * ((q_hi[j]<<64)|q_lo[j]) stay below 2**96 by the
# caller's lcm eligibility check, so 128-bit route sums cannot overflow.

from libc.stdlib cimport free, malloc

cdef extern from *:
    ctypedef long long int128 "__int128"


def min_route_size(int n, int[::1] indptr, int[::1] indices,
                   unsigned char[::1] sink_ok, long long[::1] residual):
    """BFS hop count of the shortest candidate route, in sensors; -1 if none."""
    cdef int* dist = <int*>malloc((n + 1) * sizeof(int))
    cdef int* queue = <int*>malloc((n + 1) * sizeof(int))
    cdef int head = 0, tail = 0, u, j, idx, result = -1
    if dist == NULL or queue == NULL:
        free(dist)
        free(queue)
        raise MemoryError()
    for u in range(n + 1):
        dist[u] = -1
    dist[0] = 0
    queue[tail] = 0
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        if sink_ok[u]:
            result = dist[u]
            break
        for idx in range(indptr[u], indptr[u + 1]):
            j = indices[idx]
            if residual[j] >= 1 and dist[j] < 0:
                dist[j] = dist[u] + 1
                queue[tail] = j
                tail += 1
    free(dist)
    free(queue)
    return result


def dp_route(int n, int[::1] indptr, int[::1] indices,
             unsigned char[::1] sink_ok,
             unsigned long long[::1] q_lo, unsigned long long[::1] q_hi,
             long long[::1] residual, int m, int[::1] out):
    """Lexicographically smallest max-weight route of exactly m sensors.

    Writes the route into `out` and returns its length, or -1 when no
    connected m-sensor candidate route exists.
    """
    cdef Py_ssize_t size = (<Py_ssize_t>(n + 1)) * (m + 1)
    cdef int128* g = <int128*>malloc(size * sizeof(int128))
    cdef unsigned char* ok = <unsigned char*>malloc(size)
    cdef int* choice = <int*>malloc(size * sizeof(int))
    cdef int128* w = <int128*>malloc((n + 1) * sizeof(int128))
    cdef Py_ssize_t base, jbase
    cdef int i, j, k, idx, arg, count
    cdef int128 best, v
    cdef bint has
    if g == NULL or ok == NULL or choice == NULL or w == NULL:
        free(g); free(ok); free(choice); free(w)
        raise MemoryError()

    w[0] = 0
    for j in range(1, n + 1):
        if residual[j] >= 1:
            w[j] = (<int128>residual[j]) * (
                ((<int128>q_hi[j]) << 64) | (<int128>q_lo[j]))
        else:
            w[j] = 0

    for i in range(n, -1, -1):
        base = (<Py_ssize_t>i) * (m + 1)
        ok[base] = sink_ok[i]
        g[base] = 0
        for k in range(1, m + 1):
            has = False
            best = 0
            arg = 0
            for idx in range(indptr[i], indptr[i + 1]):
                j = indices[idx]
                if w[j] > 0:
                    jbase = (<Py_ssize_t>j) * (m + 1) + (k - 1)
                    if ok[jbase]:
                        v = g[jbase] + w[j]
                        if (not has) or v > best:
                            has = True
                            best = v
                            arg = j
            ok[base + k] = has
            g[base + k] = best
            choice[base + k] = arg

    if not ok[m]:
        count = -1
    else:
        count = 0
        i = 0
        k = m
        while k > 0:
            j = choice[(<Py_ssize_t>i) * (m + 1) + k]
            out[count] = j
            count += 1
            i = j
            k -= 1
    free(g)
    free(ok)
    free(choice)
    free(w)
    return count
