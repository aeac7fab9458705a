# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled enumeration kernel; see _enum_py.py for the reference twin.

Same contract as the pure version: walk all P**V mixed-radix states,
maintain the energy incrementally through the carry chain, histogram it.
"""

import numpy as np


def histogram_kernel(bw, edges, pair, hist_len):
    bw_arr = np.ascontiguousarray(bw, dtype=np.int64)
    pair_arr = np.ascontiguousarray(pair, dtype=np.int64)
    edges_arr = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)
    cdef long long[:, ::1] weights = bw_arr
    cdef long long[:, ::1] table = pair_arr
    cdef Py_ssize_t num_vertices = weights.shape[0]
    cdef Py_ssize_t num_states = weights.shape[1]
    cdef Py_ssize_t num_edges = edges_arr.shape[0]

    adj_lists = [[] for _ in range(num_vertices)]
    for x, y in edges_arr:
        adj_lists[x].append(y)
        adj_lists[y].append(x)
    ptr_arr = np.zeros(num_vertices + 1, dtype=np.int64)
    for i, lst in enumerate(adj_lists):
        ptr_arr[i + 1] = ptr_arr[i] + len(lst)
    flat_arr = np.array(
        [w for lst in adj_lists for w in lst] or [0], dtype=np.int64
    )
    cdef long long[::1] adj_ptr = ptr_arr
    cdef long long[::1] adj_other = flat_arr

    hist_arr = np.zeros(int(hist_len), dtype=np.int64)
    cdef long long[::1] hist = hist_arr
    digits_arr = np.zeros(num_vertices, dtype=np.int64)
    cdef long long[::1] digits = digits_arr

    cdef long long energy = 0
    cdef Py_ssize_t v, k
    cdef long long old, new, delta, w
    v = 0
    while v < num_vertices:
        energy += weights[v, 0]
        v += 1

    while True:
        hist[energy] += 1
        v = 0
        while v < num_vertices:
            old = digits[v]
            new = old + 1
            if new == num_states:
                new = 0
            delta = weights[v, new] - weights[v, old]
            for k in range(adj_ptr[v], adj_ptr[v + 1]):
                w = adj_other[k]
                delta += table[new, digits[w]] - table[old, digits[w]]
            digits[v] = new
            energy += delta
            if new:
                break
            v += 1
        if v == num_vertices:
            break
    return hist_arr.tolist()
