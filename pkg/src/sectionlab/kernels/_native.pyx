# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend for the geometry kernels.

Mirrors ``_pure`` exactly: same epsilons, same canonical low-to-high edge
interpolation, same on-plane snapping. Keep the two in lockstep.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "native"

cdef double EPS_PARALLEL = 1e-12
cdef double EPS_BARY = 1e-12
cdef double EPS_ONPLANE = 1e-12


def ray_triangle_hits(origin, direction, vertices, triangles):
    """Intersect one ray with every triangle (Möller–Trumbore, two-sided).

    Returns (idx, t): hit triangle indices (unordered) and ray parameters.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] tri = np.ascontiguousarray(triangles, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] o = np.ascontiguousarray(origin, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = np.ascontiguousarray(direction, dtype=np.float64)
    cdef Py_ssize_t n = tri.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx_out = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t_out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, hits = 0
    cdef long ia, ib, ic
    cdef double e1x, e1y, e1z, e2x, e2y, e2z
    cdef double px, py, pz, det, inv, tx, ty, tz
    cdef double qx, qy, qz, u, vv, t

    for i in range(n):
        ia = tri[i, 0]; ib = tri[i, 1]; ic = tri[i, 2]
        e1x = v[ib, 0] - v[ia, 0]; e1y = v[ib, 1] - v[ia, 1]; e1z = v[ib, 2] - v[ia, 2]
        e2x = v[ic, 0] - v[ia, 0]; e2y = v[ic, 1] - v[ia, 1]; e2z = v[ic, 2] - v[ia, 2]
        px = d[1] * e2z - d[2] * e2y
        py = d[2] * e2x - d[0] * e2z
        pz = d[0] * e2y - d[1] * e2x
        det = e1x * px + e1y * py + e1z * pz
        if det > -EPS_PARALLEL and det < EPS_PARALLEL:
            continue
        inv = 1.0 / det
        tx = o[0] - v[ia, 0]; ty = o[1] - v[ia, 1]; tz = o[2] - v[ia, 2]
        u = (tx * px + ty * py + tz * pz) * inv
        if u < -EPS_BARY:
            continue
        qx = ty * e1z - tz * e1y
        qy = tz * e1x - tx * e1z
        qz = tx * e1y - ty * e1x
        vv = (d[0] * qx + d[1] * qy + d[2] * qz) * inv
        if vv < -EPS_BARY or u + vv > 1.0 + EPS_BARY:
            continue
        t = (e2x * qx + e2y * qy + e2z * qz) * inv
        if t < 0.0:
            continue
        idx_out[hits] = i
        t_out[hits] = t
        hits += 1
    return idx_out[:hits].copy(), t_out[:hits].copy()


def split_triangles_by_plane(vertices, triangles, int axis, double offset, bint keep_greater):
    """Split an indexed mesh by an axis-aligned plane; see the pure backend."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] tris = np.ascontiguousarray(triangles, dtype=np.int64)
    cdef Py_ssize_t nv = v.shape[0]
    cdef Py_ssize_t nt = tris.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.empty(nv, dtype=np.float64)
    cdef Py_ssize_t i
    if keep_greater:
        for i in range(nv):
            dist[i] = offset - v[i, axis]
    else:
        for i in range(nv):
            dist[i] = v[i, axis] - offset

    kept = []
    discarded = []
    crossings = {}
    new_points = []
    cdef Py_ssize_t next_idx = nv
    cdef long ti[3]
    cdef double dd[3]
    cdef long keep_poly[4]
    cdef long disc_poly[4]
    cdef int nk, nd, k, kk
    cdef long a, b, w, p0, p1, p2
    cdef double di, dj, tpar, cx, cy, cz
    cdef bint any_pos, any_neg

    for i in range(nt):
        ti[0] = tris[i, 0]; ti[1] = tris[i, 1]; ti[2] = tris[i, 2]
        dd[0] = dist[ti[0]]; dd[1] = dist[ti[1]]; dd[2] = dist[ti[2]]
        any_pos = dd[0] > EPS_ONPLANE or dd[1] > EPS_ONPLANE or dd[2] > EPS_ONPLANE
        any_neg = dd[0] < -EPS_ONPLANE or dd[1] < -EPS_ONPLANE or dd[2] < -EPS_ONPLANE
        if not any_pos:
            kept.append((ti[0], ti[1], ti[2]))
            continue
        if not any_neg:
            discarded.append((ti[0], ti[1], ti[2]))
            continue
        nk = 0
        nd = 0
        for k in range(3):
            kk = (k + 1) % 3
            di = dd[k]
            dj = dd[kk]
            if di <= EPS_ONPLANE:
                keep_poly[nk] = ti[k]; nk += 1
            if di >= -EPS_ONPLANE:
                disc_poly[nd] = ti[k]; nd += 1
            if (di > EPS_ONPLANE and dj < -EPS_ONPLANE) or \
               (di < -EPS_ONPLANE and dj > EPS_ONPLANE):
                if ti[k] < ti[kk]:
                    a = ti[k]; b = ti[kk]
                else:
                    a = ti[kk]; b = ti[k]
                cached = crossings.get((a, b))
                if cached is None:
                    tpar = dist[a] / (dist[a] - dist[b])
                    cx = v[a, 0] + (v[b, 0] - v[a, 0]) * tpar
                    cy = v[a, 1] + (v[b, 1] - v[a, 1]) * tpar
                    cz = v[a, 2] + (v[b, 2] - v[a, 2]) * tpar
                    if axis == 0:
                        cx = offset
                    elif axis == 1:
                        cy = offset
                    else:
                        cz = offset
                    new_points.append((cx, cy, cz))
                    w = next_idx
                    crossings[(a, b)] = w
                    next_idx += 1
                else:
                    w = cached
                keep_poly[nk] = w; nk += 1
                disc_poly[nd] = w; nd += 1
        for k in range(1, nk - 1):
            p0 = keep_poly[0]; p1 = keep_poly[k]; p2 = keep_poly[k + 1]
            if p0 != p1 and p1 != p2 and p0 != p2:
                kept.append((p0, p1, p2))
        for k in range(1, nd - 1):
            p0 = disc_poly[0]; p1 = disc_poly[k]; p2 = disc_poly[k + 1]
            if p0 != p1 and p1 != p2 and p0 != p2:
                discarded.append((p0, p1, p2))

    if new_points:
        vertices2 = np.concatenate([v, np.asarray(new_points, dtype=np.float64)])
    else:
        vertices2 = v.copy()
    kept_arr = np.asarray(kept, dtype=np.int64).reshape(-1, 3)
    disc_arr = np.asarray(discarded, dtype=np.int64).reshape(-1, 3)
    return vertices2, kept_arr, disc_arr
