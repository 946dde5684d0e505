"""Pure NumPy backend for the geometry kernels.

Selected automatically when the compiled extension is unavailable (or when
SECTIONLAB_KERNELS=pure). Must stay semantically identical to ``_native``:
same epsilons, same vertex-snapping, same edge-crossing canonicalization.
"""

import numpy as np

BACKEND = "pure"

EPS_PARALLEL = 1e-12   # Möller–Trumbore determinant cutoff
EPS_BARY = 1e-12       # barycentric inclusion slack (edge hits count)
EPS_ONPLANE = 1e-12    # vertex-on-plane classification for splitting


def ray_triangle_hits(origin, direction, vertices, triangles):
    """Intersect one ray with every triangle (Möller–Trumbore, two-sided).

    Parameters
    ----------
    origin, direction : (3,) float
      Ray origin and unit direction.
    vertices : (V, 3) float
    triangles : (T, 3) int

    Returns
    -------
    idx : (H,) int
      Indices into ``triangles`` of the hit triangles, unordered.
    t : (H,) float
      Ray parameters (>= 0) of the hits, aligned with ``idx``.
    """
    tris = np.asarray(triangles, dtype=np.int64)
    if len(tris) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0)
    v = np.asarray(vertices, dtype=np.float64)
    o = np.asarray(origin, dtype=np.float64)
    d = np.asarray(direction, dtype=np.float64)

    a = v[tris[:, 0]]
    e1 = v[tris[:, 1]] - a
    e2 = v[tris[:, 2]] - a
    pvec = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    ok = np.abs(det) > EPS_PARALLEL
    inv = np.zeros_like(det)
    inv[ok] = 1.0 / det[ok]
    tvec = o - a
    u = np.einsum("ij,ij->i", tvec, pvec) * inv
    qvec = np.cross(tvec, e1)
    vv = qvec @ d * inv
    t = np.einsum("ij,ij->i", e2, qvec) * inv
    hit = ok & (u >= -EPS_BARY) & (vv >= -EPS_BARY) & (u + vv <= 1.0 + EPS_BARY) & (t >= 0.0)
    idx = np.nonzero(hit)[0]
    return idx.astype(np.int64), t[idx]


def split_triangles_by_plane(vertices, triangles, axis, offset, keep_greater):
    """Split an indexed mesh by an axis-aligned plane.

    Triangles are classified against ``coord >= offset`` (``keep_greater``)
    or ``coord <= offset``; crossing triangles are subdivided. New crossing
    vertices are appended to a copy of ``vertices``, computed once per
    undirected edge (canonical low-index to high-index interpolation) and
    snapped exactly onto the plane so adjacent triangles share identical
    vertices and cut loops stay closed.

    Returns
    -------
    vertices2 : (V', 3) float
      The input vertices followed by any new crossing vertices.
    kept : (K, 3) int
    discarded : (D, 3) int
    """
    v = np.asarray(vertices, dtype=np.float64)
    tris = np.asarray(triangles, dtype=np.int64)
    out_vertices = [v]
    next_idx = len(v)
    coords = v[:, axis]
    # d > 0 means the vertex violates the kept half-space
    if keep_greater:
        dist = offset - coords
    else:
        dist = coords - offset

    kept = []
    discarded = []
    crossings = {}
    new_points = []

    def crossing(i, j):
        nonlocal next_idx
        key = (i, j) if i < j else (j, i)
        cached = crossings.get(key)
        if cached is not None:
            return cached
        a, b = key
        da, db = dist[a], dist[b]
        t = da / (da - db)
        p = v[a] + (v[b] - v[a]) * t
        p[axis] = offset  # exact snap keeps cap vertices coplanar
        new_points.append(p)
        crossings[key] = next_idx
        idx = next_idx
        next_idx += 1
        return idx

    for tri in tris:
        d = dist[tri]
        any_pos = (d > EPS_ONPLANE).any()
        any_neg = (d < -EPS_ONPLANE).any()
        if not any_pos:
            kept.append(tuple(tri))
            continue
        if not any_neg:
            discarded.append(tuple(tri))
            continue
        keep_poly = []
        disc_poly = []
        for k in range(3):
            i, j = int(tri[k]), int(tri[(k + 1) % 3])
            di, dj = d[k], d[(k + 1) % 3]
            if di <= EPS_ONPLANE:
                keep_poly.append(i)
            if di >= -EPS_ONPLANE:
                disc_poly.append(i)
            if (di > EPS_ONPLANE and dj < -EPS_ONPLANE) or \
               (di < -EPS_ONPLANE and dj > EPS_ONPLANE):
                w = crossing(i, j)
                keep_poly.append(w)
                disc_poly.append(w)
        for poly, out in ((keep_poly, kept), (disc_poly, discarded)):
            for k in range(1, len(poly) - 1):
                tri_out = (poly[0], poly[k], poly[k + 1])
                if len(set(tri_out)) == 3:
                    out.append(tri_out)

    if new_points:
        out_vertices.append(np.asarray(new_points))
    vertices2 = np.concatenate(out_vertices) if len(out_vertices) > 1 else v.copy()
    kept_arr = np.asarray(kept, dtype=np.int64).reshape(-1, 3)
    disc_arr = np.asarray(discarded, dtype=np.int64).reshape(-1, 3)
    return vertices2, kept_arr, disc_arr
