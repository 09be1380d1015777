"""
Numba ray kernels over voxel grids.

All coordinates handed to these kernels are in voxel units relative to the grid's
min corner: a world point p maps to (p - origin) / resolution and a ray parameter
s in voxel units is s * resolution meters along a unit world direction.

Face indices: 2 * axis + 0 for the lower face, 2 * axis + 1 for the upper face.
"""

import math

import numpy as np
from numba import njit

STATUS_TRAVERSE = 0
STATUS_WALL = 1
STATUS_MISS = 2

STATE_UNKNOWN = 0
STATE_FREE = 1
STATE_OCCUPIED = 2
ORIGIN_NONE = 0
ORIGIN_SEEN = 1

# A voxel entered this close (voxel units) to a ray's range is not counted as crossed.
TRAVERSE_EPS = 1e-9


@njit(cache=True)
def _axis_slab(p, d, n):
    """Entry/exit parameters of one slab and the side the ray enters through"""
    if abs(d) < 1e-15:
        if p < 0.0 or p > n:
            return 1.0, -1.0, 0
        return -np.inf, np.inf, -1
    t_lo = (0.0 - p) / d
    t_hi = (n - p) / d
    if t_lo < t_hi:
        return t_lo, t_hi, 0
    return t_hi, t_lo, 1


@njit(cache=True)
def _clip(v, n):
    if v < 0:
        return 0
    if v > n - 1:
        return n - 1
    return v


@njit(cache=True)
def ray_entry(px, py, pz, dx, dy, dz, nx, ny, nz, closed):
    """
    Where a ray starts traversing the grid.

    Returns (status, s, vx, vy, vz). STATUS_WALL means the ray reaches the grid
    from outside through a closed face at parameter s; STATUS_MISS means it never
    enters; STATUS_TRAVERSE gives the first voxel and the parameter at which the
    traversal starts (0 when the origin is inside).
    """
    tx0, tx1, sx = _axis_slab(px, dx, nx)
    ty0, ty1, sy = _axis_slab(py, dy, ny)
    tz0, tz1, sz = _axis_slab(pz, dz, nz)

    s_enter = tx0
    axis = 0
    side = sx
    if ty0 > s_enter:
        s_enter = ty0
        axis = 1
        side = sy
    if tz0 > s_enter:
        s_enter = tz0
        axis = 2
        side = sz
    s_exit = min(tx1, min(ty1, tz1))
    if s_exit < s_enter or s_exit < 0.0:
        return STATUS_MISS, 0.0, 0, 0, 0

    if s_enter >= 0.0:
        if closed[2 * axis + side]:
            return STATUS_WALL, s_enter, 0, 0, 0
        vx = _clip(int(math.floor(px + dx * s_enter)), nx)
        vy = _clip(int(math.floor(py + dy * s_enter)), ny)
        vz = _clip(int(math.floor(pz + dz * s_enter)), nz)
        if axis == 0:
            vx = 0 if side == 0 else nx - 1
        elif axis == 1:
            vy = 0 if side == 0 else ny - 1
        else:
            vz = 0 if side == 0 else nz - 1
        return STATUS_TRAVERSE, s_enter, vx, vy, vz

    return (STATUS_TRAVERSE, 0.0, _clip(int(math.floor(px)), nx),
            _clip(int(math.floor(py)), ny), _clip(int(math.floor(pz)), nz))


@njit(cache=True)
def _first_crossing(v, p, d):
    if d > 0.0:
        return (v + 1.0 - p) / d, 1.0 / d, 1
    if d < 0.0:
        return (v - p) / d, -1.0 / d, -1
    return np.inf, np.inf, 0


@njit(cache=True)
def march_labels(labels, p, d, closed, max_range_vox):
    """
    March one ray through ground-truth labels (-1 free, >= 0 object id).

    Returns (s, label): s is the hit parameter in voxel units (inf when nothing is
    hit within range) and label is the object id, or -1 for a wall or no hit.
    """
    nx, ny, nz = labels.shape
    status, s, vx, vy, vz = ray_entry(p[0], p[1], p[2], d[0], d[1], d[2], nx, ny, nz, closed)
    if status == STATUS_MISS:
        return np.inf, -1
    if status == STATUS_WALL:
        if s <= max_range_vox:
            return s, -1
        return np.inf, -1

    tmx, tdx, stx = _first_crossing(vx, p[0], d[0])
    tmy, tdy, sty = _first_crossing(vy, p[1], d[1])
    tmz, tdz, stz = _first_crossing(vz, p[2], d[2])

    while True:
        if s > max_range_vox:
            return np.inf, -1
        lab = labels[vx, vy, vz]
        if lab >= 0:
            return s, lab
        if tmx < tmy:
            if tmx < tmz:
                s = tmx
                vx += stx
                tmx += tdx
                axis = 0
            else:
                s = tmz
                vz += stz
                tmz += tdz
                axis = 2
        else:
            if tmy < tmz:
                s = tmy
                vy += sty
                tmy += tdy
                axis = 1
            else:
                s = tmz
                vz += stz
                tmz += tdz
                axis = 2
        if vx < 0 or vx >= nx or vy < 0 or vy >= ny or vz < 0 or vz >= nz:
            if axis == 0:
                upper = 1 if stx > 0 else 0
            elif axis == 1:
                upper = 1 if sty > 0 else 0
            else:
                upper = 1 if stz > 0 else 0
            if closed[2 * axis + upper] and s <= max_range_vox:
                return s, -1
            return np.inf, -1


@njit(cache=True)
def render_kernel(labels, p, directions, closed, max_range_vox):
    """Depth (voxel units, inf = none) and label images for (H, W, 3) ray directions"""
    h, w = directions.shape[0], directions.shape[1]
    depth = np.full((h, w), np.inf)
    instance = np.full((h, w), -1, dtype=np.int32)
    for i in range(h):
        for j in range(w):
            s, lab = march_labels(labels, p, directions[i, j], closed, max_range_vox)
            depth[i, j] = s
            instance[i, j] = lab
    return depth, instance


@njit(cache=True)
def unknown_gain_kernel(state, p, directions, closed, max_range_vox):
    """
    Count distinct UNKNOWN voxels crossed by the rays before their first OCCUPIED
    voxel; UNKNOWN and FREE voxels are transparent, closed walls stop rays.
    """
    nx, ny, nz = state.shape
    visited = np.zeros(state.shape, dtype=np.bool_)
    count = 0
    h, w = directions.shape[0], directions.shape[1]
    for i in range(h):
        for j in range(w):
            d = directions[i, j]
            status, s, vx, vy, vz = ray_entry(p[0], p[1], p[2], d[0], d[1], d[2], nx, ny, nz, closed)
            if status != STATUS_TRAVERSE:
                continue
            tmx, tdx, stx = _first_crossing(vx, p[0], d[0])
            tmy, tdy, sty = _first_crossing(vy, p[1], d[1])
            tmz, tdz, stz = _first_crossing(vz, p[2], d[2])
            while s <= max_range_vox:
                st = state[vx, vy, vz]
                if st == STATE_OCCUPIED:
                    break
                if st == STATE_UNKNOWN and not visited[vx, vy, vz]:
                    visited[vx, vy, vz] = True
                    count += 1
                if tmx < tmy:
                    if tmx < tmz:
                        s = tmx
                        vx += stx
                        tmx += tdx
                    else:
                        s = tmz
                        vz += stz
                        tmz += tdz
                else:
                    if tmy < tmz:
                        s = tmy
                        vy += sty
                        tmy += tdy
                    else:
                        s = tmz
                        vz += stz
                        tmz += tdz
                if vx < 0 or vx >= nx or vy < 0 or vy >= ny or vz < 0 or vz >= nz:
                    break
    return count


@njit(cache=True)
def traversed_kernel(shape, p, directions, depth_vox, max_range_vox):
    """
    Voxels some pixel ray enters strictly before its measured range (maxRange
    for no-hit pixels). Steps in the same order as ``march_labels``, so on a
    noise-free render every marked voxel was checked empty by that march.
    """
    nx, ny, nz = shape
    crossed = np.zeros((nx, ny, nz), dtype=np.bool_)
    open_faces = np.zeros(6, dtype=np.bool_)
    h, w = directions.shape[0], directions.shape[1]
    for i in range(h):
        for j in range(w):
            d = directions[i, j]
            status, s, vx, vy, vz = ray_entry(p[0], p[1], p[2], d[0], d[1], d[2], nx, ny, nz, open_faces)
            if status != STATUS_TRAVERSE:
                continue
            limit = depth_vox[i, j] if depth_vox[i, j] < np.inf else max_range_vox
            limit = min(limit, max_range_vox) - TRAVERSE_EPS
            tmx, tdx, stx = _first_crossing(vx, p[0], d[0])
            tmy, tdy, sty = _first_crossing(vy, p[1], d[1])
            tmz, tdz, stz = _first_crossing(vz, p[2], d[2])
            while s < limit:
                crossed[vx, vy, vz] = True
                if tmx < tmy:
                    if tmx < tmz:
                        s = tmx
                        vx += stx
                        tmx += tdx
                    else:
                        s = tmz
                        vz += stz
                        tmz += tdz
                else:
                    if tmy < tmz:
                        s = tmy
                        vy += sty
                        tmy += tdy
                    else:
                        s = tmz
                        vz += stz
                        tmz += tdz
                if vx < 0 or vx >= nx or vy < 0 or vy >= ny or vz < 0 or vz >= nz:
                    break
    return crossed


@njit(cache=True)
def carve_kernel(state, origin_flag, instance, crossed, grid_origin, resolution, center, rotation,
                 fx, fy, cx, cy, depth, max_range):
    """
    Label voxels FREE whose centre projects into the image and lies strictly
    nearer than the pixel's measured range (maxRange for no-hit pixels), and
    which a pixel ray passes through before its range (``crossed``).
    Arrays are updated in place.
    """
    nx, ny, nz = state.shape
    h, w = depth.shape
    for i in range(nx):
        wx = grid_origin[0] + (i + 0.5) * resolution - center[0]
        for j in range(ny):
            wy = grid_origin[1] + (j + 0.5) * resolution - center[1]
            for k in range(nz):
                if not crossed[i, j, k]:
                    continue
                wz = grid_origin[2] + (k + 0.5) * resolution - center[2]
                zc = rotation[0, 2] * wx + rotation[1, 2] * wy + rotation[2, 2] * wz
                if zc <= 0.0:
                    continue
                xc = rotation[0, 0] * wx + rotation[1, 0] * wy + rotation[2, 0] * wz
                yc = rotation[0, 1] * wx + rotation[1, 1] * wy + rotation[2, 1] * wz
                u = fx * xc / zc + cx
                v = fy * yc / zc + cy
                if u < 0.0 or v < 0.0:
                    continue
                col = int(math.floor(u))
                row = int(math.floor(v))
                if col >= w or row >= h:
                    continue
                dist = math.sqrt(wx * wx + wy * wy + wz * wz)
                measured = depth[row, col]
                limit = measured if measured < np.inf else max_range
                if dist < limit and dist <= max_range:
                    state[i, j, k] = STATE_FREE
                    origin_flag[i, j, k] = ORIGIN_NONE
                    instance[i, j, k] = -1


@njit(cache=True)
def mark_hits_kernel(state, origin_flag, instance, grid_origin, resolution, center,
                     directions, depth, hit_ids, bias):
    """Label the voxel containing each object hit OCCUPIED/SEEN with its id (in place)"""
    nx, ny, nz = state.shape
    h, w = depth.shape
    marked = 0
    for r in range(h):
        for c in range(w):
            d = depth[r, c]
            if not d < np.inf or hit_ids[r, c] == -2:
                continue
            t = d + bias
            vx = int(math.floor((center[0] + directions[r, c, 0] * t - grid_origin[0]) / resolution))
            vy = int(math.floor((center[1] + directions[r, c, 1] * t - grid_origin[1]) / resolution))
            vz = int(math.floor((center[2] + directions[r, c, 2] * t - grid_origin[2]) / resolution))
            if vx < 0 or vx >= nx or vy < 0 or vy >= ny or vz < 0 or vz >= nz:
                continue
            state[vx, vy, vz] = STATE_OCCUPIED
            origin_flag[vx, vy, vz] = ORIGIN_SEEN
            instance[vx, vy, vz] = hit_ids[r, c]
            marked += 1
    return marked


@njit(cache=True)
def spheres_clear_kernel(solid, grid_origin, resolution, centers, radius):
    """
    For each sphere centre, True iff no solid voxel box lies within ``radius``
    (touching counts as a collision).
    """
    nx, ny, nz = solid.shape
    n = centers.shape[0]
    out = np.ones(n, dtype=np.bool_)
    r2 = radius * radius
    for q in range(n):
        px = centers[q, 0]
        py = centers[q, 1]
        pz = centers[q, 2]
        i0 = max(0, int(math.floor((px - radius - grid_origin[0]) / resolution)))
        i1 = min(nx - 1, int(math.floor((px + radius - grid_origin[0]) / resolution)))
        j0 = max(0, int(math.floor((py - radius - grid_origin[1]) / resolution)))
        j1 = min(ny - 1, int(math.floor((py + radius - grid_origin[1]) / resolution)))
        k0 = max(0, int(math.floor((pz - radius - grid_origin[2]) / resolution)))
        k1 = min(nz - 1, int(math.floor((pz + radius - grid_origin[2]) / resolution)))
        blocked = False
        for i in range(i0, i1 + 1):
            if blocked:
                break
            lx = grid_origin[0] + i * resolution
            gx = max(max(lx - px, 0.0), px - (lx + resolution))
            for j in range(j0, j1 + 1):
                if blocked:
                    break
                ly = grid_origin[1] + j * resolution
                gy = max(max(ly - py, 0.0), py - (ly + resolution))
                for k in range(k0, k1 + 1):
                    if not solid[i, j, k]:
                        continue
                    lz = grid_origin[2] + k * resolution
                    gz = max(max(lz - pz, 0.0), pz - (lz + resolution))
                    if gx * gx + gy * gy + gz * gz <= r2:
                        blocked = True
                        break
        out[q] = not blocked
    return out
