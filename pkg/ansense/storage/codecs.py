"""
Artifact codecs

- belief grids: run-length-encoded binary with a 16-byte header plus a JSON
  sidecar holding dims and the instance ids of OCCUPIED voxels
- parameter files: versioned binary (header, JSON metadata, shape table,
  little-endian float64 data) shared by the surrogate and the sequence model
- scenes: JSON documents
- images: PGM/PPM through Pillow
"""

import io
import json
import struct
from pathlib import Path
from typing import Dict, Iterable, List, Tuple

import numpy as np
from PIL import Image

from ..core.utils import dumps_line, to_jsonable
from ..models.camera import Observation
from ..models.grid import BeliefGrid, GridDims, NO_INSTANCE, VoxelState
from ..models.scene import GroundTruthObject, ObjectShape, OpeningFace, SceneSpec
from .base import StorageError

GRID_MAGIC = b"ANSV"
GRID_VERSION = 1
_GRID_HEADER = struct.Struct("<4sHHHHI")    # magic, version, nx, ny, nz, run count
_GRID_RUN = struct.Struct("<BI")            # state << 2 | origin flag, run length

PARAMS_MAGIC = b"ANSP"
PARAMS_VERSION = 1
_PARAMS_HEADER = struct.Struct("<4sHHII")   # magic, version, reserved, tensor count, metadata bytes


def _runs(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(value, length) runs of a flat array"""
    if values.size == 0:
        return values[:0], np.zeros(0, dtype=np.int64)
    starts = np.flatnonzero(np.concatenate([[True], values[1:] != values[:-1]]))
    lengths = np.diff(np.concatenate([starts, [values.size]]))
    return values[starts], lengths


def encode_grid(grid: BeliefGrid) -> Tuple[bytes, dict]:
    """Binary RLE of (state, origin flag) in C order plus the JSON sidecar"""
    nx, ny, nz = grid.dims.shape
    codes = (grid.state.ravel().astype(np.uint8) << 2) | grid.origin_flag.ravel().astype(np.uint8)
    values, lengths = _runs(codes)
    body = b"".join(_GRID_RUN.pack(int(v), int(n)) for v, n in zip(values, lengths))
    header = _GRID_HEADER.pack(GRID_MAGIC, GRID_VERSION, nx, ny, nz, len(values))
    ids, counts = _runs(grid.instance.ravel()[grid.occupied_mask.ravel()])
    sidecar = {
        "dims": grid.dims.to_dict(),
        "stamp": grid.stamp,
        "instance_runs": [[int(i), int(n)] for i, n in zip(ids, counts)],
    }
    return header + body, sidecar


def decode_grid(data: bytes, sidecar: dict) -> BeliefGrid:
    """
    Inverse of encode_grid.

    Raises:
        StorageError: On a bad header, truncated runs or inconsistent sidecar
    """
    if len(data) < _GRID_HEADER.size:
        raise StorageError("Grid file shorter than its header")
    magic, version, nx, ny, nz, n_runs = _GRID_HEADER.unpack_from(data, 0)
    if magic != GRID_MAGIC:
        raise StorageError(f"Not a belief grid file (magic {magic!r})")
    if version != GRID_VERSION:
        raise StorageError(f"Unsupported grid version {version}")
    dims = GridDims.from_dict(sidecar["dims"])
    if dims.shape != (nx, ny, nz):
        raise StorageError(f"Grid header dims {(nx, ny, nz)} disagree with sidecar {dims.shape}")
    if len(data) != _GRID_HEADER.size + n_runs * _GRID_RUN.size:
        raise StorageError("Grid file length does not match its run count")

    runs = np.frombuffer(data, dtype=np.dtype([("code", "<u1"), ("length", "<u4")]),
                         count=n_runs, offset=_GRID_HEADER.size)
    codes = np.repeat(runs["code"], runs["length"].astype(np.int64))
    if codes.size != dims.size:
        raise StorageError(f"Grid runs cover {codes.size} voxels, expected {dims.size}")
    state = (codes >> 2).astype(np.uint8)
    origin = (codes & 0b11).astype(np.uint8)

    instance = np.full(dims.size, NO_INSTANCE, dtype=np.int32)
    occupied = state == VoxelState.OCCUPIED
    id_runs = sidecar.get("instance_runs", [])
    ids = np.repeat([int(i) for i, _ in id_runs], [int(n) for _, n in id_runs]).astype(np.int32)
    if ids.size != int(occupied.sum()):
        raise StorageError("Instance sidecar does not match the OCCUPIED voxel count")
    instance[occupied] = ids
    shape = dims.shape
    return BeliefGrid(dims, state.reshape(shape), origin.reshape(shape), instance.reshape(shape))


def encode_params(params: Dict[str, np.ndarray], meta: dict) -> bytes:
    """Versioned parameter file; tensors are written in sorted name order"""
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    names = sorted(params)
    table = []
    blobs = []
    for name in names:
        arr = np.ascontiguousarray(params[name], dtype="<f8")
        encoded = name.encode("utf-8")
        table.append(struct.pack("<H", len(encoded)) + encoded + struct.pack("<B", arr.ndim)
                     + struct.pack(f"<{arr.ndim}I", *arr.shape))
        blobs.append(arr.tobytes())
    header = _PARAMS_HEADER.pack(PARAMS_MAGIC, PARAMS_VERSION, 0, len(names), len(meta_bytes))
    return header + meta_bytes + b"".join(table) + b"".join(blobs)


def decode_params(data: bytes) -> Tuple[Dict[str, np.ndarray], dict]:
    """
    Inverse of encode_params.

    Raises:
        StorageError: On a bad header or truncated content
    """
    try:
        magic, version, _, count, meta_len = _PARAMS_HEADER.unpack_from(data, 0)
        if magic != PARAMS_MAGIC:
            raise StorageError(f"Not a parameter file (magic {magic!r})")
        if version != PARAMS_VERSION:
            raise StorageError(f"Unsupported parameter file version {version}")
        offset = _PARAMS_HEADER.size
        meta = json.loads(data[offset:offset + meta_len].decode("utf-8"))
        offset += meta_len
        shapes = []
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", data, offset)
            offset += 2
            name = data[offset:offset + name_len].decode("utf-8")
            offset += name_len
            (ndim,) = struct.unpack_from("<B", data, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}I", data, offset)
            offset += 4 * ndim
            shapes.append((name, shape))
        params = {}
        for name, shape in shapes:
            size = int(np.prod(shape)) if shape else 1
            arr = np.frombuffer(data, dtype="<f8", count=size, offset=offset)
            params[name] = arr.reshape(shape).astype(np.float64)
            offset += 8 * size
    except (struct.error, ValueError, UnicodeDecodeError) as e:
        raise StorageError(f"Corrupt parameter file: {e}") from e
    if offset != len(data):
        raise StorageError(f"Parameter file has {len(data) - offset} trailing bytes")
    return params, meta


def read_params_file(path: str) -> Tuple[Dict[str, np.ndarray], dict]:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise StorageError(f"Failed to read parameters: {e}", str(path)) from e
    try:
        return decode_params(data)
    except StorageError as e:
        raise StorageError(str(e), str(path)) from e


def scene_to_dict(spec: SceneSpec) -> dict:
    return to_jsonable({
        "seed": spec.seed,
        "dims": spec.dims.to_dict(),
        "opening_face": spec.opening_face.value,
        "cabinet_height": spec.cabinet_height,
        "extents": list(spec.extents),
        "base_offset": list(spec.base_offset),
        "volume": spec.volume,
        "objects": [dict(obj.to_dict(), voxels=obj.voxels.tolist()) for obj in spec.objects],
    })


def scene_from_dict(data: dict) -> SceneSpec:
    try:
        objects = [GroundTruthObject(int(o["id"]), ObjectShape(o["shape"]), tuple(o["position"]),
                                     float(o["yaw"]), tuple(o["size"]),
                                     np.asarray(o["voxels"], dtype=np.int64).reshape(-1, 3))
                   for o in data["objects"]]
        return SceneSpec(dims=GridDims.from_dict(data["dims"]),
                         opening_face=OpeningFace(data["opening_face"]),
                         cabinet_height=float(data["cabinet_height"]),
                         objects=objects, seed=int(data["seed"]),
                         extents=tuple(data["extents"]), base_offset=tuple(data["base_offset"]))
    except (KeyError, TypeError, ValueError) as e:
        raise StorageError(f"Invalid scene document: {e}") from e


def _image_bytes(array: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(array).save(buffer, format="PPM")
    return buffer.getvalue()


def depth_pgm(obs: Observation) -> bytes:
    """16-bit PGM of the depth image in millimetres, 0 where nothing was hit"""
    depth = np.where(np.isfinite(obs.depth), np.round(obs.depth * 1000.0), 0.0)
    return _image_bytes(np.clip(depth, 0, 65535).astype(np.uint16))


def instance_pgm(obs: Observation) -> bytes:
    """16-bit PGM of instance ids stored as id + 1, 0 where no object was hit"""
    return _image_bytes(np.clip(obs.instance.astype(np.int64) + 1, 0, 65535).astype(np.uint16))


def rgb_ppm(image: np.ndarray) -> bytes:
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"Expected an (H, W, 3) image, got {image.shape}")
    return _image_bytes(np.ascontiguousarray(image, dtype=np.uint8))


def points_to_xyz(points: np.ndarray) -> str:
    """ASCII XYZ, one point per line"""
    return "".join(f"{float(x)!r} {float(y)!r} {float(z)!r}\n" for x, y, z in np.asarray(points, dtype=np.float64).reshape(-1, 3))


def jsonl_lines(records: Iterable[dict]) -> List[str]:
    return [dumps_line(r) for r in records]


def parse_jsonl(text: str) -> List[dict]:
    try:
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as e:
        raise StorageError(f"Invalid JSONL record: {e}") from e
