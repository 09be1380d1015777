"""Artifact store, binary codecs and the async bridge"""

import asyncio
import io

import numpy as np
import pytest
from PIL import Image

from ansense.scene.coverage import ground_truth_grid
from ansense.storage.base import StorageError
from ansense.storage.codecs import (
    decode_grid, decode_params, depth_pgm, encode_grid, encode_params, instance_pgm, jsonl_lines,
    parse_jsonl, points_to_xyz, read_params_file, rgb_ppm, scene_from_dict, scene_to_dict
)
from ansense.storage.local import LocalArtifactStore
from ansense.sensor.camera import render_depth
from ansense.utils.async_helpers import sync_wrapper


def read_image(data):
    with Image.open(io.BytesIO(data)) as image:
        return np.array(image)


class TestGridCodec:

    def test_ground_truth_grid(self, box_scene):
        grid = ground_truth_grid(box_scene)
        data, sidecar = encode_grid(grid)
        assert data[:4] == b"ANSV"
        restored = decode_grid(data, sidecar)
        np.testing.assert_array_equal(restored.state, grid.state)
        np.testing.assert_array_equal(restored.origin_flag, grid.origin_flag)
        np.testing.assert_array_equal(restored.instance, grid.instance)
        assert restored.stamp == sidecar["stamp"]

    def test_bad_magic(self, box_scene):
        data, sidecar = encode_grid(ground_truth_grid(box_scene))
        with pytest.raises(StorageError):
            decode_grid(b"XXXX" + data[4:], sidecar)

    def test_truncated(self, box_scene):
        data, sidecar = encode_grid(ground_truth_grid(box_scene))
        with pytest.raises(StorageError):
            decode_grid(data[:-1], sidecar)

    def test_sidecar_must_match_occupied_count(self, box_scene):
        data, sidecar = encode_grid(ground_truth_grid(box_scene))
        sidecar = dict(sidecar, instance_runs=[])
        with pytest.raises(StorageError):
            decode_grid(data, sidecar)


class TestParamsCodec:

    def test_tensors_and_meta(self, tmp_path):
        params = {"b": np.arange(3.0), "a.weight": np.ones((2, 3)), "scalar": np.array(0.5)}
        data = encode_params(params, {"feature_size": 24})
        restored, meta = decode_params(data)
        assert meta == {"feature_size": 24}
        assert set(restored) == set(params)
        for name, value in params.items():
            np.testing.assert_array_equal(restored[name], value)
        path = tmp_path / "net.params"
        path.write_bytes(data)
        assert read_params_file(str(path))[1] == meta

    def test_trailing_bytes(self):
        with pytest.raises(StorageError):
            decode_params(encode_params({"w": np.zeros(2)}, {}) + b"\x00")

    def test_not_a_params_file(self):
        with pytest.raises(StorageError):
            decode_params(b"nonsense that is long enough for a header")

    def test_missing_file(self, tmp_path):
        with pytest.raises(StorageError) as info:
            read_params_file(str(tmp_path / "missing.params"))
        assert info.value.path.endswith("missing.params")


class TestSceneDocument:

    def test_round_trip(self, two_box_scene):
        restored = scene_from_dict(scene_to_dict(two_box_scene))
        assert restored.seed == two_box_scene.seed
        assert restored.opening_face == two_box_scene.opening_face
        np.testing.assert_array_equal(restored.labels, two_box_scene.labels)

    def test_invalid(self):
        with pytest.raises(StorageError):
            scene_from_dict({"seed": 1})


class TestImages:

    def test_depth_and_instance(self, box_scene, box_geometry, small_sensor):
        obs = render_depth(box_scene, box_geometry.start_viewpoint(), small_sensor.intrinsics)
        depth = read_image(depth_pgm(obs))
        assert depth.shape == obs.depth.shape
        hit = np.isfinite(obs.depth)
        np.testing.assert_array_equal(depth[~hit], 0)
        instance = read_image(instance_pgm(obs))
        np.testing.assert_array_equal(instance.astype(np.int64) - 1, obs.instance)

    def test_rgb(self):
        image = np.zeros((4, 5, 3), dtype=np.uint8)
        image[1, 2] = (255, 0, 10)
        np.testing.assert_array_equal(read_image(rgb_ppm(image)), image)
        with pytest.raises(ValueError):
            rgb_ppm(np.zeros((4, 5), dtype=np.uint8))


class TestText:

    def test_jsonl(self):
        records = [{"b": 1, "a": np.float64(0.5)}, {"c": [1, 2]}]
        lines = jsonl_lines(records)
        assert lines[0] == '{"a":0.5,"b":1}'
        assert parse_jsonl("\n".join(lines) + "\n\n") == [{"a": 0.5, "b": 1}, {"c": [1, 2]}]

    def test_bad_jsonl(self):
        with pytest.raises(StorageError):
            parse_jsonl("{not json}")

    def test_xyz(self):
        assert points_to_xyz(np.array([[0.5, 1.0, -2.0]])) == "0.5 1.0 -2.0\n"


class TestLocalArtifactStore:

    async def test_write_read_list(self, tmp_path):
        store = LocalArtifactStore(str(tmp_path / "run"))
        await store.write_bytes("b/data.bin", b"\x00\x01")
        await store.write_text("a.txt", "hello")
        await store.write_lines("c.jsonl", ["1", "2"])
        assert await store.read_bytes("b/data.bin") == b"\x00\x01"
        assert await store.read_text("c.jsonl") == "1\n2\n"
        assert await store.exists("a.txt")
        assert not await store.exists("missing.txt")
        assert await store.list_artifacts() == ["a.txt", "b/data.bin", "c.jsonl"]
        assert await store.list_artifacts("b") == ["b/data.bin"]
        assert await store.list_artifacts("nothing") == []

    async def test_missing_artifact(self, tmp_path):
        store = LocalArtifactStore(str(tmp_path))
        with pytest.raises(StorageError):
            await store.read_bytes("absent.bin")

    def test_paths_stay_inside_the_root(self, tmp_path):
        store = LocalArtifactStore(str(tmp_path / "run"))
        with pytest.raises(StorageError):
            sync_wrapper(store.write_text("../outside.txt", "x"))
        assert not (tmp_path / "outside.txt").exists()


class TestAsyncBridge:

    def test_sync_wrapper_outside_a_loop(self):
        async def answer():
            return 42
        assert sync_wrapper(answer()) == 42

    async def test_sync_wrapper_inside_a_loop(self):
        async def answer():
            await asyncio.sleep(0)
            return 7
        assert sync_wrapper(answer()) == 7

    def test_errors_propagate(self):
        async def fail():
            raise StorageError("boom")
        with pytest.raises(StorageError):
            sync_wrapper(fail())
