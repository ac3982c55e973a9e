#
# Copyright 2024 European Centre for Medium-Range Weather Forecasts (ECMWF)
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
# In applying this licence, ECMWF does not waive the privileges and immunities
# granted to it by virtue of its status as an intergovernmental organisation nor
# does it submit to any jurisdiction.
#

from collections import OrderedDict

import numpy as np
import pytest

from finola.common.dataset import create_dataset
from finola.common.dataset.folder import resize_nearest
from finola.common.exceptions import CheckpointError, MalformedHeader, ShapeMismatch, TruncatedPayload, UsageError
from finola.common.io import Checkpoint, load_checkpoint, read_csv, save_checkpoint, write_csv
from finola.common.io.checkpoint import dumps, loads
from finola.common.io.image import decode_netpbm, encode_netpbm, load_image, save_image


class TestImages:
    def test_gray_round_trip_is_exact(self, tmp_path, rng):
        pixels = rng.integers(0, 256, size=(5, 7, 1))
        path = str(tmp_path / "a.pgm")
        save_image(path, pixels / 255.0)
        loaded = load_image(path)
        assert loaded.shape == (5, 7, 1)
        assert np.array_equal(np.rint(loaded * 255.0).astype(int), pixels)
        assert open(path, "rb").read().startswith(b"P5\n7 5\n255\n")

    def test_colour_round_trip_is_exact(self, tmp_path, rng):
        pixels = rng.integers(0, 256, size=(4, 3, 3))
        path = str(tmp_path / "a.ppm")
        save_image(path, pixels / 255.0)
        assert np.array_equal(load_image(path), pixels / 255.0)

    def test_single_pixel(self):
        raw = b"P5\n1 1\n255\n" + bytes([128])
        assert decode_netpbm(raw)[0, 0, 0] == 128 / 255.0

    def test_header_comments(self):
        raw = b"P5\n# made by hand\n2 1\n# max\n255\n" + bytes([0, 255])
        assert decode_netpbm(raw)[0, :, 0].tolist() == [0.0, 1.0]

    def test_bad_magic(self):
        with pytest.raises(MalformedHeader):
            decode_netpbm(b"P2\n1 1\n255\n0")

    def test_sixteen_bit_rejected(self):
        with pytest.raises(MalformedHeader):
            decode_netpbm(b"P5\n1 1\n65535\n\x00\x00")

    def test_truncated(self):
        with pytest.raises(TruncatedPayload):
            decode_netpbm(b"P5\n2 2\n255\n\x00\x00\x00")

    def test_values_are_clipped_on_write(self):
        raw = encode_netpbm(np.array([[-1.0, 2.0]]))
        assert raw.endswith(bytes([0, 255]))

    def test_two_channels_rejected(self):
        with pytest.raises(UsageError):
            encode_netpbm(np.zeros((2, 2, 2)))


def sample_checkpoint():
    tensors = OrderedDict()
    tensors["finola.A"] = np.arange(16, dtype=np.float64).reshape(4, 4) / 3.0
    tensors["encoder.head.bias"] = np.array([1e-300, -0.0, np.pi])
    tensors["scalar"] = np.array(2.5)
    return Checkpoint(
        channels=4,
        paths=1,
        map_width=4,
        map_height=4,
        image_width=8,
        image_height=8,
        image_channels=1,
        seed=42,
        epoch=7,
        tensors=tensors,
        config={"channels": 4, "ordering": "averaged"},
    )


class TestCheckpoint:
    def test_round_trip_is_bitwise(self, tmp_path):
        original = sample_checkpoint()
        path = str(tmp_path / "c.fnla")
        save_checkpoint(path, original)
        loaded = load_checkpoint(path)
        assert loaded.dims() == original.dims()
        assert (loaded.seed, loaded.epoch) == (42, 7)
        assert loaded.config == original.config
        assert list(loaded.tensors) == list(original.tensors)
        for name, tensor in original.tensors.items():
            assert loaded.tensors[name].shape == tensor.shape
            assert loaded.tensors[name].tobytes() == tensor.tobytes()

    def test_bytes_are_reproducible(self):
        assert dumps(sample_checkpoint()) == dumps(sample_checkpoint())

    def test_bad_magic(self):
        raw = dumps(sample_checkpoint())
        with pytest.raises(MalformedHeader):
            loads(b"XXXX" + raw[4:])

    def test_version_mismatch(self):
        raw = bytearray(dumps(sample_checkpoint()))
        raw[4] = 9
        with pytest.raises(CheckpointError):
            loads(bytes(raw))

    def test_truncated(self):
        raw = dumps(sample_checkpoint())
        with pytest.raises(TruncatedPayload):
            loads(raw[:-1])

    def test_trailing_bytes(self):
        with pytest.raises(CheckpointError):
            loads(dumps(sample_checkpoint()) + b"\x00")

    def test_tensor_name_not_utf8(self):
        raw = bytearray(dumps(sample_checkpoint()))
        raw[raw.index(b"finola.A")] = 0xFF
        with pytest.raises(MalformedHeader):
            loads(bytes(raw))

    def test_duplicate_tensor_name(self):
        checkpoint = sample_checkpoint()
        checkpoint.tensors["finola.B"] = np.ones(2)
        raw = dumps(checkpoint).replace(b"finola.B", b"finola.A")
        with pytest.raises(MalformedHeader):
            loads(raw)

    @pytest.mark.parametrize("config", [[1, 2], "channels", 3])
    def test_config_must_be_a_mapping(self, config):
        checkpoint = sample_checkpoint()
        checkpoint.config = config
        with pytest.raises(MalformedHeader):
            loads(dumps(checkpoint))


class TestTables:
    def test_write_and_read(self, tmp_path):
        path = str(tmp_path / "sub" / "t.csv")
        write_csv(path, ["k", "value"], [[1, 0.1], [2, 1 / 3]])
        header, rows = read_csv(path)
        assert header == ["k", "value"]
        assert rows == [["1", "0.1"], ["2", repr(1 / 3)]]
        assert float(rows[1][1]) == 1 / 3


class TestDatasets:
    def test_synthetic_is_seeded(self):
        a = create_dataset({"synthetic": {"count": 4, "seed": 5}}, 16, 8, 3)
        b = create_dataset({"synthetic": {"count": 4, "seed": 5}}, 16, 8, 3)
        c = create_dataset({"synthetic": {"count": 4, "seed": 6}}, 16, 8, 3)
        assert len(a) == 4
        assert a.get_type() == "synthetic"
        assert a[2].shape == (8, 16, 3)
        assert np.array_equal(a.as_array(), b.as_array())
        assert not np.array_equal(a[0], c[0])
        assert a[1].min() >= 0.0 and a[1].max() <= 1.0

    def test_synthetic_index_range(self):
        dataset = create_dataset("synthetic", 8, 8, 1)
        assert len(dataset) == 512
        with pytest.raises(IndexError):
            dataset[512]

    def test_unknown_type(self):
        with pytest.raises(KeyError):
            create_dataset({"cifar": {}}, 8, 8, 1)

    def test_folder(self, tmp_path, rng):
        for name in ("b.pgm", "a.pgm"):
            save_image(str(tmp_path / name), rng.uniform(size=(8, 8)))
        (tmp_path / "notes.txt").write_text("ignored")
        dataset = create_dataset({"folder": {"path": str(tmp_path)}}, 8, 8, 3)
        assert len(dataset) == 2
        assert dataset.files[0].endswith("a.pgm")
        image = dataset[0]
        assert image.shape == (8, 8, 3)
        assert np.array_equal(image[:, :, 0], image[:, :, 2])

    def test_folder_shape_mismatch(self, tmp_path):
        save_image(str(tmp_path / "a.pgm"), np.zeros((4, 4)))
        with pytest.raises(ShapeMismatch):
            create_dataset({"folder": {"path": str(tmp_path)}}, 8, 8, 1)[0]
        resized = create_dataset({"folder": {"path": str(tmp_path), "resize": True}}, 8, 8, 1)[0]
        assert resized.shape == (8, 8, 1)

    def test_folder_missing(self, tmp_path):
        with pytest.raises(UsageError):
            create_dataset({"folder": {"path": str(tmp_path / "nope")}}, 8, 8, 1)

    def test_resize_nearest(self):
        image = np.arange(4, dtype=np.float64).reshape(2, 2, 1)
        assert resize_nearest(image, 4, 4)[:, :, 0].tolist() == [[0, 0, 1, 1], [0, 0, 1, 1], [2, 2, 3, 3], [2, 2, 3, 3]]
