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

import logging
import os
import re

import numpy as np

from ..exceptions import MalformedHeader, TruncatedPayload, UsageError

try:
    from PIL import Image
except ImportError:  # PNG support is optional
    Image = None

_HEADER = re.compile(rb"^(P[56])\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def png_supported():
    return Image is not None


def load_image(path):
    """Load an 8-bit PGM (P5) or PPM (P6) image, or a PNG when Pillow is installed.

    Returns a float64 array of shape (height, width, channels) scaled to [0, 1].
    """
    if path.lower().endswith(".png"):
        return _load_png(path)
    with open(path, "rb") as f:
        raw = f.read()
    return decode_netpbm(raw)


def decode_netpbm(raw):
    match = _HEADER.match(raw)
    if match is None:
        raise MalformedHeader("Not a binary PGM/PPM header")
    magic, width, height, maxval = match.group(1), int(match.group(2)), int(match.group(3)), int(match.group(4))
    if maxval != 255:
        raise MalformedHeader("Only maxval 255 is supported, got {}".format(maxval))
    if width < 1 or height < 1:
        raise MalformedHeader("Invalid image size {}x{}".format(width, height))
    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    payload = raw[match.end() : match.end() + expected]
    if len(payload) < expected:
        raise TruncatedPayload("Expected {} bytes of pixel data, found {}".format(expected, len(payload)))
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return pixels.astype(np.float64) / 255.0


def encode_netpbm(image):
    pixels = to_uint8(image)
    height, width, channels = pixels.shape
    if channels not in (1, 3):
        raise UsageError("Can only write 1 or 3 channel images, got {}".format(channels))
    magic = b"P5" if channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (width, height)
    return header + pixels.tobytes()


def save_image(path, image):
    """Write an image in [0, 1] (height, width[, channels]) as PGM/PPM, or PNG by extension."""
    if path.lower().endswith(".png"):
        return _save_png(path, image)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as f:
        f.write(encode_netpbm(image))
    logging.debug("Wrote image {}".format(path))


def to_uint8(image):
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        image = image[:, :, None]
    if image.ndim != 3:
        raise UsageError("Expected a (height, width, channels) image, got shape {}".format(image.shape))
    # round half up so that k/255 maps back to k exactly
    return np.floor(np.clip(image, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def _load_png(path):
    if Image is None:
        raise UsageError("PNG support requires Pillow (pip install finola[png])")
    with Image.open(path) as img:
        mode = "L" if img.mode in ("1", "L", "I", "I;16", "F") else "RGB"
        pixels = np.asarray(img.convert(mode), dtype=np.uint8)
    if pixels.ndim == 2:
        pixels = pixels[:, :, None]
    return pixels.astype(np.float64) / 255.0


def _save_png(path, image):
    if Image is None:
        raise UsageError("PNG support requires Pillow (pip install finola[png])")
    pixels = to_uint8(image)
    mode = "L" if pixels.shape[2] == 1 else "RGB"
    Image.fromarray(pixels[:, :, 0] if mode == "L" else pixels, mode=mode).save(path)
