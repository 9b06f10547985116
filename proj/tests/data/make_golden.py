#!/usr/bin/env python3
"""Regenerates the golden UQT1 files with an encoder independent of the C++ code."""
import json
import pathlib
import struct

HERE = pathlib.Path(__file__).parent


def write(name, kind, shape, values):
    header = json.dumps(
        {"kind": kind, "shape": shape, "dtype": "f32", "order": "row-major"},
        separators=(",", ":"),
    ).encode("utf-8")
    payload = struct.pack("<%df" % len(values), *values)
    blob = b"UQT1" + struct.pack("<I", len(header)) + header + payload
    (HERE / name).write_bytes(blob)


write("golden_classifier.uqt", "classifier-softmax", [2, 1, 3],
      [0.7, 0.2, 0.1, 0.1, 0.1, 0.8])
write("golden_regression.uqt", "regression", [2, 3],
      [1.0, 3.0, 2.0, -0.5, 0.25, 1e-3])
