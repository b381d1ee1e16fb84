#!/usr/bin/env python3
# Copyright (c) the scodec authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reader and writer for SCWT weight files.

This is the exchange point between a training script and the scodec
binaries. A trainer exports its parameters with `write_scwt`; the codec
loads the file with `scodec -w FILE ...`. See FORMAT.md for the layout.

Command line:
  scwt.py info FILE
  scwt.py from-schema SCHEMA_TSV OUT [--arch FILE] [--seed N]

`from-schema` reads the output of `scodec schema` and writes a randomly
initialised store with exactly those parameters.
"""

import argparse
import hashlib
import re
import struct
import sys

import numpy as np

MAGIC = b"SCWT"
VERSION = 1
DTYPE_F32 = 0


class ScwtError(Exception):
    pass


def _canonical_body(config_text, params):
    """Config block, count and rank-4 records in name order."""
    cfg = config_text.encode("utf-8")
    out = [struct.pack("<I", len(cfg)), cfg, struct.pack("<I", len(params))]
    for name in sorted(params):
        arr = np.ascontiguousarray(params[name], dtype="<f4")
        if arr.ndim > 4:
            raise ScwtError(f"parameter {name!r} has rank {arr.ndim} > 4")
        shape = (1,) * (4 - arr.ndim) + tuple(arr.shape)
        raw = name.encode("utf-8")
        out.append(struct.pack("<H", len(raw)))
        out.append(raw)
        out.append(struct.pack("<BB4I", DTYPE_F32, 4, *shape))
        out.append(arr.tobytes())
    return b"".join(out)


def model_id(config_text, params):
    """First 8 bytes of SHA-256 over the canonical body."""
    return hashlib.sha256(_canonical_body(config_text, params)).digest()[:8]


def write_scwt(path, config_text, params):
    """Writes `params` (name -> float array, rank <= 4). Returns the model id."""
    body = _canonical_body(config_text, params)
    mid = hashlib.sha256(body).digest()[:8]
    with open(path, "wb") as f:
        f.write(MAGIC + struct.pack("<H", VERSION) + body + mid)
    return mid


def read_scwt(path):
    """Returns (config_text, params, model_id); params are rank-4 float32."""
    with open(path, "rb") as f:
        data = f.read()
    pos = 0

    def take(n, what):
        nonlocal pos
        if pos + n > len(data):
            raise ScwtError(f"truncated {what} at offset {pos}")
        chunk = data[pos:pos + n]
        pos += n
        return chunk

    if take(4, "magic") != MAGIC:
        raise ScwtError("not a weight file (bad magic at offset 0)")
    (version,) = struct.unpack("<H", take(2, "version"))
    if version != VERSION:
        raise ScwtError(f"unsupported weight file version {version}")
    (cfg_len,) = struct.unpack("<I", take(4, "config length"))
    config_text = take(cfg_len, "config block").decode("utf-8")
    (count,) = struct.unpack("<I", take(4, "parameter count"))
    params = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", take(2, "name length"))
        name = take(name_len, "name").decode("utf-8")
        dtype, rank = struct.unpack("<BB", take(2, "dtype/rank"))
        if dtype != DTYPE_F32:
            raise ScwtError(f"parameter {name!r}: unknown dtype {dtype}")
        if rank > 4:
            raise ScwtError(f"parameter {name!r}: rank {rank} > 4")
        dims = struct.unpack(f"<{rank}I", take(4 * rank, "extents"))
        shape = (1,) * (4 - rank) + dims
        n = int(np.prod(shape))
        arr = np.frombuffer(take(4 * n, "payload"), dtype="<f4").reshape(shape)
        if name in params:
            raise ScwtError(f"duplicate parameter {name!r}")
        params[name] = arr.astype(np.float32)
    stored = take(8, "model id")
    if pos != len(data):
        raise ScwtError(f"trailing bytes after model id at offset {pos}")
    computed = model_id(config_text, params)
    if stored != computed:
        raise ScwtError(f"weight digest mismatch: stored {stored.hex()}, "
                        f"computed {computed.hex()}")
    return config_text, params, stored


_SHAPE = re.compile(r"^\((\d+),(\d+),(\d+),(\d+)\)$")


def parse_schema(text):
    """Parses `scodec schema` output: one `name<TAB>(n,c,h,w)` per line."""
    schema = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            name, shape = line.split("\t")
            m = _SHAPE.match(shape.strip())
            if m is None:
                raise ValueError
        except ValueError:
            raise ScwtError(f"schema line {lineno}: cannot parse {line!r}")
        schema[name] = tuple(int(g) for g in m.groups())
    return schema


def random_params(schema, seed):
    """Fan-in scaled uniform weights, small biases, positive prior scales."""
    rng = np.random.default_rng(seed)
    params = {}
    for name, shape in sorted(schema.items()):
        if name == "z_prior.location":
            arr = rng.uniform(-0.3, 0.3, shape)
        elif name == "z_prior.scale":
            arr = rng.uniform(0.3, 1.5, shape)
        elif name.endswith(".weight"):
            fan_in = shape[1] * shape[2] * shape[3]
            bound = 0.5 * np.sqrt(3.0 / fan_in)
            arr = rng.uniform(-bound, bound, shape)
        else:
            arr = rng.uniform(-0.02, 0.02, shape)
        params[name] = arr.astype(np.float32)
    return params


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True)
    info = sub.add_parser("info", help="verify a file and print a summary")
    info.add_argument("file")
    gen = sub.add_parser("from-schema", help="random store for a schema")
    gen.add_argument("schema")
    gen.add_argument("out")
    gen.add_argument("--arch", help="architecture key=value file")
    gen.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    try:
        if args.cmd == "info":
            config_text, params, mid = read_scwt(args.file)
            total = sum(a.size for a in params.values())
            print(f"model_id={mid.hex()}")
            print(f"parameters={len(params)}")
            print(f"values={total}")
        else:
            with open(args.schema) as f:
                schema = parse_schema(f.read())
            config_text = ""
            if args.arch:
                with open(args.arch) as f:
                    config_text = f.read()
            mid = write_scwt(args.out, config_text,
                             random_params(schema, args.seed))
            print(f"model_id={mid.hex()}")
    except (OSError, ScwtError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
