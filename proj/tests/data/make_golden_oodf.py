"""Writes golden.oodf without touching the C++ code.

Run from this directory: python3 make_golden_oodf.py
"""
import hashlib
import json
import struct

penult = [[0.5, -1.25], [2.0, 0.1], [-3.0, 4.5]]
weights = [[1.0, 0.5], [-0.25, 2.0]]
bias = [0.75, -1.5]
labels = [0, 1, 1]
features = [[0.1, 0.2, 0.3], [-0.0, 1e-7, 65504.0], [-2.5, 3.25, 1e30]]


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


logits = [[f32(sum(f32(w) * f32(a) for w, a in zip(row, p)) + b) for row, b in zip(weights, bias)] for p in penult]

n, d, c, p = len(features), len(features[0]), len(weights), len(weights[0])
flags = 0b1111
header = b"OODF" + struct.pack("<HHIIIIII", 1, flags, n, d, c, p, 0, 0)


def block(rows):
    return b"".join(struct.pack("<f", v) for r in rows for v in r)


payload = block(features) + block(logits) + block(penult) + block(weights) + block([bias])
payload += b"".join(struct.pack("<I", v) for v in labels)
digest = hashlib.sha256(header + payload).hexdigest()
sidecar = json.dumps(
    {"format": "OODF", "version": 1, "hash": "sha256", "digest": digest,
     "source": "golden", "split": "test", "seed": 42},
    separators=(",", ":"),
).encode()
header = header[:24] + struct.pack("<I", len(sidecar)) + header[28:]
with open("golden.oodf", "wb") as fh:
    fh.write(header + payload + sidecar)
print(digest)
