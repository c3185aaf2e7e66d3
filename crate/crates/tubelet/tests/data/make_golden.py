"""Regenerate the golden files with Python's struct module, independently of
the Rust writers. Run from this directory."""
import json
import struct

T, H, W, C = 2, 3, 4, 3
pixels = [(t * 37 + y * 11 + x * 5 + c * 3) % 256
          for t in range(T) for y in range(H) for x in range(W) for c in range(C)]
with open("golden_clip.tbc", "wb") as f:
    f.write(b"TBC1" + struct.pack("<H4I", 1, T, H, W, C) + bytes(pixels))
with open("golden_clip.json", "w") as f:
    json.dump({"shape": [T, H, W, C], "pixels": pixels}, f)
    f.write("\n")

# frames, grid, hidden, proj_hidden, embed; input = frames*grid*grid*6
dims = [1, 1, 2, 2, 2]
n_in = dims[0] * dims[1] * dims[1] * 6
shapes = [(n_in, dims[2]), (dims[2], dims[2]), (dims[2], dims[3]), (dims[3], dims[4])]
count = sum(i * o + o for i, o in shapes)
values = [(i - 16) / 8 for i in range(count)]
with open("golden_checkpoint.tbck", "wb") as f:
    f.write(b"TBCK" + struct.pack("<H5I", 1, *dims) + struct.pack("<%dd" % count, *values))
with open("golden_checkpoint.json", "w") as f:
    json.dump({"dims": dims, "values": values}, f)
    f.write("\n")

with open("golden_manifest.jsonl", "w") as f:
    for i, kind in enumerate(["uniform-noise", "static-texture"]):
        f.write(json.dumps({"id": "%05d" % i, "path": "clip-%05d.tbc" % i, "kind": kind,
                            "seed": 1000 + i, "shape": [16, 32, 32]}, separators=(",", ":")) + "\n")
