#!/usr/bin/env python3
"""Fetch the Chars74K handwritten English characters and lay out digits 1-9.

Writes data/chars74k/<digit>/*.pgm (55 images per digit) and
data/chars74k/manifest.txt for `cobind evaluate`. Requires Pillow.
"""

import argparse
import io
import tarfile
import urllib.request
from pathlib import Path

from PIL import Image

URL = "http://www.ee.surrey.ac.uk/CVSSP/demos/chars74k/EnglishHnd.tgz"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("data/chars74k"))
    parser.add_argument("--archive", type=Path, help="use a local copy of EnglishHnd.tgz")
    args = parser.parse_args()

    if args.archive:
        blob = args.archive.read_bytes()
    else:
        with urllib.request.urlopen(URL) as resp:
            blob = resp.read()

    # Sample002..Sample010 hold the digits 1..9
    wanted = {f"Sample{d + 1:03d}": str(d) for d in range(1, 10)}
    args.out.mkdir(parents=True, exist_ok=True)
    counts = {}
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as tar:
        for member in sorted(tar.getmembers(), key=lambda m: m.name):
            parts = Path(member.name).parts
            if not member.isfile() or not member.name.endswith(".png"):
                continue
            sample = next((p for p in parts if p in wanted), None)
            if sample is None:
                continue
            digit = wanted[sample]
            image = Image.open(tar.extractfile(member)).convert("L")
            target = args.out / digit / (Path(member.name).stem + ".pgm")
            target.parent.mkdir(exist_ok=True)
            image.save(target, format="PPM")
            counts[digit] = counts.get(digit, 0) + 1

    lines = ["grid = 32x32", "cutoff = 128", "scale = off"]
    lines += [f"class {d}: {d}/*.pgm" for d in sorted(counts)]
    (args.out / "manifest.txt").write_text("\n".join(lines) + "\n")
    for digit in sorted(counts):
        print(f"{digit}: {counts[digit]} images")


if __name__ == "__main__":
    main()
