#!/usr/bin/env python3
"""Convert images you already have (TIFF, PNG, PPM, ...) into 8-bit PGM
luma files that `blockiq sweep` accepts, and keep a SHA-256 manifest.

    scripts/import_images.py convert images/*.tiff -o corpus/
    scripts/import_images.py verify corpus/SHA256SUMS

`convert` crops each image to whole 8x8 blocks, converts colour with
BT.601 weights (rounded half up, as the CLI does for PPM input), writes
`<stem>.pgm` and appends source and output hashes to `SHA256SUMS`. Run it
once on your copies, commit the manifest, and `verify` later to check that
nobody's inputs drifted.

Optional `--url-list FILE` downloads `<url> <sha256>` lines first and
refuses any file whose hash differs. No URLs or hashes ship with the
repository; supply the ones you trust.
"""

import argparse
import hashlib
import sys
import urllib.request
from pathlib import Path

from PIL import Image

BLOCK = 8


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def to_luma(img: Image.Image) -> Image.Image:
    if img.mode in ("L", "I;16", "I", "F"):
        return img.convert("L")
    rgb = img.convert("RGB")
    w, h = rgb.size
    src = rgb.tobytes()
    out = bytearray(w * h)
    for i in range(w * h):
        r, g, b = src[3 * i], src[3 * i + 1], src[3 * i + 2]
        out[i] = (299 * r + 587 * g + 114 * b + 500) // 1000
    return Image.frombytes("L", (w, h), bytes(out))


def pgm_bytes(img: Image.Image) -> bytes:
    w, h = img.size
    return f"P5\n{w} {h}\n255\n".encode() + img.tobytes()


def fetch(url_list: Path, dest: Path) -> list[Path]:
    dest.mkdir(parents=True, exist_ok=True)
    fetched = []
    for line in url_list.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        url, expected = line.split()
        data = urllib.request.urlopen(url).read()
        actual = sha256(data)
        if actual != expected.lower():
            sys.exit(f"checksum mismatch for {url}: {actual}")
        path = dest / Path(url).name
        path.write_bytes(data)
        fetched.append(path)
    return fetched


def convert(args: argparse.Namespace) -> None:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    sources = [Path(p) for p in args.images]
    if args.url_list:
        sources += fetch(Path(args.url_list), out / "downloads")
    manifest = []
    for src in sources:
        raw = src.read_bytes()
        img = to_luma(Image.open(src))
        w, h = img.size
        img = img.crop((0, 0, w - w % BLOCK, h - h % BLOCK))
        data = pgm_bytes(img)
        dst = out / f"{src.stem}.pgm"
        dst.write_bytes(data)
        manifest.append(f"{sha256(data)}  {dst.name}  # from {src.name} sha256:{sha256(raw)}")
        print(f"{src} -> {dst} ({img.size[0]}x{img.size[1]})")
    (out / "SHA256SUMS").write_text("\n".join(manifest) + "\n")


def verify(args: argparse.Namespace) -> None:
    manifest = Path(args.manifest)
    bad = 0
    for line in manifest.read_text().splitlines():
        if not line.strip():
            continue
        digest, name = line.split()[:2]
        path = manifest.parent / name
        ok = path.exists() and sha256(path.read_bytes()) == digest
        print(f"{'OK  ' if ok else 'FAIL'} {name}")
        bad += not ok
    sys.exit(1 if bad else 0)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    c = sub.add_parser("convert", help="convert images to PGM luma and write SHA256SUMS")
    c.add_argument("images", nargs="*")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--url-list", help="file of '<url> <sha256>' lines to download first")
    c.set_defaults(func=convert)
    v = sub.add_parser("verify", help="check files against a SHA256SUMS manifest")
    v.add_argument("manifest")
    v.set_defaults(func=verify)
    args = parser.parse_args()
    args.func(args)


if __name__ == "__main__":
    main()
