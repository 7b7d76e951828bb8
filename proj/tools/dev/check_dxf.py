"""Audits every DXF under a dataset directory with ezdxf (dev dependency)."""

import pathlib
import sys

import ezdxf
from ezdxf import recover


def main(root: str) -> int:
    files = sorted(pathlib.Path(root).rglob("*.dxf"))
    bad = 0
    for path in files:
        doc, auditor = recover.readfile(path)
        if auditor.has_errors or auditor.has_fixes:
            bad += 1
            print(f"{path}: {len(auditor.errors)} errors, {len(auditor.fixes)} fixes")
        elif len(doc.modelspace()) == 0:
            bad += 1
            print(f"{path}: empty modelspace")
    print(f"{len(files)} DXF files, {bad} with findings (ezdxf {ezdxf.__version__})")
    return 1 if bad or not files else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1] if len(sys.argv) > 1 else "out"))
