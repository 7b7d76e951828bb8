"""Loads every STEP file under a dataset directory with OpenCASCADE (dev dependency)."""

import pathlib
import sys

from OCP.BRepCheck import BRepCheck_Analyzer
from OCP.IFSelect import IFSelect_RetDone
from OCP.STEPControl import STEPControl_Reader
from OCP.TopAbs import TopAbs_SOLID
from OCP.TopExp import TopExp_Explorer


def solids(shape) -> int:
    n = 0
    it = TopExp_Explorer(shape, TopAbs_SOLID)
    while it.More():
        n += 1
        it.Next()
    return n


def main(root: str) -> int:
    files = sorted(pathlib.Path(root).rglob("*.step"))
    bad = 0
    for path in files:
        reader = STEPControl_Reader()
        if reader.ReadFile(str(path)) != IFSelect_RetDone:
            bad += 1
            print(f"{path}: unreadable")
            continue
        reader.TransferRoots()
        shape = reader.OneShape()
        if not BRepCheck_Analyzer(shape).IsValid() or solids(shape) == 0:
            bad += 1
            print(f"{path}: invalid shape")
    print(f"{len(files)} STEP files, {bad} failing")
    return 1 if bad or not files else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1] if len(sys.argv) > 1 else "out"))
