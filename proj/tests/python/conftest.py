import os
import sys

# Build-tree runs: the extension directory and the source package are passed
# via environment; installed wheels need neither.
ext_dir = os.environ.get("ANISOP_EXT_DIR")
if ext_dir:
    sys.path.insert(0, ext_dir)
src = os.environ.get("ANISOP_SRC")
if src:
    sys.path.insert(0, os.path.join(src, "python"))
