import pathlib
import sys

sys.path.insert(0, pathlib.Path(__file__).parent.resolve().as_posix())
