import os
from pathlib import Path


def mkdir(path):
    if not os.path.exists(path):
        os.makedirs(path)


def get_abs_src_dir(lvl=2):
    path = Path(os.path.abspath(__file__))
    for _ in range(lvl):
        path = path.parent
    return str(path)


resources_dir = os.path.join(get_abs_src_dir(), "resources")

default_pronouns_file = os.path.join(resources_dir, "pronouns_tr.txt")
