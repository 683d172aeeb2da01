import json
import os
import pathlib
import subprocess
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "tests" / "oracle"))


def _binary(var, default):
    path = pathlib.Path(os.environ.get(var, ROOT / "build" / default))
    if not path.exists():
        pytest.skip(f"{path} not built")
    return path


@pytest.fixture(scope="session")
def root():
    return ROOT


@pytest.fixture(scope="session")
def armtwin():
    return _binary("ARMTWIN_BIN", "armtwin")


@pytest.fixture(scope="session")
def schema():
    return json.loads((ROOT / "schema" / "twin_protocol.schema.json").read_text())


@pytest.fixture(scope="session")
def dumped_frames(tmp_path_factory):
    exe = _binary("FRAME_DUMP_BIN", "tests/frame_dump")
    out = tmp_path_factory.mktemp("frames") / "frames.json"
    subprocess.run([str(exe), str(ROOT), str(out)], check=True, timeout=60)
    return json.loads(out.read_text())
