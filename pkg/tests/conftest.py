"""
pytest fixtures so the script-style test modules also run under pytest.
"""

import sys
from pathlib import Path

import pytest

for path in (Path(__file__).parent.parent / "src", Path(__file__).parent):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))


@pytest.fixture
def tmp_dir(tmp_path: Path) -> Path:
    return tmp_path


@pytest.fixture
def verbose() -> bool:
    return False
