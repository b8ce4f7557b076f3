from __future__ import annotations

import sys
from pathlib import Path

# allow running from a checkout without installing
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kbp_commit.cli import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
