"""``python -m pdmesh``."""

import sys

from pdmesh.scripts.cli import main

raise SystemExit(main(sys.argv[1:]))
