"""Entry point of `python -m elliptic_confinement`."""

import sys

from .cli import main

sys.exit(main())
