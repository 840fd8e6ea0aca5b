"""Run the ``domainholder`` command with ``python -m domainholder``."""

import sys

from .cli import main


sys.exit(main())
