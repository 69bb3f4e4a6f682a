"""Allow `python -m ckframe`."""

import sys

from .cli import main

sys.exit(main())
