"""Allow ``python3 -m fresco``."""

import sys

from .cli import main

sys.exit(main())
