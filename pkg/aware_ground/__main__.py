"""Allow running as `python -m aware_ground`."""

import sys

from aware_ground.cli import main

sys.exit(main())
