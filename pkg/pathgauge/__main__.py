import sys

from pathgauge.cli import main

sys.exit(main())
