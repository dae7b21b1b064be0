import sys

from horizontal_tubes.cli import main

sys.exit(main())
