import sys

from .evalio.cli import main

sys.exit(main())
