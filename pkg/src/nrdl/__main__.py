import sys

from nrdl.cli import main

sys.exit(main())
