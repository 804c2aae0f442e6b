import sys

from xwebbench.cli import main

sys.exit(main())
