import sys

from slfe.cli import main

sys.exit(main())
