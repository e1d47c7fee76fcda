import sys

from groupmix.cli import main

sys.exit(main())
