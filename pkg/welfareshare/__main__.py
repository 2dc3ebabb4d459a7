import sys

from welfareshare.cli import main

sys.exit(main())
