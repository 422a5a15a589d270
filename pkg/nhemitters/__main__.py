import sys

from nhemitters.cli import main

sys.exit(main())
