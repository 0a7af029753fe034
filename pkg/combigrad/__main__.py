import sys

from combigrad.cli import main

sys.exit(main())
