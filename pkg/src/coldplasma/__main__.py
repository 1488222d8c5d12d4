import sys

from coldplasma.cli import main

sys.exit(main())
