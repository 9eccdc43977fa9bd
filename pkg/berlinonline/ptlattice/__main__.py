import sys

from berlinonline.ptlattice.cli import main

sys.exit(main())
