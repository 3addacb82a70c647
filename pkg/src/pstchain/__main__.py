import sys

from pstchain.cli import main

sys.exit(main())
