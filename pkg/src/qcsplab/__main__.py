import sys

from qcsplab.cli import main

sys.exit(main())
