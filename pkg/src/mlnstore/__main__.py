import sys

from mlnstore.cli import main

sys.exit(main())
