"""fishersep: effective dimension of point clouds from Fisher separability."""

import sys

from fishersep.cli import main

if __name__ == "__main__":
    sys.exit(main())
