import sys

from isoreduce.cli import main

sys.exit(main())
