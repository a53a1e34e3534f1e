import sys

from pressurelab.cli import main


sys.exit(main())
