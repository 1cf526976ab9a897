import sys

from semnav.cli import main

sys.exit(main())
