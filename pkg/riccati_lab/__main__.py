import sys

from riccati_lab.main import main

sys.exit(main())
