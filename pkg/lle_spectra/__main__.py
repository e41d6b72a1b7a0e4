"""Run the command line interface with ``python -m lle_spectra``."""
import sys

from .cli import main

sys.exit(main())
