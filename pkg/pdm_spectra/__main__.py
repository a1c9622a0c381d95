"""Allow running the package with python -m pdm_spectra."""
from .cli import main

raise SystemExit(main())
