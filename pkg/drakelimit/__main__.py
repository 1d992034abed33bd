"""Entry point for ``python -m drakelimit``."""

from drakelimit.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
