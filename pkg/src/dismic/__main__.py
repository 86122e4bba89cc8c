"""``python -m dismic`` entry point."""
from .report_cli import main

if __name__ == "__main__":
    raise SystemExit(main())
