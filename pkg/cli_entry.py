"""PyInstaller entry point for concordance-bounds.

This launcher runs the real CLI as a package (concordance.src.main) so that
relative imports inside main.py work when frozen. Do not run directly
in development; use `python -m concordance.src.main`.
"""

from concordance.src.main import main

if __name__ == "__main__":
    main()
