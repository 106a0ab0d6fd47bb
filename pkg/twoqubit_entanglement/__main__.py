"""Allow running as python -m twoqubit_entanglement."""

from .cli import main

if __name__ == "__main__":
    main()
