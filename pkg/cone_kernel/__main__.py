"""Allow ``python -m cone_kernel``."""

from .cli import main

main()
