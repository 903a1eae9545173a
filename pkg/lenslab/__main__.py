# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import sys

from lenslab.cli import main

if __name__ == "__main__":
    sys.exit(main())
