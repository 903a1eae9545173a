# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Exact d-invariant obstructions to distance one surgeries between lens spaces."""
