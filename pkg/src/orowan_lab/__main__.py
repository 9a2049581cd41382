#!/usr/bin/env python3
# this_file: src/orowan_lab/__main__.py

"""CLI entry point for orowan-lab."""

import fire

from .cli import OrowanLabCLI


def main():
    """Main entry point for the orowan-lab CLI."""
    fire.Fire(OrowanLabCLI)


if __name__ == "__main__":
    main()
