#!/usr/bin/env python3
"""
Installation Setup - Package Distribution 📦

Compatibility shim for older pip versions; all configuration lives in
pyproject.toml.
"""

from setuptools import setup

if __name__ == "__main__":
    setup()
