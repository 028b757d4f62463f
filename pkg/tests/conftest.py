import os
import sys

# Tests import the package as ``src.*``, like the CLI does.
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
