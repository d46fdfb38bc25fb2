# Makes the lssreduce package and app.py importable from the repository root without installation
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
