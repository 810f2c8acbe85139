import os
import sys

# Services import each other from the repository root
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
