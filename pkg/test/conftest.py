import os.path as p
import sys

# Run the suite against the working tree without installing it.
sys.path.insert(0, p.dirname(p.dirname(p.abspath(__file__))))
