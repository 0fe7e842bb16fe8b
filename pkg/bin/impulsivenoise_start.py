import os
import sys

IMPULSIVENOISE_HOME = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.append(IMPULSIVENOISE_HOME)  # we assume we're in subdir "bin/"

from impulsivenoise.cli import main

# python bin/impulsivenoise_start.py simulate --out-dir output
# python bin/impulsivenoise_start.py fit --trace output/trace.csv
sys.exit(main(sys.argv[1:]))
