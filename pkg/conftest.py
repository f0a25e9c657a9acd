import os
import sys
import tempfile

# Settings() is built at import time; keep test runs quiet and keep their log
# files out of the working tree.
os.environ.setdefault("LOG_LEVEL", "WARNING")
os.environ.setdefault("LOG_DIR", os.path.join(tempfile.gettempdir(), "netcentric-test-logs"))

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
