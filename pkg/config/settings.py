"""
Application Settings and Configuration
"""

import os

# Application Information
APP_NAME = "qpack"
APP_VERSION = "1.0.0"

# Enumeration and group limits
ENUMERATION_CAP = 2 ** 26          # subspaces per enumerate_subspaces call
ORDER_CAP = 2 ** 22                # elements per group closure
IMAGE_TABLE_MAX_DIM = 20           # precompute g*v for all v when n <= this (q = 2)
PACKED_KEY_BITS = 60               # t*n bound for single-word coverage keys

# Verification
PAIRWISE_THRESHOLD = 10 ** 4       # above this many blocks only coverage runs
VIOLATION_CAP = 100
CODE_DISTANCE_FULL_CHECK = 2000    # exhaustive min-distance up to this size
CODE_DISTANCE_SAMPLE = 20000       # sampled pairs above it

# Beam search defaults
BEAM_DEFAULTS = {
    'alpha': 20,
    'beta': 10,
    'seed': 0,
    'time_limit_s': 10.0,
    'max_rounds': None,
    'target_size': None,
}

# Workers
DEFAULT_THREADS = int(os.environ.get('QPACK_THREADS', min(8, os.cpu_count() or 1)))

# Fixture location (shipped with the repository)
FIXTURE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'fixtures')

# Text Encodings tried for hand-transcribed input files
TEXT_ENCODINGS = ['utf-8', 'utf-8-sig', 'latin-1', 'cp1252']

# Matrix image export
IMAGE_CELL_SIZE = 6
IMAGE_COLORS = {
    'background': (255, 255, 255),
    'one': (39, 40, 34),
    'many': (249, 38, 114),        # entries > 1 (non-admissible)
    'grid': (224, 224, 224),
}

# Exit statuses of the command line front end
EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_VERIFICATION_FAILED = 2
EXIT_RESOURCE_CAP = 3
