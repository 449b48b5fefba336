import os
import logging
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Logging configuration
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('LOG_FILE', 'derived_limits.log')

# Ground field (only p = 2 has a Steenrod implementation)
PRIME = int(os.getenv('PRIME', 2))

# Default degree window for constructed objects
WINDOW_LO = int(os.getenv('WINDOW_LO', -12))
WINDOW_HI = int(os.getenv('WINDOW_HI', 12))

# Horizons: N for families, K for towers, J_max for ideal towers
FAMILY_HORIZON = int(os.getenv('FAMILY_HORIZON', 6))
TOWER_HORIZON = int(os.getenv('TOWER_HORIZON', 8))
IDEAL_HORIZON = int(os.getenv('IDEAL_HORIZON', 12))

# Consecutive isomorphic transitions required before a tower counts as stable
STABILIZATION_RUN = int(os.getenv('STABILIZATION_RUN', 3))

# Largest n accepted by the A(n) constructors
MAX_STEENROD_N = int(os.getenv('MAX_STEENROD_N', 2))

# Row reduction switches to the sparse path below this density
SPARSE_DENSITY_THRESHOLD = float(os.getenv('SPARSE_DENSITY_THRESHOLD', 0.05))
SPARSE_MIN_ENTRIES = int(os.getenv('SPARSE_MIN_ENTRIES', 4096))

# Output and execution
OUTPUT_FORMAT = os.getenv('OUTPUT_FORMAT', 'text')
THREADS = int(os.getenv('THREADS', 1))

# Application configuration
DEBUG = os.getenv('DEBUG', 'False').lower() in ('true', '1', 't')

# Output formats understood by the reporting layer
OUTPUT_FORMATS = ["json", "tsv", "text"]

# Canned configurations run by the example command
CANNED_EXAMPLES = [
    "kx-product",
    "xi-product",
    "a1-annihilator",
    "a1-cyclic",
    "margolis-a1",
]

# Alternative names accepted by the example command
EXAMPLE_ALIASES = {
    "ex1": "kx-product",
    "ex2": "xi-product",
    "a1-remark": "a1-annihilator",
    "a1-section3": "a1-cyclic",
}

# Stored expected outcomes for the canned configurations
EXPECTED_OUTCOMES_FILE = os.getenv(
    'EXPECTED_OUTCOMES_FILE',
    os.path.join(os.path.dirname(os.path.abspath(__file__)), 'app', 'data', 'expected_outcomes.json')
)

if DEBUG:
    logging.getLogger(__name__).debug("Debug mode enabled")
