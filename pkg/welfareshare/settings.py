"""
Settings for welfareshare.

Every tunable is read from the environment (optionally through a .env file),
so enumeration bounds can be raised or lowered without touching code.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

# Enumeration bounds (number of agents)
ENUMERATION_BOUND = int(os.getenv('WELFARESHARE_ENUMERATION_BOUND', 14))
RP_EXACT_BOUND = int(os.getenv('WELFARESHARE_RP_EXACT_BOUND', 10))
SHAPLEY_PERMUTATION_BOUND = int(os.getenv('WELFARESHARE_SHAPLEY_PERMUTATION_BOUND', 8))
DECOMPOSE_EXACT_BOUND = int(os.getenv('WELFARESHARE_DECOMPOSE_EXACT_BOUND', 8))
GENERAL_COMPONENT_BOUND = int(os.getenv('WELFARESHARE_GENERAL_COMPONENT_BOUND', 6))

# Largest number of alternatives we materialise for a matching instance
ALTERNATIVE_ENUMERATION_BOUND = int(os.getenv('WELFARESHARE_ALTERNATIVE_ENUMERATION_BOUND', 40320))

# Monte-Carlo Random Priority
MC_SAMPLES = int(os.getenv('WELFARESHARE_MC_SAMPLES', 100000))
MC_SEED = int(os.getenv('WELFARESHARE_MC_SEED', 0))
MC_BLOCK_SIZE = int(os.getenv('WELFARESHARE_MC_BLOCK_SIZE', 4096))

# Floating-point min-square diagnostic
MIN_SQUARE_TOL = float(os.getenv('WELFARESHARE_MIN_SQUARE_TOL', 1e-7))
MIN_SQUARE_MAX_ITER = int(os.getenv('WELFARESHARE_MIN_SQUARE_MAX_ITER', 500))

# Scale of the slow randomised property suites
PROPERTY_BS_INSTANCES = int(os.getenv('WELFARESHARE_PROPERTY_BS_INSTANCES', 1000))
PROPERTY_LEXMAX_INSTANCES = int(os.getenv('WELFARESHARE_PROPERTY_LEXMAX_INSTANCES', 500))
PROPERTY_LORENZ_SAMPLES = int(os.getenv('WELFARESHARE_PROPERTY_LORENZ_SAMPLES', 20))
PROPERTY_BLOCK_INSTANCES = int(os.getenv('WELFARESHARE_PROPERTY_BLOCK_INSTANCES', 100))
PROPERTY_LIPSCHITZ_INSTANCES = int(os.getenv('WELFARESHARE_PROPERTY_LIPSCHITZ_INSTANCES', 200))
PROPERTY_MC_INSTANCES = int(os.getenv('WELFARESHARE_PROPERTY_MC_INSTANCES', 50))
PROPERTY_MC_SAMPLES = int(os.getenv('WELFARESHARE_PROPERTY_MC_SAMPLES', 100000))

# Table rendering
DECIMAL_DIGITS = int(os.getenv('WELFARESHARE_DECIMAL_DIGITS', 6))

# Logging
LOG_LEVEL = os.getenv('WELFARESHARE_LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('WELFARESHARE_LOG_FILE', '')

# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} - {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
            'stream': 'ext://sys.stderr',
        },
    },
    'loggers': {
        'welfareshare': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

if LOG_FILE:
    LOGGING['handlers']['file'] = {
        'class': 'logging.FileHandler',
        'filename': LOG_FILE,
        'formatter': 'verbose',
    }
    LOGGING['loggers']['welfareshare']['handlers'].append('file')
