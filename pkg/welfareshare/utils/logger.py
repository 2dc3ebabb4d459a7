"""Logger setup for welfareshare"""

import copy
import logging
import logging.config

from welfareshare import settings


def setup_logger(name='welfareshare', level=None, log_file=None):
    """
    Setup the project logger from settings.LOGGING.

    Args:
        name: Logger name (every module logs to 'welfareshare')
        level: Console level override, e.g. 'DEBUG'
        log_file: Optional path; adds the detailed file handler

    Returns:
        The configured logger
    """
    config = copy.deepcopy(settings.LOGGING)
    logger_config = config['loggers'].setdefault(
        name, {'handlers': ['console'], 'propagate': False}
    )

    if level:
        logger_config['level'] = level.upper()

    if log_file and 'file' not in config['handlers']:
        config['handlers']['file'] = {
            'class': 'logging.FileHandler',
            'filename': log_file,
            'formatter': 'verbose',
        }
        logger_config['handlers'].append('file')

    logging.config.dictConfig(config)
    return logging.getLogger(name)
