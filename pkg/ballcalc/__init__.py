#!/usr/bin/env python
# -*- coding:utf-8 -*-

# keep it at the begin in order to get an accurate startup time
from datetime import datetime
startup_time = datetime.now()

from ballcalc import log  # NOQA: E402

LOGGER = log.get_logger(__name__)
log.basic_config(LOGGER)
log.set_level(log.LOG_LEVELS["status"])
LOGGERS = {LOGGER}
