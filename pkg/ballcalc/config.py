#!/usr/bin/env python
# -*- coding:utf-8 -*-

import os
from collections import OrderedDict

from ballcalc.errors import ConfigError
from ballcalc.lib import read_properties_file
from ballcalc.log import LOG_LEVELS, set_level, get_logger


LOGGER = get_logger(__name__)


def normalize_key(key):
    return key.strip().replace("-", "_").lower()


class Config(object):
    """Process wide settings, filled by the main command options

    The settings file holds flat `key = value` lines. A key applies to every
    subcommand accepting a parameter of that name, unless it is written
    `subcommand.key`, in which case it only applies to that subcommand.
    """
    app_name = "ballcalc"
    main_command = None

    def __init__(self):
        self.init()

    def init(self):
        self.settings = OrderedDict()
        self.settings_path = None
        self.seed = 0
        self.out = None
        self.threads = None
        self.format = "csv"
        self._log_level = None
        self.log_level = "status"

    @property
    def log_level(self):
        return self._log_level

    @log_level.setter
    def log_level(self, value):
        if value is not None:
            self._log_level = value
            set_level(LOG_LEVELS[value])

    @property
    def develop(self):
        return LOG_LEVELS[self.log_level] <= LOG_LEVELS["develop"]

    @property
    def debug(self):
        return LOG_LEVELS[self.log_level] <= LOG_LEVELS["debug"]

    def load(self, path):
        if not os.path.exists(path):
            raise ConfigError("The config file {} does not exist".format(path))
        try:
            raw = read_properties_file(path)
        except (ValueError, UnicodeDecodeError) as e:
            raise ConfigError(str(e))
        self.settings = OrderedDict((key.strip().lower(), value) for key, value in raw.items())
        self.settings_path = path
        LOGGER.debug("Loaded {} settings from {}".format(len(self.settings), path))

    def global_settings(self):
        return OrderedDict(
            (normalize_key(key), value)
            for key, value in self.settings.items()
            if "." not in key
        )

    def command_settings(self, command_name):
        res = self.global_settings()
        prefix = command_name + "."
        for key, value in self.settings.items():
            if key.startswith(prefix):
                res[normalize_key(key[len(prefix):])] = value
        return res

    def default_map(self, command_names, main_param_names):
        """Build the click default_map out of the settings"""
        default_map = OrderedDict(
            (key, value)
            for key, value in self.global_settings().items()
            if key in main_param_names
        )
        for name in command_names:
            default_map[name] = self.command_settings(name)
        return default_map

    def validate_for(self, command, main_param_names):
        """The settings scoped to the invoked command must match one of its parameters"""
        accepted = set(main_param_names) | {param.name for param in command.params}
        prefix = command.name + "."
        unknown = [
            key for key in self.settings
            if key.startswith(prefix) and normalize_key(key[len(prefix):]) not in accepted
        ]
        unknown += [
            key for key in self.settings
            if "." in key and key.split(".", 1)[0] not in self.known_commands
        ]
        if unknown:
            raise ConfigError(
                "Unknown key{} for {} in {}: {}".format(
                    "s" if len(unknown) > 1 else "",
                    command.name,
                    self.settings_path,
                    ", ".join(sorted(unknown)),
                )
            )

    known_commands = ()


config = Config()
