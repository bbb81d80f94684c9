#!/usr/bin/env python
# -*- coding:utf-8 -*-

import os
import traceback
from datetime import datetime

import click

from ballcalc import log
from ballcalc import startup_time
from ballcalc.config import Config, config
from ballcalc.errors import ConfigError
from ballcalc.lib import get_tabulate_formats, main_default, natural_delta
from ballcalc.log import LOG_LEVELS, get_logger

LOGGER = get_logger(__name__)


main_command_parameters = set()


def main_command_option(*args, **kwargs):
    decorator = click.option(*args, **kwargs)

    def new_decorator(f):
        f = decorator(f)
        # we assume that the option is the last in the param list (click
        # implementation dependent)
        option = f.__click_params__[-1]
        main_command_parameters.add(option)
        return f
    return new_decorator


def main_command_decoration(f, cls, **kwargs):
    f = main_command_option('-L', '--log-level', default=None, type=click.Choice(list(LOG_LEVELS.keys())),
                            callback=log_level_callback, help="Log level (default to 'status')")(f)
    f = main_command_option('-q', '--quiet/--no-quiet', help="Same as --log-level critical", callback=shortcut_level_callback('critical'),
                            is_eager=True, default=None)(f)
    f = main_command_option('-d', '--debug/--no-debug', help="Same as --log-level debug", callback=shortcut_level_callback('debug'),
                            is_eager=True, default=None)(f)
    f = main_command_option('-D', '--develop/--no-develop', help="Same as --log-level develop",
                            callback=shortcut_level_callback('develop'), is_eager=True, default=None)(f)
    f = main_command_option('--exit-on-log-level', default=None, type=click.Choice(list(LOG_LEVELS.keys())),
                            callback=exit_on_log_level_callback,
                            help="Exit when one log of this level is issued."
                            " Useful to reproduce the -Werror behavior of gcc")(f)
    f = main_command_option('--config', 'config_path', metavar="FILE", callback=config_callback, is_eager=True,
                            expose_value=False,
                            help="Settings file of `key = value` lines, `command.key` for one subcommand only")(f)
    f = main_command_option('--seed', type=int, default=0, callback=seed_callback,
                            help="Seed of every random generator")(f)
    f = main_command_option('--out', metavar="DIR", type=click.Path(file_okay=False), callback=out_callback,
                            help="Write one CSV per report and a summary.csv into this directory")(f)
    f = main_command_option('--threads', type=click.IntRange(min=1), default=None, callback=threads_callback,
                            help="Cap on the worker threads (default to the CPU count)")(f)
    f = main_command_option('--format', default="csv", type=get_tabulate_formats(),
                            callback=format_callback, help="Format of the tables printed on the console")(f)
    f = click.group(cls=cls)(f)
    command = main_default(
        prog_name=cls.path,
        standalone_mode=False,
        **kwargs)(f)
    Config.main_command = command
    return command


################################
# Handling of the core options #
################################


def log_level_callback(ctx, attr, value):
    if value is not None:
        config.log_level = value
        log.use_develop_formatter(value == 'develop')
    return value


def exit_on_log_level_callback(ctx, attr, value):
    log.exit_on_log_level = value


def shortcut_level_callback(level):
    """Callback of a --flag/--no-flag standing for --log-level level

    The negative form only goes back to 'status' when this flag's level is
    the current one."""
    def callback(ctx, attr, value):
        if value:
            config.log_level = level
            log.use_develop_formatter(level == 'develop')
        elif value is not None and config.log_level == level:
            config.log_level = 'status'
            log.use_develop_formatter(False)
        return value
    return callback


def config_callback(ctx, attr, value):
    if value is None or ctx.resilient_parsing:
        return value
    config.load(value)
    command = ctx.command
    config.known_commands = tuple(command.list_commands(ctx))
    main_param_names = [param.name for param in main_command_parameters]
    unknown = [
        key for key in config.global_settings()
        if key not in main_param_names and not any(
            key in (param.name for param in command.get_command(ctx, name).params)
            for name in config.known_commands
        )
    ]
    if unknown:
        raise ConfigError("Unknown key{} in {}: {}".format(
            "s" if len(unknown) > 1 else "", value, ", ".join(sorted(unknown))))
    ctx.default_map = config.default_map(config.known_commands, main_param_names)
    return value


def seed_callback(ctx, attr, value):
    if value is not None:
        config.seed = value
    return value


def out_callback(ctx, attr, value):
    config.out = value
    return value


def threads_callback(ctx, attr, value):
    config.threads = value
    return value


def format_callback(ctx, attr, value):
    if value is not None:
        config.format = value
    return value


def log_trace():
    emit = LOGGER.error if os.environ.get('BALLCALC_LOG_TRACE') is not None else LOGGER.develop
    emit(traceback.format_exc())


def report_failure(e):
    """Log the failure and return its exit code

    0 success, 1 error or invariant violation, 2 usage or settings error"""
    log_trace()
    if isinstance(e, click.exceptions.Abort):
        LOGGER.debug("Aborted")
        return 1
    if isinstance(e, click.ClickException):
        if isinstance(e, click.UsageError) and e.ctx is not None:
            click.echo(e.ctx.get_usage(), err=True)
        LOGGER.error(e.format_message())
        return e.exit_code
    LOGGER.error(str(e))
    if not isinstance(e, EnvironmentError):
        LOGGER.error(
            "Unexpected error. Run the command again with {} --develop to see the stacktrace.".format(
                config.main_command.name
            )
        )
    return 1


def main():
    exitcode = 0
    try:
        rv = config.main_command()
        if isinstance(rv, int):
            exitcode = rv
    except (Exception, log.LogLevelExitException) as e:
        log.exit_on_log_level = None
        exitcode = report_failure(e)
    finally:
        LOGGER.debug("command run in %s" % natural_delta(datetime.now() - startup_time))
    exit(exitcode)
