#!/usr/bin/env python
# -*- coding:utf-8 -*-

import importlib
import pkgutil

import click
import click_didyoumean
from click.utils import make_default_short_help

from ballcalc.config import config
from ballcalc.log import get_logger

LOGGER = get_logger(__name__)


class CommandNotFound(Exception):
    pass


class CoreCommandResolver(object):
    """Find the subcommands as the modules of the commands package

    The module `validate_basis` provides the command `validate-basis`, found
    in the module attribute of the same name.
    """
    name = "core command"
    commands_package = "ballcalc.commands"

    def _list_command_paths(self):
        cmddir = list(importlib.import_module(self.commands_package).__path__)[0]
        return sorted(m.replace('_', '-').strip('-') for _, m, _ in pkgutil.iter_modules([cmddir]))

    def _get_command(self, path):
        attrname = path.replace('-', '_')
        if path not in self._list_command_paths():
            raise CommandNotFound(path)
        mod = importlib.import_module("{}.{}".format(self.commands_package, attrname))
        return getattr(mod, attrname)


class HelpMixin(object):
    def __init__(self, *args, **kwargs):
        super(HelpMixin, self).__init__(*args, **kwargs)
        if self.help and 'short_help' not in kwargs.keys():
            # just keep the first line of the help in the short help
            self.short_help = make_default_short_help(self.help.splitlines()[0], max_length=90)


class Command(HelpMixin, click.Command):
    def __init__(self, *args, **kwargs):
        super(Command, self).__init__(*args, **kwargs)
        self.path = self.name

    def parse_args(self, ctx, args):
        LOGGER.develop("In the {} '{}', parsing the args {}".format(
            self.__class__.__name__,
            ctx.command.name,
            args,
        ))
        return click.Command.parse_args(self, ctx, args)


class MainCommand(click_didyoumean.DYMMixin, HelpMixin, click.MultiCommand):
    auto_envvar_prefix = "BALLCALC"
    path = "ballcalc"
    commandresolvers = [CoreCommandResolver()]

    def __init__(self, *args, **kwargs):
        context_settings = kwargs.get('context_settings', {})
        context_settings.setdefault('max_content_width', 120)
        kwargs['context_settings'] = context_settings
        super(MainCommand, self).__init__(*args, **kwargs)
        self.commands_cache = {}

    def parse_args(self, ctx, args):
        ctx.auto_envvar_prefix = self.auto_envvar_prefix
        if not args and not ctx.resilient_parsing:
            click.echo(ctx.get_help(), color=ctx.color)
            ctx.exit(2)
        config.init()
        res = click.MultiCommand.parse_args(self, ctx, args)
        LOGGER.develop("In the {} '{}', parsing args {}".format(self.__class__.__name__, self.path, args))
        return res

    def list_commands(self, ctx):
        return sorted(set(
            c
            for resolver in self.commandresolvers
            for c in resolver._list_command_paths()
        ))

    def get_command(self, ctx, name):
        if name in self.commands_cache:
            return self.commands_cache[name]
        for resolver in self.commandresolvers:
            try:
                cmd = resolver._get_command(name)
            except CommandNotFound:
                continue
            self.commands_cache[name] = cmd
            return cmd
        return None

    def resolve_command(self, ctx, args):
        cmd_name, cmd, args = super(MainCommand, self).resolve_command(ctx, args)
        if cmd is not None and config.settings:
            config.validate_for(cmd, [param.name for param in self.params])
        return cmd_name, cmd, args


class Option(click.Option):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault('show_default', True)
        super(Option, self).__init__(*args, **kwargs)


class Argument(click.Argument):
    def __init__(self, *args, **kwargs):
        self.help = kwargs.pop('help', '')
        super(Argument, self).__init__(*args, **kwargs)


def command(*args, **attrs):
    """Create a new Command"""
    context_settings = attrs.get('context_settings', {})
    context_settings.setdefault('max_content_width', 120)
    attrs['context_settings'] = context_settings
    attrs.setdefault('cls', Command)

    def decorator(f):
        attrs.setdefault('name', f.__name__.replace('_', '-').strip('-'))
        return click.command(*args, **attrs)(f)
    return decorator


def option(*args, **kwargs):
    """An option showing its default in the help"""
    kwargs.setdefault('cls', Option)
    return click.option(*args, **kwargs)


def flag(*args, **kwargs):
    """@option(is_flag=True)"""
    kwargs.setdefault('is_flag', True)
    return option(*args, **kwargs)


def argument(*args, **kwargs):
    """An argument accepting a help text"""
    kwargs.setdefault('cls', Argument)
    return click.argument(*args, **kwargs)


def entry_point(cls=None, **kwargs):
    def decorator(f):
        if cls is None:
            path = f.__name__
            _cls = type(
                "{}Main".format(path),
                (MainCommand,),
                {
                    "path": path,
                    "auto_envvar_prefix": path.upper(),
                }
            )
        else:
            _cls = cls
        from ballcalc.core import main_command_decoration
        return main_command_decoration(f, _cls, **kwargs)
    return decorator
