import argparse
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel

Handler = Callable[[argparse.Namespace], "Outcome"]
Argument = Tuple[Tuple[str, ...], Dict[str, Any]]


@dataclass
class Outcome:
    """What a command hands back to the driver."""
    result: Any
    exit_code: int = 0
    steps: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


def arg(*flags: str, **kwargs: Any) -> Argument:
    return flags, kwargs


class Router:
    """A command group; commands register with a decorator, like API routes."""

    def __init__(self, name: str, help: str):
        self.name = name
        self.help = help
        self.commands: List[Tuple[str, str, List[Argument], Handler]] = []

    def command(self, name: str, help: str, arguments: Optional[List[Argument]] = None):
        def decorator(func: Handler) -> Handler:
            self.commands.append((name, help, arguments or [], func))
            return func

        return decorator

    def mount(self, subparsers: Any, common: argparse.ArgumentParser) -> None:
        group = subparsers.add_parser(self.name, help=self.help)
        commands = group.add_subparsers(dest="action", metavar="command")
        commands.required = True
        for name, help, arguments, func in self.commands:
            parser = commands.add_parser(name, help=help, parents=[common])
            for flags, kwargs in arguments:
                parser.add_argument(*flags, **kwargs)
            parser.set_defaults(handler=func, command=f"{self.name} {name}")


def to_jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    return value


def dumps(value: Any) -> str:
    return json.dumps(to_jsonable(value), sort_keys=True, indent=2, ensure_ascii=False)
