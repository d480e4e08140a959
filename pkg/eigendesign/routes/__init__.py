from eigendesign.routes.commands import COMMANDS, build_parser, dispatch
