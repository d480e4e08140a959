import logging
import sys
from typing import List, Optional

from eigendesign.routes.commands import build_parser, dispatch

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)

    response, exit_code = dispatch(args)
    print(response.model_dump_json())
    if args.command == "pencil-suite" and response.result is not None:
        print(f"violations: {response.result.violations}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
