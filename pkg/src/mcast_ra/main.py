import sys

from mcast_ra.interface.cli import main


def run() -> None:
    """
    mcast-ra 命令入口
    """
    sys.exit(main())


if __name__ == "__main__":
    run()
