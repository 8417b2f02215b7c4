import sys

from dotenv import load_dotenv

load_dotenv()

from orlicz_kit.main import run_command  # noqa: E402

if __name__ == "__main__":
    sys.exit(run_command(sys.argv[1:]))
