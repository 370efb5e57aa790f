import sys
from utils.logger import Logger
from cli.commands import EXIT_ERROR, run

def main():
    try:
        sys.exit(run(sys.argv[1:]))
    except Exception as e:
        Logger.get_instance().critical(f"Fatal error: {str(e)}", exc_info=True)
        sys.exit(EXIT_ERROR)

if __name__ == "__main__":
    main()
