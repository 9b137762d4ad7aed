import sys

from dotenv import load_dotenv

from app.main import main

# Load LCLAB_* variables from .env file if it exists
load_dotenv()

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
