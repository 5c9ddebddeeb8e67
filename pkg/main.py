"""Main entry point for Guichard Lab."""
import asyncio
import logging
import sys

from dotenv import load_dotenv

from src.guichard_lab.core.config import settings
from src.guichard_lab.cli import run

# Force UTF-8 for Windows consoles
from src.guichard_lab.utils import setup_console_encoding

setup_console_encoding()

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper()),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


async def main() -> int:
    """Main entry point."""
    return await run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
