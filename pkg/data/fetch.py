import gzip
import os
import shutil
import time
from pathlib import Path
from typing import List, Optional, Union

import requests

from utils.exceptions import DownloadError
from utils.logger import Logger
from utils.utils import format_size
from .idx import MNIST_FILES, data_dir

logger = Logger.get_logger(__name__)

MNIST_MIRROR = "https://ossci-datasets.s3.amazonaws.com/mnist/"


class MnistFetcher:
    CHUNK_SIZE = 8192  # 8KB chunks
    TIMEOUT = 60

    @staticmethod
    def fetch(dest_folder: Union[str, Path, None] = None, mirror: str = MNIST_MIRROR,
              session: Optional[requests.Session] = None) -> List[Path]:
        """Download and unpack the four MNIST IDX files, skipping any already present"""
        dest_folder = Path(dest_folder) if dest_folder is not None else data_dir()
        os.makedirs(dest_folder, exist_ok=True)
        session = session or requests.Session()
        paths = []
        for names in MNIST_FILES.values():
            for name in names:
                target = dest_folder / name
                if target.exists():
                    logger.info(f"{target} already present, skipping")
                else:
                    MnistFetcher._fetch_one(session, mirror + name + ".gz", target)
                paths.append(target)
        return paths

    @staticmethod
    def _fetch_one(session: requests.Session, url: str, target: Path):
        archive = target.parent / (target.name + ".gz.part")
        try:
            logger.info(f"Starting download from {url}")
            response = session.get(url, stream=True, timeout=MnistFetcher.TIMEOUT)
            response.raise_for_status()
            total_size = int(response.headers.get('content-length', 0))

            downloaded = 0
            reported = -1
            start_time = time.time()
            with open(archive, 'wb') as f:
                for chunk in response.iter_content(chunk_size=MnistFetcher.CHUNK_SIZE):
                    if not chunk:
                        continue
                    f.write(chunk)
                    downloaded += len(chunk)
                    if total_size > 0:
                        progress = int(100 * downloaded / total_size)
                        # Only log every 25% to reduce spam
                        if progress // 25 > reported:
                            reported = progress // 25
                            elapsed = time.time() - start_time
                            speed = downloaded / elapsed if elapsed > 0 else 0
                            logger.debug(f"Download progress: {progress}% "
                                         f"({format_size(downloaded)}/{format_size(total_size)}) "
                                         f"@ {format_size(speed)}/s")

            with gzip.open(archive, 'rb') as src, open(target, 'wb') as dest:
                shutil.copyfileobj(src, dest)
            logger.info(f"Unpacked {target.name} ({format_size(target.stat().st_size)})")

        except (requests.RequestException, OSError, EOFError) as e:
            logger.error(f"Download failed: {str(e)}", exc_info=True)
            if target.exists():
                target.unlink()
            raise DownloadError(f"Could not fetch {url}: {str(e)}")
        finally:
            if archive.exists():
                archive.unlink()


def fetch_mnist(dest: Union[str, Path, None] = None) -> List[Path]:
    return MnistFetcher.fetch(dest)
