import gzip

import numpy as np
import pytest
import requests

from data import idx
from data.fetch import MnistFetcher
from utils.exceptions import DownloadError


class FakeResponse:

    def __init__(self, payload: bytes, status: int = 200):
        self.payload = payload
        self.status = status
        self.headers = {"content-length": str(len(payload))}

    def raise_for_status(self):
        if self.status >= 400:
            raise requests.HTTPError(f"{self.status} error")

    def iter_content(self, chunk_size):
        for start in range(0, len(self.payload), chunk_size):
            yield self.payload[start:start + chunk_size]


class FakeSession:

    def __init__(self, files, status: int = 200):
        self.files = files
        self.status = status
        self.requested = []

    def get(self, url, stream=False, timeout=None):
        self.requested.append(url)
        return FakeResponse(self.files.get(url.rsplit("/", 1)[-1], b""), self.status)


@pytest.fixture
def archives(tmp_path):
    """Gzipped IDX files for a two-image MNIST"""
    source = tmp_path / "source"
    source.mkdir()
    files = {}
    for kind in ("train", "test"):
        image_name, label_name = idx.MNIST_FILES[kind]
        for name, array in ((image_name, np.full((2, 28, 28), 255, dtype=np.uint8)),
                            (label_name, np.array([3, 7], dtype=np.uint8))):
            files[name + ".gz"] = gzip.compress(idx.write_idx(source / name, array).read_bytes())
    return files


class TestFetch:

    def test_unpacks_every_file(self, tmp_path, archives):
        dest = tmp_path / "mnist"
        session = FakeSession(archives)
        paths = MnistFetcher.fetch(dest, mirror="http://mirror/", session=session)
        assert len(paths) == 4 and len(session.requested) == 4
        assert idx.mnist_available(dest)
        images, labels = idx.load_mnist("test", dest)
        assert images.shape == (784, 2)
        np.testing.assert_array_equal(labels, [4, 8])
        assert not list(dest.glob("*.part"))

    def test_skips_present_files(self, tmp_path, archives):
        dest = tmp_path / "mnist"
        MnistFetcher.fetch(dest, mirror="http://mirror/", session=FakeSession(archives))
        session = FakeSession(archives)
        MnistFetcher.fetch(dest, mirror="http://mirror/", session=session)
        assert session.requested == []

    def test_http_error(self, tmp_path, archives):
        dest = tmp_path / "mnist"
        with pytest.raises(DownloadError):
            MnistFetcher.fetch(dest, mirror="http://mirror/", session=FakeSession(archives, status=404))
        assert not any(dest.iterdir())

    def test_corrupted_archive(self, tmp_path):
        dest = tmp_path / "mnist"
        files = {name + ".gz": b"not gzip" for names in idx.MNIST_FILES.values() for name in names}
        with pytest.raises(DownloadError):
            MnistFetcher.fetch(dest, mirror="http://mirror/", session=FakeSession(files))
        assert not any(dest.iterdir())
