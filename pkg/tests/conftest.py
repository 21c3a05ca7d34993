import logging
import zipfile

import numpy as np
import pytest

from droidensemble import synth
from droidensemble.features import SampleMatrix


@pytest.fixture(autouse=True, scope="session")
def _quiet_androguard():
    # androguard logs every parsed chunk through loguru when it is installed
    try:
        from loguru import logger
        logger.remove()
    except ImportError:
        pass
    logging.getLogger("androguard").setLevel(logging.ERROR)


@pytest.fixture
def six_entry_apk(tmp_path):
    entries = [
        ("AndroidManifest.xml", synth.build_axml(["android.permission.SEND_SMS", "android.permission.INTERNET"])),
        ("classes.dex", synth.build_dex(["getDeviceId", "Lfoo/Bar;"])),
        ("assets/.hidden", b"\x00\x01junk chmod 755 /data/x\x00"),
        ("res/raw/a.bin", bytes(range(256))),
        ("META-INF/MANIFEST.MF", b"Manifest-Version: 1.0\r\n"),
        ("resources.arsc", b"\x02\x00\x0c\x00" + b"\x00" * 60),
    ]
    path = tmp_path / "six.apk"
    path.write_bytes(synth.build_apk(entries))
    return path, entries


def matrix(X, y, prefix="f"):
    X = np.asarray(X, dtype=np.uint8).reshape(len(y), -1)
    return SampleMatrix(synth.synthetic_catalog(X.shape[1], prefix), ["s%03d" % i for i in range(len(y))],
                        X, np.asarray(y, dtype=np.uint8))


@pytest.fixture
def make_matrix():
    return matrix



def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
