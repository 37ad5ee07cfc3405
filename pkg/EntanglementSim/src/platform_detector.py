#!/usr/bin/env python3
"""
Runtime Environment Module
Detects the host platform, numerical library versions and worker capacity
"""

import platform
import sys
from enum import Enum
from pathlib import Path

import numpy
import pandas
import scipy

try:
    import psutil
except ImportError:
    print("Warning: psutil not installed. Install with: pip install psutil", file=sys.stderr)
    psutil = None

CODE_VERSION = "1.0.0"


class OSType(Enum):
    WINDOWS = "windows"
    MACOS = "macos"
    LINUX = "linux"
    UNKNOWN = "unknown"


class PlatformDetector:
    """Detects and provides information about the current runtime"""

    def __init__(self):
        self.system = platform.system().lower()
        self.machine = platform.machine()
        self.python_version = platform.python_version()

    def get_os_type(self) -> OSType:
        """Returns the operating system type"""
        if self.system == "windows":
            return OSType.WINDOWS
        elif self.system == "darwin":
            return OSType.MACOS
        elif self.system == "linux":
            return OSType.LINUX
        else:
            return OSType.UNKNOWN

    def get_cpu_counts(self) -> dict:
        """Physical and logical core counts (None when unknown)"""
        if psutil is None:
            return {'physical': None, 'logical': None}
        return {
            'physical': psutil.cpu_count(logical=False),
            'logical': psutil.cpu_count(logical=True),
        }

    def default_worker_count(self) -> int:
        """Worker pool size used when the caller asks for 0 threads"""
        counts = self.get_cpu_counts()
        return counts['physical'] or counts['logical'] or 1

    def get_available_memory_mb(self):
        """Available memory in MB, or None without psutil"""
        if psutil is None:
            return None
        return round(psutil.virtual_memory().available / (1024**2), 1)

    def get_log_directory(self) -> str:
        """Log directory the global logger writes to"""
        from logger import default_log_directory
        return str(default_log_directory())

    def get_config_directory(self) -> str:
        """Directory holding the bundled JSON configuration"""
        return str(Path(__file__).parent.parent / 'config')

    def version_info(self) -> dict:
        """Code and library versions recorded in output metadata"""
        return {
            'code_version': CODE_VERSION,
            'numpy': numpy.__version__,
            'scipy': scipy.__version__,
            'pandas': pandas.__version__,
        }

    def get_info(self) -> dict:
        """Get comprehensive runtime information"""
        info = {
            'os_type': self.get_os_type().value,
            'system': self.system,
            'machine': self.machine,
            'python_version': self.python_version,
            'cpu_counts': self.get_cpu_counts(),
            'default_workers': self.default_worker_count(),
            'available_memory_mb': self.get_available_memory_mb(),
            'log_directory': self.get_log_directory(),
            'config_directory': self.get_config_directory(),
        }
        info.update(self.version_info())
        return info

    def __str__(self):
        return f"{self.get_os_type().value} (python {self.python_version}, numpy {numpy.__version__})"


# Global instance
platform_detector = PlatformDetector()


if __name__ == "__main__":
    import json
    print(json.dumps(platform_detector.get_info(), indent=2))
