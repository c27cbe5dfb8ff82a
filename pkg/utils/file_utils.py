"""
File utilities for the cs3kit toolkit.
Handles JSON persistence, the versioned table cache, and circuit/relation text files.
"""

import json
import shutil
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from utils.logger import get_logger

logger = get_logger(__name__)


class FileUtils:
    """Utility class for file operations and caching"""

    def __init__(self, base_dir: Union[str, Path] = "output"):
        """
        Initialize FileUtils

        Args:
            base_dir: Base directory for output and cache files
        """
        self.base_dir = Path(base_dir)
        self.sessions_dir = self.base_dir / "sessions"
        self.cache_dir = self.base_dir / "cache"

    def create_session_dir(self, session_id: str) -> Path:
        """
        Create a directory for an acceptance-run session

        Args:
            session_id: Unique session identifier

        Returns:
            Path to the session directory
        """
        session_dir = self.sessions_dir / session_id
        session_dir.mkdir(parents=True, exist_ok=True)

        logger.info(f"Created session directory: {session_dir}")
        return session_dir

    def save_json(self, data: Any, file_path: Union[str, Path]) -> None:
        """
        Save data as a JSON file.

        Output is deterministic (sorted keys, fixed indentation, trailing
        newline) so that rebuilding a table produces a byte-identical file.

        Args:
            data: Data to save
            file_path: Path to save the file
        """
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)

        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False, default=str)
            f.write("\n")

        logger.debug(f"Saved JSON to: {file_path}")

    def load_json(self, file_path: Union[str, Path]) -> Optional[Any]:
        """
        Load data from a JSON file

        Args:
            file_path: Path to the JSON file

        Returns:
            Loaded data or None if the file doesn't exist or is malformed
        """
        file_path = Path(file_path)

        if not file_path.exists():
            logger.warning(f"JSON file not found: {file_path}")
            return None

        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                data = json.load(f)

            logger.debug(f"Loaded JSON from: {file_path}")
            return data

        except json.JSONDecodeError as e:
            logger.error(f"Error loading JSON from {file_path}: {e}")
            return None

    def get_cache_path(self, cache_key: str, extension: str = ".json") -> Path:
        """Get path for a cached file"""
        return self.cache_dir / f"{cache_key}{extension}"

    def is_cached(self, cache_key: str, extension: str = ".json") -> bool:
        """Check if data is cached"""
        return self.get_cache_path(cache_key, extension).exists()

    def save_to_cache(self, data: Any, cache_key: str,
                      format_name: str, version: int) -> Path:
        """
        Save data to the cache under a format/version header

        Args:
            data: JSON-serializable payload
            cache_key: Unique cache key
            format_name: Identifier of the payload format
            version: Format version; readers reject other versions

        Returns:
            Path of the written cache file
        """
        cache_path = self.get_cache_path(cache_key)
        self.save_json({"format": format_name, "version": version, "payload": data}, cache_path)
        return cache_path

    def load_from_cache(self, cache_key: str, format_name: str, version: int) -> Optional[Any]:
        """
        Load a payload from the cache

        Returns:
            The payload, or None if the file is missing, malformed, or carries
            a different format/version header
        """
        cache_path = self.get_cache_path(cache_key)
        if not cache_path.exists():
            return None

        data = self.load_json(cache_path)
        if not isinstance(data, dict):
            return None
        if data.get("format") != format_name or data.get("version") != version:
            logger.warning(
                f"Cache version mismatch for {cache_path}: "
                f"found {data.get('format')}/{data.get('version')}, expected {format_name}/{version}"
            )
            return None
        return data.get("payload")

    def clear_cache(self, cache_key: str = None) -> None:
        """
        Clear cache files

        Args:
            cache_key: Specific cache key to clear, or None to clear all
        """
        if cache_key:
            cache_path = self.get_cache_path(cache_key)
            if cache_path.exists():
                cache_path.unlink()
                logger.info(f"Cleared cache: {cache_path}")
        elif self.cache_dir.exists():
            shutil.rmtree(self.cache_dir)
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            logger.info("Cleared entire cache directory")

    def read_text_lines(self, file_path: Union[str, Path]) -> List[str]:
        """
        Read a line-oriented text file, dropping '#' comments and blank lines

        Args:
            file_path: Path to the text file

        Returns:
            Stripped content lines
        """
        file_path = Path(file_path)

        if not file_path.exists():
            raise FileNotFoundError(f"File not found: {file_path}")

        lines = []
        with open(file_path, 'r', encoding='utf-8') as f:
            for raw in f:
                line = raw.split('#', 1)[0].strip()
                if line:
                    lines.append(line)
        return lines


_file_utils = None


def get_file_utils(base_dir: Union[str, Path, None] = None) -> FileUtils:
    """
    Get the global FileUtils instance

    Args:
        base_dir: Base directory for output files; rebinding the global
            instance when it differs from the current one

    Returns:
        FileUtils instance
    """
    global _file_utils

    if _file_utils is None:
        _file_utils = FileUtils(base_dir or "output")
    elif base_dir is not None and Path(base_dir) != _file_utils.base_dir:
        _file_utils = FileUtils(base_dir)

    return _file_utils


def save_json(data: Any, file_path: Union[str, Path]) -> None:
    """Save data as JSON file"""
    get_file_utils().save_json(data, file_path)


def load_json(file_path: Union[str, Path]) -> Optional[Dict[str, Any]]:
    """Load data from JSON file"""
    return get_file_utils().load_json(file_path)
