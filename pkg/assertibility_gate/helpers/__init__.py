from .canonical import canonical_bytes, canonical_dumps, canonical_hash, sha256_hex, without_key
from .logger import configure_package_loggers, setup_logger
from .utilities import (
    format_rational,
    format_timestamp,
    loads_exact,
    parse_rational,
    parse_timestamp,
    read_json,
    read_jsonl,
    write_text,
)

__all__ = [
    "configure_package_loggers",
    "setup_logger",
    "canonical_bytes",
    "canonical_dumps",
    "canonical_hash",
    "sha256_hex",
    "without_key",
    "format_rational",
    "format_timestamp",
    "loads_exact",
    "parse_rational",
    "parse_timestamp",
    "read_json",
    "read_jsonl",
    "write_text",
]
