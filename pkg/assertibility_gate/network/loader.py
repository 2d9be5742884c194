from pathlib import Path
from typing import IO, Union

from ..helpers.canonical import canonical_dumps
from ..helpers.errors import HashMismatch, ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import loads_exact
from .models import Layer, NetworkModel

logger = setup_logger(name=__name__)

Source = Union[bytes, str, Path, IO]


def _read_source(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, Path):
        return source.read_bytes()
    if isinstance(source, str):
        return source.encode("utf-8")
    data = source.read()
    return data.encode("utf-8") if isinstance(data, str) else data


def load_network(source: Source) -> NetworkModel:
    """
    Parse and validate a network file.

    :param source: (bytes, str, Path or file object) JSON text, a path, or an open stream
    :return: (NetworkModel) with a recomputed model_hash
    """
    document = loads_exact(_read_source(source))
    if not isinstance(document, dict):
        raise ParseError("Network file must hold a JSON object")
    for key in ("name", "input_arity", "layers"):
        if key not in document:
            raise ParseError(f"Network file is missing {key!r}")
    if not isinstance(document["layers"], list):
        raise ParseError("Network 'layers' must be a list")

    network = NetworkModel.build(
        name=document["name"],
        input_arity=document["input_arity"],
        layers=[Layer.from_dict(entry) for entry in document["layers"]],
    )

    embedded = document.get("model_hash")
    if "model_hash" in document and embedded != network.model_hash:
        logger.error(f"Network {network.name} embeds hash {embedded}, content hashes to {network.model_hash}")
        raise HashMismatch(
            f"Embedded model_hash does not match the network content of {network.name!r}",
            expected=embedded,
            actual=network.model_hash,
        )
    logger.debug(f"Loaded network {network.name} ({network.model_hash[:12]})")

    return network


def dump_network(network: NetworkModel) -> str:
    """Canonical JSON text of a network, with its digest embedded."""
    return canonical_dumps(network.to_dict())
