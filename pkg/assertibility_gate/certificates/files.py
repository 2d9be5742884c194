from pathlib import Path
from typing import Union

from ..helpers.canonical import canonical_dumps
from ..helpers.errors import ParseError
from ..helpers.logger import setup_logger
from ..helpers.utilities import read_json, write_text
from .models import CertificateToken, DeploymentContract

logger = setup_logger(name=__name__)


def load_contract(path: Union[str, Path], verify: bool = True) -> DeploymentContract:
    """
    Read a ``.contract.json`` file.

    :param path: (str or Path)
    :param verify: (bool) Refuse a file whose embedded contract_hash is stale
    :return: (DeploymentContract)
    """
    contract = DeploymentContract.from_dict(read_json(path), verify=verify)
    logger.info(f"Loaded contract {contract.contract_hash[:12]} from {path}")
    return contract


def save_contract(contract: DeploymentContract, path: Union[str, Path]) -> Path:
    return write_text(path, canonical_dumps(contract.to_dict()))


def load_certificate_document(path: Union[str, Path]) -> dict:
    """Raw ``.cert.json`` document, left unparsed so the checker can report what is wrong with it."""
    document = read_json(path)
    if not isinstance(document, dict):
        raise ParseError(f"Certificate file {path} does not hold an object")
    return document


def save_certificate(token: CertificateToken, path: Union[str, Path]) -> Path:
    return write_text(path, canonical_dumps(token.to_dict()))


def load_certificate(path: Union[str, Path]) -> CertificateToken:
    return CertificateToken.from_dict(load_certificate_document(path))
