from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from ..helpers.canonical import canonical_dumps
from ..helpers.errors import RecordStoreError
from ..helpers.logger import setup_logger
from ..helpers.utilities import parse_timestamp, read_jsonl, write_text
from .models import RecordItem

logger = setup_logger(name=__name__)


class RecordStore(object):
    """
    Append-only, time-indexed public record.

    Items are kept in append order; as-of queries return everything stamped at or
    before the record time, ordered by timestamp, so a late append of an older item
    shows up in every later query for that time.
    """

    def __init__(
        self,
        items: Iterable[RecordItem] = (),
        completeness_attested: bool = False,
    ):
        """
        :param items: (list) RecordItem objects, appended in order
        :param completeness_attested: (bool) Stub flag for an external registry completeness attestation
        """
        self._items: List[RecordItem] = []
        self._by_id: Dict[str, RecordItem] = {}
        self._by_hash: Dict[str, RecordItem] = {}
        self.completeness_attested = completeness_attested
        for item in items:
            self.append(item)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    @property
    def items(self) -> tuple:
        return tuple(self._items)

    def append(self, item: RecordItem) -> str:
        """
        Append one item.

        :param item: (RecordItem)
        :return: (str) The item hash used by certificates to reference it
        """
        if item.item_id in self._by_id:
            logger.error(f"Record item {item.item_id} is already in the store")
            raise RecordStoreError(f"Record item {item.item_id!r} already exists; the store is append-only")
        item_hash = item.item_hash
        self._items.append(item)
        self._by_id[item.item_id] = item
        self._by_hash[item_hash] = item
        logger.debug(f"Appended {item.item_id} ({item.evidence_class}) at {item.timestamp.isoformat()}")

        return item_hash

    def record_asof(self, t: Union[str, datetime]) -> List[RecordItem]:
        t = parse_timestamp(t)
        ordered = sorted(enumerate(self._items), key=lambda pair: (pair[1].timestamp, pair[0]))
        return [item for _, item in ordered if item.timestamp <= t]

    def resolve(
        self,
        item_hash: str,
        t: Union[str, datetime, None] = None,
    ) -> Optional[RecordItem]:
        """The item with this hash, if present (and stamped no later than ``t`` when given)."""
        item = self._by_hash.get(item_hash)
        if item is None:
            return None
        if t is not None and item.timestamp > parse_timestamp(t):
            return None
        return item

    def get(self, item_id: str) -> Optional[RecordItem]:
        return self._by_id.get(item_id)

    def attest_completeness(self):
        logger.warning("Registry completeness attested without a completeness certificate")
        self.completeness_attested = True

    def copy(self) -> "RecordStore":
        return RecordStore(self._items, completeness_attested=self.completeness_attested)

    def without(self, item_id: str) -> "RecordStore":
        """Replay copy lacking one item; the original store is untouched."""
        return RecordStore(
            (item for item in self._items if item.item_id != item_id),
            completeness_attested=self.completeness_attested,
        )

    def replacing(self, item: RecordItem) -> "RecordStore":
        """Replay copy in which the item with the same id is swapped for ``item``."""
        if item.item_id not in self._by_id:
            raise RecordStoreError(f"No record item {item.item_id!r} to replace")
        return RecordStore(
            (item if old.item_id == item.item_id else old for old in self._items),
            completeness_attested=self.completeness_attested,
        )

    def dumps(self) -> str:
        return "\n".join(canonical_dumps(item.to_dict()) for item in self._items)

    def save(self, path: Union[str, Path]) -> Path:
        return write_text(path, self.dumps())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RecordStore":
        store = cls(RecordItem.from_dict(document) for document in read_jsonl(path))
        logger.info(f"Loaded {len(store)} record items from {path}")
        return store


def record_asof(store: RecordStore, t: Union[str, datetime]) -> List[RecordItem]:
    """
    All items stamped at or before ``t``, in timestamp order.

    :param store: (RecordStore)
    :param t: (datetime or ISO-8601 str) Record time
    :return: (list) RecordItem objects
    """
    return store.record_asof(t)
