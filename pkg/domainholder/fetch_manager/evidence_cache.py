"""An on-disk cache of live evidence, keyed by transaction kind and registrable domain.

"""


import base64
import hashlib
import json
import logging
import os
import threading
import time

from ..constants import DEFAULT_CACHE_TTL_S
from .fixture_store import decode_payload, encode_payload

_LOGGER = logging.getLogger(__name__)


class EvidenceCache(object):
    """Cache the responses of live transactions for ``ttl_s`` seconds.

    Entries live at ``<cache_dir>/<kind>/<registrable domain>/<key digest>.json``.

    Parameters
    ----------
    cache_dir : str
        The cache directory
    ttl_s : float
        How long an entry stays valid (in seconds)
    clock : callable
        Returns the current time as a UNIX timestamp

    """

    def __init__(self, cache_dir, ttl_s=DEFAULT_CACHE_TTL_S, clock=time.time):
        if ttl_s <= 0:
            raise ValueError("`ttl_s` must be positive")

        self.cache_dir = cache_dir
        self.ttl_s = ttl_s
        self._clock = clock
        self._lock = threading.Lock()

    def _path(self, descriptor):
        digest = hashlib.sha1(descriptor.key.encode("utf-8")).hexdigest()
        return os.path.join(self.cache_dir, descriptor.kind.value, descriptor.domain or "_", digest + ".json")

    def get(self, descriptor):
        """Get the cached response for a transaction.

        Parameters
        ----------
        descriptor : Descriptor
            The transaction

        Returns
        -------
        HttpResponse, str, bytes, list, None
            The cached response, or ``None`` if there is no valid entry

        """
        path = self._path(descriptor)
        try:
            with open(path, encoding="utf-8") as f:
                entry = json.load(f)
        except (OSError, ValueError):
            return None

        if entry.get("key") != descriptor.key:
            return None

        if self._clock() - entry.get("timestamp", 0) > self.ttl_s:
            _LOGGER.debug("Evidence cache entry for %s has expired", descriptor.key)
            return None

        return decode_payload(descriptor.kind, base64.b64decode(entry["data"]))

    def put(self, descriptor, payload):
        """Store the response for a transaction.

        Parameters
        ----------
        descriptor : Descriptor
            The transaction
        payload : HttpResponse, str, bytes, list
            The response

        """
        path = self._path(descriptor)
        entry = {
            "key": descriptor.key,
            "timestamp": self._clock(),
            "data": base64.b64encode(encode_payload(descriptor.kind, payload)).decode("ascii"),
        }

        with self._lock:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(entry, f, sort_keys=True)
