"""An async wrapper around :py:class:`~domainholder.resolver.resolver_sync.AttributionResolverSync`.

Each resolution runs in the default executor, bounded by a semaphore and a per-resolution timeout.

"""


import asyncio
from dataclasses import replace
import logging

import aiofiles
import async_timeout

from .. import constants
from ..constants import Method
from ..exceptions import InvalidDomain
from ..names.domain import parse_fqdn, registrable_domain
from .records import format_record
from .resolver_sync import AttributionResult

_LOGGER = logging.getLogger(__name__)


class AttributionResolverAsync(object):
    """Resolve domains to organizations from async code.

    Parameters
    ----------
    resolver : AttributionResolverSync
        The resolver that does the work
    timeout_s : float
        The maximum duration (in seconds) of one resolution

    """

    def __init__(self, resolver, timeout_s=constants.DEFAULT_RESOLVE_TIMEOUT_S):
        self._resolver = resolver
        self.timeout_s = timeout_s

    @property
    def store(self):
        """The fixture store used by the wrapped resolver."""
        return self._resolver.store

    async def resolve(self, fqdn):
        """Attribute ``fqdn`` to the organization holding it.

        A resolution that exceeds ``timeout_s`` yields an unidentified result flagged ``TimedOut``; the worker thread is
        left to finish on its own.

        Parameters
        ----------
        fqdn : Fqdn, str
            The domain name

        Returns
        -------
        AttributionResult
            The attribution

        Raises
        ------
        InvalidDomain
            ``fqdn`` is not a valid domain name or has no registrable form

        """
        if isinstance(fqdn, str):
            fqdn = parse_fqdn(fqdn)
        rd = registrable_domain(fqdn, self._resolver.rules)

        try:
            async with async_timeout.timeout(self.timeout_s):
                return await asyncio.get_running_loop().run_in_executor(None, self._resolver.resolve, fqdn)
        except asyncio.TimeoutError:
            _LOGGER.warning("Resolution of %s timed out after %s seconds", fqdn, self.timeout_s)
            return AttributionResult(
                fqdn.text, rd.text, None, Method.UNIDENTIFIED, None, (constants.FLAG_TIMED_OUT,)
            )

    async def resolve_batch(self, fqdns, parallelism=1):
        """Resolve many domains, at most ``parallelism`` at a time.

        Parameters
        ----------
        fqdns : Iterable[str]
            The domain names
        parallelism : int
            The maximum number of concurrent resolutions

        Returns
        -------
        list[AttributionResult]
            One result per input, in input order; names sharing a registrable domain are resolved once, but each name
            gets its own certificate note

        """
        if parallelism < 1:
            raise ValueError("`parallelism` must be at least 1")

        semaphore = asyncio.Semaphore(parallelism)

        async def bounded(fqdn):
            async with semaphore:
                return await self.resolve(fqdn)

        async def bounded_note(fqdn):
            async with semaphore:
                return await asyncio.get_running_loop().run_in_executor(None, self._resolver.certificate_note, fqdn)

        items = []
        tasks = {}
        resolved = {}
        notes = {}
        for text in fqdns:
            try:
                fqdn = parse_fqdn(text)
                rd = registrable_domain(fqdn, self._resolver.rules).text
            except InvalidDomain as exc:
                _LOGGER.warning("Skipping '%s': %s", text, exc)
                items.append((text, None, None))
                continue

            if rd not in tasks:
                tasks[rd] = asyncio.ensure_future(bounded(fqdn))
                resolved[rd] = fqdn.text
            elif self._resolver.compare_certificates and fqdn.text != resolved[rd] and fqdn.text not in notes:
                notes[fqdn.text] = asyncio.ensure_future(bounded_note(fqdn))
            items.append((text, fqdn, rd))

        results = []
        for text, fqdn, rd in items:
            if rd is None:
                results.append(
                    AttributionResult(
                        text.strip(), None, None, Method.UNIDENTIFIED, None, (constants.FLAG_INVALID_DOMAIN,)
                    )
                )
            else:
                result = replace(await tasks[rd], input_fqdn=fqdn.text)
                if fqdn.text in notes:
                    result = replace(result, certificate_note=await notes[fqdn.text])
                results.append(result)

        return results

    async def write_results(self, results, path):
        """Write results to ``path``, one record per line."""
        async with aiofiles.open(path, "w", encoding="utf-8") as f:
            for result in results:
                await f.write(format_record(result) + "\n")
        _LOGGER.debug("Wrote %d results to %s", len(results), path)
