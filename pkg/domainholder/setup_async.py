"""Build an async resolver.

"""

from . import setup as setup_sync
from .constants import DEFAULT_RESOLVE_TIMEOUT_S
from .resolver.resolver_async import AttributionResolverAsync


async def setup(config=None, mode=None, archive_dir=None, compare_certificates=False, timeout_s=DEFAULT_RESOLVE_TIMEOUT_S):
    """Build an async resolver.

    Parameters
    ----------
    config : Config, str, None
        The configuration, or the path to a configuration file; ``None`` uses the defaults
    mode : FixtureMode, str, None
        Overrides the configured fixture mode: ``'live'``, ``'record'``, or ``'replay'``
    archive_dir : str, None
        The fixture archive (required for ``'record'`` and ``'replay'`` unless configured)
    compare_certificates : bool
        Whether to attach each domain's certificate as an informational note
    timeout_s : float
        The maximum duration (in seconds) of one resolution

    Returns
    -------
    AttributionResolverAsync
        The resolver

    """
    return AttributionResolverAsync(setup_sync(config, mode, archive_dir, compare_certificates), timeout_s)
