"""Attribute domains to the organizations holding them.

The privacy policy published on a domain's site names its data controller; when no usable policy is found, the WHOIS
registrant is used instead.
"""

from .config import Config
from .constants import FixtureMode


__version__ = "0.1.0"


def setup(config=None, mode=None, archive_dir=None, compare_certificates=False):
    """Build a resolver.

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

    Returns
    -------
    AttributionResolverSync
        The resolver

    """
    if not isinstance(config, Config):
        config = Config.load(config)

    if mode is not None:
        config = config.with_fixture_mode(FixtureMode(mode), archive_dir)

    return config.build_resolver(compare_certificates=compare_certificates)
