import sys
import unittest


sys.path.insert(0, "..")

from domainholder.constants import FixtureMode
from domainholder.exceptions import ConfigError
from domainholder.names.domain import default_suffix_rules
from domainholder.policy.classifier import default_classifier
from domainholder.policy.language import default_language_detector
from domainholder.resolver.resolver_async import AttributionResolverAsync
from domainholder.setup_async import setup

from . import patchers
from .async_wrapper import awaiter


class TestSetup(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        # train and load outside the event loop
        default_classifier()
        default_language_detector()
        default_suffix_rules()

    @awaiter
    async def test_setup(self):
        """Test that the ``setup`` function works correctly."""
        resolver = await setup(mode="replay", archive_dir=patchers.ARCHIVE_DIR, timeout_s=60.0)
        self.assertIsInstance(resolver, AttributionResolverAsync)
        self.assertIs(resolver.store.mode, FixtureMode.REPLAY)
        self.assertEqual(resolver.timeout_s, 60.0)

        result = await resolver.resolve("cdn.acme-analytics.example")
        self.assertEqual(result.organization, "Acme Analytics GmbH")

    @awaiter
    async def test_setup_invalid(self):
        """Test that ``setup`` rejects an unusable fixture mode."""
        with self.assertRaises(ConfigError):
            await setup(mode="record")


if __name__ == "__main__":
    unittest.main()
