import os
import sys
import tempfile
import unittest


sys.path.insert(0, "..")

from domainholder import constants
from domainholder.audit.disclosure import merge_spellings
from domainholder.config import Config
from domainholder.constants import FixtureMode, Outcome
from domainholder.evalbench.metrics import GroundTruthEntry, judge
from domainholder.exceptions import ConfigError
from domainholder.names.org import default_designators
from . import patchers


def write_config(directory, content):
    """Write a configuration file and return its path."""
    path = os.path.join(directory, "domainholder.ini")
    with open(path, "w", encoding="utf-8") as f:
        f.write(content)
    return path


class TestConfig(unittest.TestCase):
    def test_defaults(self):
        """Check the default configuration."""
        config = Config.load()

        self.assertEqual(config.max_requests_per_domain, 5)
        self.assertEqual(config.search_provider, "google-cse")
        self.assertEqual(config.search_credential_env, "DOMAINHOLDER_SEARCH_KEY")
        self.assertIs(config.fixture_mode, FixtureMode.LIVE)
        self.assertEqual(config.fetch_policy().max_requests_per_domain, 5)
        self.assertIsNone(config.build_store().cache)

    def test_load(self):
        """Check that values are typed and relative paths are resolved against the file's directory."""
        with tempfile.TemporaryDirectory() as tmpdir:
            os.mkdir(os.path.join(tmpdir, "archive"))
            path = write_config(
                tmpdir,
                "[domainholder]\n"
                "max_requests_per_domain = 3\n"
                "total_timeout_s = 12.5\n"
                "search_provider = none\n"
                "fixture_mode = Record\n"
                "fixture_archive = archive\n"
                "cache_dir = cache\n",
            )
            config = Config.load(path)

            self.assertEqual(config.max_requests_per_domain, 3)
            self.assertEqual(config.total_timeout_s, 12.5)
            self.assertIs(config.fixture_mode, FixtureMode.RECORD)
            self.assertEqual(config.fixture_archive, os.path.join(tmpdir, "archive"))
            self.assertEqual(config.cache_dir, os.path.join(tmpdir, "cache"))
            self.assertIsNone(config.build_provider())

    def test_empty_file(self):
        """Check that a file without a section gives the defaults."""
        with tempfile.TemporaryDirectory() as tmpdir:
            self.assertEqual(Config.load(write_config(tmpdir, "# nothing here\n")), Config())

    def test_invalid_files(self):
        """Check that unusable configuration files are rejected."""
        with tempfile.TemporaryDirectory() as tmpdir:
            for content in (
                "[domainholder]\nsearch_key = abc123\n",
                "[domainholder]\napi_key = abc123\n",
                "[domainholder]\nmax_request_per_domain = 5\n",
                "[domainholder]\nmax_requests_per_domain = five\n",
                "[domainholder]\nmax_requests_per_domain = 0\n",
                "[domainholder]\nmax_redirects = 0\n",
                "[domainholder]\nconnect_timeout_s = -1\n",
                "[domainholder]\nsearch_provider = bing\n",
                "[domainholder]\nsearch_result_limit = 0\n",
                "[domainholder]\ncache_ttl_s = 0\n",
                "[domainholder]\nfixture_mode = replay\n",
                "[domainholder]\nfixture_mode = rewind\nfixture_archive = archive\n",
                "[domainholder]\npublic_suffix_file = missing.dat\n",
                "[domainholder]\nlanguage_profile_dir = missing\n",
                "[domainholder]\n[other]\n",
                "max_redirects = 5\n",
            ):
                with self.assertRaises(ConfigError):
                    Config.load(write_config(tmpdir, content))

        with self.assertRaises(ConfigError):
            Config.load("/nonexistent/domainholder.ini")

    def test_with_fixture_mode(self):
        """Check switching the fixture mode."""
        config = Config().with_fixture_mode(FixtureMode.REPLAY, patchers.ARCHIVE_DIR)
        self.assertIs(config.fixture_mode, FixtureMode.REPLAY)
        self.assertIs(config.build_store().mode, FixtureMode.REPLAY)

        self.assertIs(config.with_fixture_mode("live").fixture_mode, FixtureMode.LIVE)

        with self.assertRaises(ConfigError):
            Config().with_fixture_mode(FixtureMode.REPLAY)

    def test_data_overrides(self):
        """Check that bundled data files can be replaced."""
        config = Config(
            public_suffix_file=constants.PUBLIC_SUFFIX_FILE,
            legal_designators_file=constants.LEGAL_DESIGNATORS_FILE,
            ev_oids_file=constants.EV_OIDS_FILE,
        )

        self.assertEqual(config.build_suffix_rules().path, os.path.abspath(constants.PUBLIC_SUFFIX_FILE))
        self.assertIn("inc", config.build_entity_rules().designators)
        self.assertTrue(config.build_ev_oids())

    def test_designators(self):
        """Check that a configured designator list replaces the bundled one wherever names are compared."""
        self.assertEqual(Config().build_designators(), default_designators())

        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "designators.txt")
            with open(path, "w", encoding="utf-8") as f:
                f.write("# designators\ninc\ngruppe\n")
            designators = Config(legal_designators_file=path).build_designators()

        self.assertEqual(designators, frozenset({"inc", "gruppe"}))

        truth = GroundTruthEntry("a.example", "Example Gruppe")
        self.assertIs(judge("Gruppe", truth), Outcome.TP)
        self.assertIs(judge("Gruppe", truth, designators), Outcome.FP)

        self.assertEqual(
            merge_spellings(["Example Gruppe", "Example Inc."], designators),
            {"Example Gruppe": "Example Gruppe", "Example Inc.": "Example Gruppe"},
        )
        self.assertEqual(
            merge_spellings(["Example Gruppe", "Example Inc."]),
            {"Example Gruppe": "Example Gruppe", "Example Inc.": "Example Inc."},
        )

    def test_build_resolver(self):
        """Check that a configured resolver attributes from the archive."""
        config = Config(fixture_mode=FixtureMode.REPLAY, fixture_archive=patchers.ARCHIVE_DIR)
        resolver = config.build_resolver()

        self.assertEqual(resolver.resolve("graph.socialnet.example").organization, "SocialNet Platforms, Inc.")


if __name__ == "__main__":
    unittest.main()
