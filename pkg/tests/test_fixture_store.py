import os
import shutil
import sys
import tempfile
import unittest

try:
    # Python3
    from unittest.mock import MagicMock
except ImportError:
    # Python2
    from mock import MagicMock


sys.path.insert(0, "..")

from domainholder.constants import FixtureMode, TransactionKind
from domainholder.exceptions import ArchiveCorrupt, ConfigError, FetchTimeout, ReplayMiss
from domainholder.fetch_manager.fixture_store import (
    FixtureStore,
    decode_payload,
    encode_payload,
    http_descriptor,
    normalize_url,
    search_descriptor,
    tls_descriptor,
    whois_descriptor,
)
from . import patchers


class TestDescriptors(unittest.TestCase):
    def test_normalize_url(self):
        """Check that equivalent URLs share one normalized form."""
        self.assertEqual(normalize_url("HTTPS://Example.COM"), "https://example.com/")
        self.assertEqual(normalize_url("https://example.com:443/a#top"), "https://example.com/a")
        self.assertEqual(normalize_url("http://example.com:80/"), "http://example.com/")
        self.assertEqual(normalize_url("http://example.com:8080/"), "http://example.com:8080/")
        self.assertEqual(normalize_url("https://example.com/p?b=2&a=1"), normalize_url("https://example.com/p?a=1&b=2"))

    def test_descriptor_keys(self):
        """Check the archive keys of every kind of transaction."""
        self.assertEqual(
            http_descriptor("https://example.com/p?b=2&a=1").key, "http GET https://example.com/p?a=1&b=2"
        )
        self.assertEqual(http_descriptor("https://example.com/?b=2&a=1"), http_descriptor("https://example.com?a=1&b=2"))
        self.assertEqual(whois_descriptor("WHOIS.Verisign-GRS.com", " Example.COM ").key, "whois whois.verisign-grs.com example.com")
        self.assertEqual(tls_descriptor("Example.com").key, "tls example.com:443")
        self.assertEqual(search_descriptor("google-cse", "Example.com   Privacy Policy").key, "search google-cse example.com privacy policy")

        # the domain is not part of the key
        self.assertEqual(
            http_descriptor("https://example.com/", domain="example.com").key, http_descriptor("https://example.com/").key
        )
        self.assertIs(whois_descriptor("whois.nic.example", "a.example").kind, TransactionKind.WHOIS)

    def test_http_payload(self):
        """Check that a stored HTTP response keeps its status, headers, and body."""
        response = patchers.http_response("<p>café</p>", 404, (("Content-Type", "text/html"), ("X-Test", "a: b")))
        decoded = decode_payload(TransactionKind.HTTP, encode_payload(TransactionKind.HTTP, response))
        self.assertEqual(decoded, response)
        self.assertEqual(decoded.header("x-test"), "a: b")
        self.assertIsNone(decoded.header("Location"))

        with self.assertRaises(ArchiveCorrupt):
            decode_payload(TransactionKind.HTTP, b"garbage\n\n")

        with self.assertRaises(ArchiveCorrupt):
            decode_payload(TransactionKind.SEARCH, b'{"results": []}')


class TestFixtureStore(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.archive_dir = os.path.join(self.tmpdir.name, "archive")

    def tearDown(self):
        self.tmpdir.cleanup()

    def test_archive_required(self):
        """Check that the record and replay modes need an archive directory."""
        with self.assertRaises(ConfigError):
            FixtureStore(FixtureMode.RECORD)

        with self.assertRaises(ConfigError):
            FixtureStore(FixtureMode.REPLAY, None)

        with self.assertRaises(ArchiveCorrupt):
            FixtureStore(FixtureMode.REPLAY, self.archive_dir)

        os.makedirs(self.archive_dir)
        with self.assertRaises(ArchiveCorrupt):
            FixtureStore(FixtureMode.REPLAY, self.archive_dir)

    def test_record_then_replay(self):
        """Check that a recorded transaction replays byte-identically without calling the network."""
        body = "<html><body><p>Hello é world</p></body></html>".encode("utf-8") + b"\x00\xff"
        response = patchers.http_response(body)
        descriptor = http_descriptor("https://example.com/?b=2&a=1", domain="example.com")

        recorder = FixtureStore(FixtureMode.RECORD, self.archive_dir)
        live_call = MagicMock(return_value=response)
        self.assertEqual(recorder.transact(descriptor, live_call), response)
        live_call.assert_called_once()
        self.assertEqual(len(recorder.entries), 1)

        player = FixtureStore(FixtureMode.REPLAY, self.archive_dir)
        live_call = MagicMock()
        replayed = player.transact(http_descriptor("https://example.com/?a=1&b=2"), live_call)
        live_call.assert_not_called()
        self.assertEqual(replayed.body, body)
        self.assertEqual(replayed.status_code, 200)

        with self.assertRaises(ReplayMiss):
            player.transact(http_descriptor("https://example.com/other"), live_call)

    def test_record_all_kinds(self):
        """Check that WHOIS, TLS, and search payloads are archived and replayed."""
        store = patchers.build_archive(
            self.archive_dir,
            [
                (whois_descriptor("whois.nic.example", "a.example"), "Registrant Organization: A Corp\n"),
                (tls_descriptor("a.example"), b"\x30\x82\x01\x00"),
                (search_descriptor("google-cse", "a.example privacy policy"), ["https://a.example/privacy"]),
                (tls_descriptor("b.example"), FetchTimeout("Handshake timed out")),
            ],
        )

        self.assertEqual(
            store.transact(whois_descriptor("whois.nic.example", "a.example"), None), "Registrant Organization: A Corp\n"
        )
        self.assertEqual(store.transact(tls_descriptor("a.example"), None), b"\x30\x82\x01\x00")
        self.assertEqual(
            store.transact(search_descriptor("google-cse", "A.example privacy policy"), None), ["https://a.example/privacy"]
        )

        with self.assertRaises(FetchTimeout) as context:
            store.transact(tls_descriptor("b.example"), None)
        self.assertEqual(str(context.exception), "Handshake timed out")

        self.assertEqual(store.verify(), [])

    def test_record_failure(self):
        """Check that a failed live transaction is archived and raised again."""
        recorder = FixtureStore(FixtureMode.RECORD, self.archive_dir)
        descriptor = http_descriptor("https://slow.example/", domain="slow.example")
        with self.assertRaises(FetchTimeout):
            recorder.transact(descriptor, MagicMock(side_effect=FetchTimeout("Request timed out")))

        self.assertTrue(recorder.entries[0].path.endswith(".err"))
        with self.assertRaises(FetchTimeout):
            FixtureStore(FixtureMode.REPLAY, self.archive_dir).transact(descriptor, None)

    def test_live_mode(self):
        """Check that live mode calls the network and never writes an archive."""
        store = FixtureStore(FixtureMode.LIVE)
        live_call = MagicMock(return_value=["https://a.example/"])
        self.assertEqual(store.transact(search_descriptor("google-cse", "a"), live_call), ["https://a.example/"])
        live_call.assert_called_once()

        with self.assertRaises(ConfigError):
            store.record_transaction(search_descriptor("google-cse", "a"), [])

    def test_transaction_log(self):
        """Check that every transaction is logged with its kind and domain."""
        store = FixtureStore(FixtureMode.LIVE)
        store.transact(http_descriptor("https://a.example/", domain="a.example"), MagicMock())
        store.transact(http_descriptor("https://www.a.example/", domain="a.example"), MagicMock())
        store.transact(whois_descriptor("whois.nic.example", "a.example", domain="a.example"), MagicMock())
        store.transact(http_descriptor("https://b.example/", domain="b.example"), MagicMock())

        self.assertEqual(len(store.transactions), 4)
        self.assertEqual(store.count(TransactionKind.HTTP), 3)
        self.assertEqual(store.count(TransactionKind.HTTP, "a.example"), 2)
        self.assertEqual(store.count(domain="a.example"), 3)
        self.assertEqual(store.count(TransactionKind.TLS), 0)

    def test_invalid_index(self):
        """Check that malformed index lines are reported."""
        os.makedirs(self.archive_dir)
        with open(os.path.join(self.archive_dir, "index.tsv"), "w") as f:
            f.write("http GET https://a.example/\thttp\n")
        with self.assertRaises(ArchiveCorrupt):
            FixtureStore(FixtureMode.REPLAY, self.archive_dir)

        with open(os.path.join(self.archive_dir, "index.tsv"), "w") as f:
            f.write("ftp a.example\tftp\tx.ftp\t2026-01-15T00:00:00Z\n")
        with self.assertRaises(ArchiveCorrupt):
            FixtureStore(FixtureMode.REPLAY, self.archive_dir)

    def test_stored_error_unknown(self):
        """Check that a stored error must name one of the package's exceptions."""
        os.makedirs(self.archive_dir)
        with open(os.path.join(self.archive_dir, "a.err"), "w") as f:
            f.write("SystemExit: bye\n")
        with open(os.path.join(self.archive_dir, "index.tsv"), "w") as f:
            f.write("http GET https://a.example/\thttp\ta.err\t2026-01-15T00:00:00Z\n")

        store = FixtureStore(FixtureMode.REPLAY, self.archive_dir)
        with self.assertRaises(ArchiveCorrupt):
            store.transact(http_descriptor("https://a.example/"), None)
        self.assertEqual(len(store.verify()), 1)


class TestVerify(unittest.TestCase):
    def test_bundled_archive(self):
        """Check that the bundled archive is intact."""
        store = FixtureStore(FixtureMode.REPLAY, patchers.ARCHIVE_DIR)
        self.assertEqual(len(store.entries), 49)
        self.assertEqual(store.verify(), [])

    def test_tampered_archive(self):
        """Check that edited and missing archive files are reported."""
        with tempfile.TemporaryDirectory() as tmpdir:
            archive_dir = os.path.join(tmpdir, "archive")
            shutil.copytree(patchers.ARCHIVE_DIR, archive_dir)
            store = FixtureStore(FixtureMode.REPLAY, archive_dir)

            entries = [entry for entry in store.entries if entry.path.endswith(".txt")]
            with open(os.path.join(archive_dir, entries[0].path), "a") as f:
                f.write("Registrant Organization: Someone Else\n")
            os.remove(os.path.join(archive_dir, entries[1].path))

            problems = store.verify()
            self.assertEqual(len(problems), 2)
            self.assertIn("digest mismatch", problems[0] + problems[1])
            self.assertIn("missing", problems[0] + problems[1])


if __name__ == "__main__":
    unittest.main()
