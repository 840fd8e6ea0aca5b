import os
import random
import socket
import string
import sys
import tempfile
import unittest

sys.path.insert(0, "..")

from domainholder.constants import FixtureMode, RegistrantKind, TransactionKind
from domainholder.exceptions import EmptyResponse, FetchTimeout, FormatError, NoServerForTld, ReplayMiss, TransportFailure
from domainholder.fetch_manager.fetch_manager_sync import HostRateLimiter
from domainholder.fetch_manager.fixture_store import FixtureStore, whois_descriptor
from domainholder.whois.registrant import (
    RedactionLexicon,
    default_redaction_lexicon,
    parse_registrant,
    redaction_match,
)
from domainholder.whois.whois_client import TldServerMap, WhoisClient, WhoisRecord, find_referral, whois_query
from . import patchers


def record(*texts, domain="example.com"):
    """Build a WHOIS record with one hop per text."""
    return WhoisRecord(domain, tuple(("whois{}.example".format(i), text) for i, text in enumerate(texts)))


#: Registrar records and the registrant classification they must parse to
LABELED_RECORDS = [
    ("Registrant Organization: Amazon Technologies, Inc.\n", RegistrantKind.ORG, "Amazon Technologies, Inc."),
    ("Domain Name: EXAMPLE.COM\nRegistrant Organization:   Mozilla Foundation  \nRegistrant Country: US\n", RegistrantKind.ORG, "Mozilla Foundation"),
    ("registrant organisation: Acme Analytics GmbH\n", RegistrantKind.ORG, "Acme Analytics GmbH"),
    ("RegistrantOrganization: Example Corp\n", RegistrantKind.ORG, "Example Corp"),
    ("   Registrant  Organization : Hispano Publicidad S.L.\n", RegistrantKind.ORG, "Hispano Publicidad S.L."),
    ("Registrant Organization: Tech: Solutions Ltd\n", RegistrantKind.ORG, "Tech: Solutions Ltd"),
    ("Registrant Organization: REDACTED FOR PRIVACY\n", RegistrantKind.REDACTED, "REDACTED FOR PRIVACY"),
    ("Registrant Organization: Contact Privacy Inc. Customer 1234\n", RegistrantKind.REDACTED, "Contact Privacy Inc. Customer 1234"),
    ("Registrant Organization: WhoisGuard, Inc.\n", RegistrantKind.REDACTED, "WhoisGuard, Inc."),
    ("Registrant Organization: Data Protected\n", RegistrantKind.REDACTED, "Data Protected"),
    ("Registrant Organization: Domains By Proxy, LLC\n", RegistrantKind.REDACTED, "Domains By Proxy, LLC"),
    ("Registrant Organization: Statutory Masking Enabled\n", RegistrantKind.REDACTED, "Statutory Masking Enabled"),
    ("Registrant Organization: Withheld for GDPR\n", RegistrantKind.REDACTED, "Withheld for GDPR"),
    ("Registrant Organization: Not Disclosed\n", RegistrantKind.REDACTED, "Not Disclosed"),
    ("Registrant Organization: Identity Protection Service\n", RegistrantKind.REDACTED, "Identity Protection Service"),
    ("Registrant Organization: \n", RegistrantKind.EMPTY, None),
    ("Registrant Organization:\nRegistrant Country: DE\n", RegistrantKind.EMPTY, None),
    ("Domain Name: EXAMPLE.COM\nRegistrant Name: Jane Doe\nRegistrant Country: US\n", RegistrantKind.ABSENT, None),
    ("Registrant: Example Corp\nOrganization: Example Corp\n", RegistrantKind.ABSENT, None),
    ("", RegistrantKind.ABSENT, None),
]


class TestParseRegistrant(unittest.TestCase):
    def test_labeled_records(self):
        """Check that every hand-built record parses as labeled."""
        self.assertGreaterEqual(len(LABELED_RECORDS), 15)
        for text, kind, value in LABELED_RECORDS:
            result = parse_registrant(record(text))
            self.assertIs(result.kind, kind, text)
            self.assertEqual(result.value, value, text)

    def test_hop_order(self):
        """Check that the registrar hop is scanned before the registry hop."""
        registry = "Domain Name: EXAMPLE.COM\nRegistrar WHOIS Server: whois1.example\n"
        self.assertEqual(parse_registrant(record(registry, "Registrant Organization: Registrar Corp\n")).value, "Registrar Corp")

        # the registrar has no field, the registry does
        result = parse_registrant(record("Registrant Organization: Registry Corp\n", "Domain Name: EXAMPLE.COM\n"))
        self.assertEqual(result.value, "Registry Corp")

        # the registrar redacts what the registry shows
        result = parse_registrant(record("Registrant Organization: Registry Corp\n", "Registrant Organization: REDACTED\n"))
        self.assertIs(result.kind, RegistrantKind.REDACTED)

    def test_pure(self):
        """Check that parsing the same record twice gives the same result."""
        rec = record("Registrant Organization: Example Corp\n")
        self.assertEqual(parse_registrant(rec), parse_registrant(rec))

    def test_never_org_when_redacted(self):
        """Check that a value matching the redaction lexicon is never classified as an organization."""
        rng = random.Random(4)
        lexicon = default_redaction_lexicon()
        words = list(lexicon.entries) + ["Example", "Corp", "Inc.", "Media", "GmbH", "Pri", "vacy", "Data", "Ltd", "Proxy"]
        alphabet = string.ascii_letters + string.digits + " .,-&"

        for _ in range(10000):
            parts = []
            for _ in range(rng.randint(1, 4)):
                if rng.random() < 0.5:
                    word = rng.choice(words)
                    parts.append(word.upper() if rng.random() < 0.3 else word.title() if rng.random() < 0.5 else word)
                else:
                    parts.append("".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8))))
            value = rng.choice(["", " "]).join(parts)

            result = parse_registrant(record("Registrant Organization: {}\n".format(value)))
            if result.kind is RegistrantKind.ORG:
                self.assertFalse(redaction_match(result.value, lexicon), value)
                self.assertFalse(any(entry in value.casefold() for entry in lexicon.entries), value)


class TestRedaction(unittest.TestCase):
    def test_redaction_match(self):
        """Check the substring rule of the redaction lexicon."""
        self.assertTrue(redaction_match("Contact Privacy Inc."))
        self.assertTrue(redaction_match("REDACTED FOR PRIVACY"))
        self.assertFalse(redaction_match("Mozilla Foundation"))
        self.assertFalse(redaction_match(""))

        lexicon = RedactionLexicon(("Data Protected",))
        self.assertTrue(redaction_match("data protected", lexicon))
        self.assertFalse(redaction_match("Private Data", lexicon))

    def test_lexicon(self):
        """Check the bundled lexicon and lexicon validation."""
        self.assertIn("whoisguard", default_redaction_lexicon().entries)
        self.assertEqual(len(default_redaction_lexicon().entries), 10)

        with self.assertRaises(ValueError):
            RedactionLexicon(())

        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "lexicon.txt")
            with open(path, "w") as f:
                f.write("# comment\nHidden\n\n")
            self.assertEqual(RedactionLexicon.from_file(path).entries, ("hidden",))


class TestTldServerMap(unittest.TestCase):
    def test_server_for(self):
        """Check the TLD to server map and its fallback."""
        servers = TldServerMap()
        self.assertEqual(servers.server_for("amazon.com"), "whois.verisign-grs.com")
        self.assertEqual(servers.server_for("example.co.uk"), "whois.nic.uk")
        self.assertEqual(servers.server_for("tiktok-fixture.example"), "whois.nic.example")
        self.assertEqual(servers.server_for("foo.zz"), "whois.nic.zz")

    def test_no_server(self):
        """Check TLDs without a WHOIS service and malformed map files."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "servers.tsv")
            with open(path, "w") as f:
                f.write("# tld\tserver\nzz\tNONE\n.yy\twhois.yy.example\n")
            servers = TldServerMap(path)
            self.assertEqual(servers.server_for("a.yy"), "whois.yy.example")
            with self.assertRaises(NoServerForTld):
                servers.server_for("a.zz")

            with open(path, "w") as f:
                f.write("zz\n")
            with self.assertRaises(FormatError):
                TldServerMap(path)


class TestFindReferral(unittest.TestCase):
    def test_find_referral(self):
        """Check the referral line formats."""
        self.assertEqual(find_referral("Registrar WHOIS Server: whois.registrar.example\n", "whois.nic.example"), "whois.registrar.example")
        self.assertEqual(find_referral("   Whois Server: WHOIS.Registrar.example \n", "whois.nic.example"), "whois.registrar.example")
        self.assertEqual(find_referral("refer: whois.verisign-grs.com\n", "whois.iana.org"), "whois.verisign-grs.com")
        self.assertEqual(find_referral("Registrar WHOIS Server: https://whois.registrar.example/\n", "x"), "whois.registrar.example")
        self.assertIsNone(find_referral("Registrar WHOIS Server: whois.nic.example\n", "whois.nic.example"))
        self.assertIsNone(find_referral("Registrar: Example Registrar\n", "whois.nic.example"))


class TestWhoisClient(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.archive_dir = os.path.join(self.tmpdir.name, "archive")

    def tearDown(self):
        self.tmpdir.cleanup()

    def test_referral(self):
        """Check that a registry referral leads to a second hop."""
        store = patchers.build_archive(
            self.archive_dir,
            [
                (
                    whois_descriptor("whois.nic.example", "quietapp.example"),
                    "Domain Name: QUIETAPP.EXAMPLE\nRegistrar WHOIS Server: whois.registrar.example\n",
                ),
                (whois_descriptor("whois.registrar.example", "quietapp.example"), "Registrant Organization: QuietApp Labs LLC\n"),
            ],
        )
        rec = WhoisClient(store).query("QuietApp.example")

        self.assertEqual(len(rec.hops), 2)
        self.assertEqual(rec.final_server, "whois.registrar.example")
        self.assertEqual(rec.locator, "whois://whois.registrar.example/quietapp.example")
        self.assertIn("QuietApp Labs LLC", rec.raw)
        self.assertEqual(store.count(TransactionKind.WHOIS, "quietapp.example"), 2)
        self.assertEqual(parse_registrant(rec).value, "QuietApp Labs LLC")

    def test_no_referral(self):
        """Check that a response without a referral is a single hop."""
        store = patchers.build_archive(
            self.archive_dir,
            [(whois_descriptor("whois.nic.example", "examplecorp.example"), "Registrant Organization: Example Corp\n")],
        )
        rec = WhoisClient(store).query("examplecorp.example")
        self.assertEqual(len(rec.hops), 1)

    def test_referral_loop(self):
        """Check that a referral loop stops after three hops."""
        store = patchers.build_archive(
            self.archive_dir,
            [
                (whois_descriptor("whois.a.example", "loop.example"), "Whois Server: whois.b.example\n"),
                (whois_descriptor("whois.b.example", "loop.example"), "Whois Server: whois.a.example\n"),
            ],
        )
        path = os.path.join(self.tmpdir.name, "servers.tsv")
        with open(path, "w") as f:
            f.write("example\twhois.a.example\n")
        client = WhoisClient(store, TldServerMap(path), max_hops=3)

        rec = client.query("loop.example")
        self.assertEqual([server for server, _ in rec.hops], ["whois.a.example", "whois.b.example", "whois.a.example"])

    def test_referral_failure(self):
        """Check that a failed or unrecorded referral keeps the registry hop, but a failed registry query raises."""
        store = patchers.build_archive(
            self.archive_dir,
            [
                (whois_descriptor("whois.nic.example", "a.example"), "Registrar WHOIS Server: whois.down.example\n"),
                (whois_descriptor("whois.down.example", "a.example"), TransportFailure("Connection refused")),
                (whois_descriptor("whois.nic.example", "b.example"), FetchTimeout("WHOIS query timed out")),
                (whois_descriptor("whois.nic.example", "c.example"), "  \n"),
                (whois_descriptor("whois.nic.example", "e.example"), "Registrar WHOIS Server: whois.unrecorded.example\n"),
            ],
        )
        client = WhoisClient(store)

        rec = client.query("a.example")
        self.assertEqual(len(rec.hops), 1)
        self.assertIs(parse_registrant(rec).kind, RegistrantKind.ABSENT)

        with self.assertRaises(FetchTimeout):
            client.query("b.example")

        with self.assertRaises(EmptyResponse):
            client.query("c.example")

        with self.assertRaises(ReplayMiss):
            client.query("d.example")

        rec = client.query("e.example")
        self.assertEqual([server for server, _ in rec.hops], ["whois.nic.example"])

    def test_bundled_archive(self):
        """Check the WHOIS records in the bundled archive."""
        client = WhoisClient(FixtureStore(FixtureMode.REPLAY, patchers.ARCHIVE_DIR))

        rec = client.query("unseenreport.com")
        self.assertEqual(rec.final_server, "whois.namecheap.com")
        self.assertIs(parse_registrant(rec).kind, RegistrantKind.REDACTED)

        self.assertIs(parse_registrant(client.query("backendonly.example")).kind, RegistrantKind.ABSENT)
        self.assertIs(parse_registrant(client.query("mediaportal.example")).kind, RegistrantKind.EMPTY)
        self.assertEqual(parse_registrant(client.query("tiktok-fixture.example")).value, "TikTok Inc.")

    def test_whois_query(self):
        """Check the module-level lookup against the bundled archive."""
        rec = whois_query("unseenreport.com", FixtureStore(FixtureMode.REPLAY, patchers.ARCHIVE_DIR))
        self.assertEqual(rec.final_server, "whois.namecheap.com")

    def test_query_live(self):
        """Check the wire protocol: one CRLF-terminated query per hop, response read to EOF."""
        patcher, sockets = patchers.patch_whois_connection(
            {
                "whois.verisign-grs.com": "Domain Name: EXAMPLE.COM\r\nRegistrar WHOIS Server: whois.registrar.example\r\n",
                "whois.registrar.example": "Registrant Organization: Example Corp\r\n" + "% padding\r\n" * 1000,
            }
        )
        client = WhoisClient(FixtureStore(FixtureMode.LIVE), rate_limiter=HostRateLimiter(0))
        with patcher:
            rec = client.query("example.com")

        self.assertEqual([server for server, _ in sockets], ["whois.verisign-grs.com", "whois.registrar.example"])
        self.assertEqual(sockets[0][1].sent, [b"example.com\r\n"])
        self.assertEqual(parse_registrant(rec).value, "Example Corp")
        self.assertEqual(rec.raw.count("% padding"), 1000)

    def test_query_live_errors(self):
        """Check that socket errors are mapped to fetch errors."""
        patcher, _ = patchers.patch_whois_connection({"whois.verisign-grs.com": socket.timeout("timed out")})
        client = WhoisClient(FixtureStore(FixtureMode.LIVE), rate_limiter=HostRateLimiter(0))
        with patcher:
            with self.assertRaises(FetchTimeout):
                client.query("example.com")

            with self.assertRaises(TransportFailure):
                client.query("example.org")


if __name__ == "__main__":
    unittest.main()
