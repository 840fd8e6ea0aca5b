import random
import string
import sys
import unittest

sys.path.insert(0, "..")

from domainholder.exceptions import EmptyAfterNormalization, EmptyInput, IllegalLabel, IpLiteral, IsPublicSuffix, NoLabels
from domainholder.names.domain import Fqdn, parse_fqdn, registrable_domain, registrable_domain_for_url
from domainholder.names.org import normalize_org, same_organization


LABEL_CHARS = string.ascii_lowercase + string.digits

REGISTRABLE_DOMAINS = ["amazon.com", "example.co.uk", "tiktok-fixture.example", "bbc.co.uk", "mozilla.org"]


def random_label(rng):
    """Build a random valid DNS label."""
    length = rng.randint(1, 12)
    label = "".join(rng.choice(LABEL_CHARS) for _ in range(length))
    if length > 2 and rng.random() < 0.3:
        label = label[0] + "-" + label[2:]
    return label


class TestParseFqdn(unittest.TestCase):
    def test_parse_fqdn(self):
        """Check that ``parse_fqdn`` canonicalizes host names."""
        self.assertEqual(parse_fqdn("WWW.Amazon.COM").labels, ("www", "amazon", "com"))
        self.assertEqual(parse_fqdn("aws.amazon.com").labels, ("aws", "amazon", "com"))
        self.assertEqual(parse_fqdn("  amazon.com.  ").text, "amazon.com")
        self.assertEqual(str(parse_fqdn("_dmarc.example.com")), "_dmarc.example.com")

    def test_parse_fqdn_invalid(self):
        """Check that ``parse_fqdn`` rejects malformed names."""
        with self.assertRaises(IllegalLabel):
            parse_fqdn("a..b")

        with self.assertRaises(IllegalLabel):
            parse_fqdn("-bad.example.com")

        with self.assertRaises(IllegalLabel):
            parse_fqdn("bad-.example.com")

        with self.assertRaises(IllegalLabel):
            parse_fqdn("sp ace.example.com")

        with self.assertRaises(IllegalLabel):
            parse_fqdn("{}.com".format("a" * 64))

        with self.assertRaises(IllegalLabel):
            parse_fqdn(".".join(["abcdefghi"] * 26))

        for text in ("192.168.1.20", "10.0.0.1.", "::1", "[2001:db8::1]"):
            with self.assertRaises(IpLiteral):
                parse_fqdn(text)

        with self.assertRaises(EmptyInput):
            parse_fqdn("   ")

        with self.assertRaises(EmptyInput):
            parse_fqdn(None)

    def test_parse_fqdn_round_trip(self):
        """Check that parsing the canonical text of a parsed name gives back the same name."""
        rng = random.Random(1)
        for _ in range(1000):
            labels = [random_label(rng) for _ in range(rng.randint(1, 5))]
            text = ".".join(label.upper() if rng.random() < 0.5 else label for label in labels)
            if rng.random() < 0.2:
                text += "."

            fqdn = parse_fqdn(text)
            self.assertEqual(fqdn.labels, tuple(labels))
            self.assertEqual(parse_fqdn(fqdn.text), fqdn)


class TestRegistrableDomain(unittest.TestCase):
    def test_registrable_domain(self):
        """Check the registrable forms derived from the bundled suffix rules."""
        self.assertEqual(registrable_domain(parse_fqdn("www.amazon.com")).text, "amazon.com")
        self.assertEqual(registrable_domain(parse_fqdn("amazon.com")).text, "amazon.com")

        rd = registrable_domain(parse_fqdn("shop.example.co.uk"))
        self.assertEqual(rd.text, "example.co.uk")
        self.assertEqual(rd.suffix, "co.uk")
        self.assertEqual(rd.label, "example")

        # wildcard and exception rules
        self.assertEqual(registrable_domain(parse_fqdn("a.b.foo.ck")).text, "b.foo.ck")
        self.assertEqual(registrable_domain(parse_fqdn("shop.www.ck")).text, "www.ck")

    def test_registrable_domain_without_rule(self):
        """Check that names under a TLD without a rule fall back to their last two labels."""
        rd = registrable_domain(parse_fqdn("api.tiktok-fixture.example"))
        self.assertEqual(rd.text, "tiktok-fixture.example")
        self.assertEqual(rd.suffix, "example")

        with self.assertRaises(NoLabels):
            registrable_domain(parse_fqdn("localhost"))

        with self.assertRaises(NoLabels):
            registrable_domain(Fqdn(()))

    def test_registrable_domain_public_suffix(self):
        """Check that a public suffix has no registrable form."""
        with self.assertRaises(IsPublicSuffix):
            registrable_domain(parse_fqdn("com"))

        with self.assertRaises(IsPublicSuffix):
            registrable_domain(parse_fqdn("co.uk"))

    def test_registrable_domain_for_url(self):
        """Check the registrable domain of a URL's host."""
        self.assertEqual(registrable_domain_for_url("https://policies.google.com/privacy").text, "google.com")
        self.assertEqual(registrable_domain_for_url("http://WWW.Example.CO.UK:8080/a?b=c").text, "example.co.uk")

    def test_subdomain_invariance(self):
        """Check that prepending labels never changes the registrable domain."""
        rng = random.Random(2)
        for _ in range(1000):
            base = rng.choice(REGISTRABLE_DOMAINS)
            labels = [random_label(rng) for _ in range(rng.randint(1, 4))]
            fqdn = parse_fqdn(".".join(labels + [base]))
            self.assertEqual(registrable_domain(fqdn).text, base)


class TestNormalizeOrg(unittest.TestCase):
    def test_normalize_org(self):
        """Check that casing, punctuation, and trailing legal designators are removed."""
        self.assertEqual(normalize_org("TikTok Inc.").text, "tiktok")
        self.assertEqual(normalize_org("google").text, "google")
        self.assertEqual(normalize_org("Amazon Technologies, Inc.").text, "amazon technologies")
        self.assertEqual(normalize_org("Hispano Publicidad S.L.").text, "hispano publicidad")
        self.assertEqual(normalize_org("Acme Analytics GmbH").text, "acme analytics")
        self.assertEqual(normalize_org("Procter & Gamble Co").text, "procter gamble")
        self.assertEqual(normalize_org("Example Corp").tokens, ("example",))
        self.assertEqual(normalize_org("TikTok Inc.").original, "TikTok Inc.")

        # only trailing designators are stripped
        self.assertEqual(normalize_org("Limited Brands Inc").text, "limited brands")

    def test_normalize_org_empty(self):
        """Check that names consisting only of designators and punctuation are rejected."""
        for name in ["Inc.", "", "  ", "LLC, Ltd.", "!!!"]:
            with self.assertRaises(EmptyAfterNormalization):
                normalize_org(name)

    def test_normalize_org_idempotent(self):
        """Check that normalizing a normalized name is a no-op."""
        rng = random.Random(3)
        words = ["Acme", "Data", "Media", "Group", "Inc.", "LLC", "GmbH", "S.A.", "&", "Co", "of", "Ltd", "Tik-Tok"]
        checked = 0
        while checked < 1000:
            name = " ".join(rng.choice(words) for _ in range(rng.randint(1, 5)))
            try:
                normalized = normalize_org(name)
            except EmptyAfterNormalization:
                continue

            self.assertEqual(normalize_org(normalized.text).text, normalized.text)
            checked += 1

    def test_same_organization(self):
        """Check the organization-name matching rule."""
        self.assertTrue(same_organization("TikTok Inc.", "TikTok Inc"))
        self.assertTrue(same_organization("Amazon", "Amazon Technologies, Inc."))
        self.assertTrue(same_organization("SocialNet Platforms, Inc.", "SocialNet Platforms Inc"))
        self.assertTrue(same_organization(normalize_org("Google LLC"), "google"))
        self.assertFalse(same_organization("Google LLC", "Acme GmbH"))
        self.assertFalse(same_organization("Acme Analytics", "Acme Holdings"))


if __name__ == "__main__":
    unittest.main()
