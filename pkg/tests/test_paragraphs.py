import os
import sys
import tempfile
import unittest

sys.path.insert(0, "..")

from domainholder.exceptions import FormatError, NoQualifyingParagraphs
from domainholder.policy.paragraphs import ControllerLexicon, default_controller_lexicon, select_paragraphs
from domainholder.policy.text import PolicyText
from . import patchers


COOKIE_PARAGRAPH = "We use cookies to remember your preferences."


class TestControllerLexicon(unittest.TestCase):
    def test_score(self):
        """Check keyword weights, phrase matching and word boundaries."""
        lexicon = default_controller_lexicon()
        self.assertEqual(lexicon.score(patchers.TIKTOK_PARAGRAPH), 6.0)
        self.assertEqual(lexicon.score(COOKIE_PARAGRAPH), 1.0)
        self.assertEqual(lexicon.score("The data  controller is Example Corp."), 8.0)

        # "us" and "our" must be whole words
        self.assertEqual(lexicon.score("Trusted tourism businesses."), 0.0)

    def test_from_file(self):
        """Check loading and validating a lexicon file."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "controller.tsv")
            with open(path, "w") as f:
                f.write("# keyword\tweight\nVerantwortlicher\t5\n")
            self.assertEqual(ControllerLexicon.from_file(path).keywords, (("verantwortlicher", 5.0),))

            with open(path, "w") as f:
                f.write("verantwortlicher\tfive\n")
            with self.assertRaises(FormatError):
                ControllerLexicon.from_file(path)

        with self.assertRaises(ValueError):
            ControllerLexicon([])


class TestSelectParagraphs(unittest.TestCase):
    def test_controller_paragraph_first(self):
        """Check that the controller disclosure outranks a cookie paragraph."""
        policy = PolicyText(None, (COOKIE_PARAGRAPH, patchers.TIKTOK_PARAGRAPH, "Cookies expire after one year."))
        selected = select_paragraphs(policy)

        self.assertEqual([paragraph.index for paragraph in selected], [1, 0])
        self.assertEqual(selected[0].text, patchers.TIKTOK_PARAGRAPH)
        self.assertEqual(selected[0].score, 6.0)

    def test_ties(self):
        """Check that equal scores keep document order and the limit is applied."""
        policy = PolicyText(None, tuple("We keep record number {}.".format(i) for i in range(8)))
        selected = select_paragraphs(policy, limit=3)
        self.assertEqual([paragraph.index for paragraph in selected], [0, 1, 2])

        self.assertEqual(len(select_paragraphs(policy)), 5)

    def test_custom_lexicon(self):
        """Check selection with another lexicon."""
        lexicon = ControllerLexicon([("verantwortlicher", 5)])
        policy = PolicyText(None, ("Diese Seite nutzt Cookies.", "Verantwortlicher ist die Beispiel GmbH."))
        self.assertEqual([paragraph.index for paragraph in select_paragraphs(policy, lexicon)], [1])

    def test_no_qualifying_paragraphs(self):
        """Check that a policy without keywords has no qualifying paragraphs."""
        policy = PolicyText(None, ("Cookies expire after one year.", "Contact support for help."))
        with self.assertRaises(NoQualifyingParagraphs):
            select_paragraphs(policy)


if __name__ == "__main__":
    unittest.main()
