"""Company hierarchies and third-party disclosure classification.

Organizations are compared at the level of their head company: a policy naming "Facebook" discloses flows to an
organization that rolls up to the same head as "Facebook".

"""


from dataclasses import dataclass
import logging

from ..constants import DisclosureStatus
from ..exceptions import AmbiguousParent, CycleDetected, EmptyAfterNormalization, FormatError
from ..names.org import normalize_org, same_organization

_LOGGER = logging.getLogger(__name__)


def _key(name, designators=None):
    try:
        return normalize_org(name, designators).text
    except EmptyAfterNormalization:
        return " ".join(name.casefold().split())


def _matches(first, second, designators=None):
    try:
        return same_organization(first, second, designators)
    except EmptyAfterNormalization:
        return first == second


@dataclass(frozen=True)
class OrgRelation(object):
    """A subsidiary and its parent company."""

    child: str
    parent: str

    def __post_init__(self):
        if not self.child.strip() or not self.parent.strip():
            raise ValueError("A relation needs a child and a parent")
        if _key(self.child) == _key(self.parent):
            raise ValueError("'{}' can't be its own parent".format(self.child))


def load_relations(path):
    """Read a ``child<TAB>parent`` relations file.

    Raises
    ------
    FormatError
        A line is malformed

    """
    relations = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise FormatError("expected 'child<TAB>parent'", path, line_number)
            try:
                relations.append(OrgRelation(fields[0].strip(), fields[1].strip()))
            except ValueError as exc:
                raise FormatError(str(exc), path, line_number) from exc
    return relations


class OrgHierarchy(object):
    """Parent links between organizations, matched by normalized name.

    Parameters
    ----------
    relations : Iterable[OrgRelation]
        The relations
    designators : frozenset, None
        The legal designators to strip when matching names; defaults to the bundled gazetteer

    Raises
    ------
    AmbiguousParent
        A company has two different parents

    """

    def __init__(self, relations=(), designators=None):
        self.designators = designators
        self._parents = {}
        for relation in relations:
            child = self.key(relation.child)
            existing = self._parents.get(child)
            if existing is not None and self.key(existing) != self.key(relation.parent):
                raise AmbiguousParent(
                    "'{}' has two parents: '{}' and '{}'".format(relation.child, existing, relation.parent)
                )
            self._parents[child] = relation.parent

    def key(self, org):
        """The normalized form ``org`` is matched by."""
        return _key(org, self.designators)

    def parent(self, org):
        """The parent of ``org``, or ``None`` if it has none."""
        return self._parents.get(self.key(org))

    def head(self, org):
        """Follow parent links from ``org`` to the company with no parent.

        Raises
        ------
        CycleDetected
            The parent links loop

        """
        seen = {self.key(org)}
        current = org
        while True:
            parent = self.parent(current)
            if parent is None:
                return current
            if self.key(parent) in seen:
                raise CycleDetected("The parent links of '{}' loop back to '{}'".format(org, parent))
            seen.add(self.key(parent))
            current = parent


def _hierarchy(relations, designators=None):
    return relations if isinstance(relations, OrgHierarchy) else OrgHierarchy(relations, designators)


def rollup_head(org, relations):
    """Find the head company of ``org``.

    Parameters
    ----------
    org : str
        The organization
    relations : Iterable[OrgRelation], OrgHierarchy
        The parent relations

    Returns
    -------
    str
        The head company, or ``org`` itself if it has no parent

    Raises
    ------
    CycleDetected
        The parent links loop
    AmbiguousParent
        A company has two different parents

    """
    return _hierarchy(relations).head(org)


def classify_disclosure(received, disclosed, relations=(), designators=None):
    """Classify how completely a policy discloses the organizations receiving an app's data.

    Both sides are rolled up to head companies first.

    Parameters
    ----------
    received : Iterable[str]
        The organizations receiving the app's data
    disclosed : Iterable[str]
        The organizations named in the app's policy
    relations : Iterable[OrgRelation], OrgHierarchy
        The parent relations
    designators : frozenset, None
        The legal designators to strip when matching names; ignored if ``relations`` is an ``OrgHierarchy``

    Returns
    -------
    DisclosureStatus
        ``FULL`` if every recipient is disclosed (including when there are none), ``NONE`` if no recipient is, and
        ``PARTIAL`` otherwise

    """
    hierarchy = _hierarchy(relations, designators)
    received_heads = {hierarchy.key(hierarchy.head(org)) for org in received}
    if not received_heads:
        return DisclosureStatus.FULL

    disclosed_heads = {hierarchy.key(hierarchy.head(org)) for org in disclosed}
    covered = [
        head
        for head in received_heads
        if any(_matches(head, other, hierarchy.designators) for other in disclosed_heads)
    ]

    if len(covered) == len(received_heads):
        return DisclosureStatus.FULL
    if not covered:
        return DisclosureStatus.NONE
    return DisclosureStatus.PARTIAL


def merge_spellings(names, designators=None):
    """Map each organization name to the first name in ``names`` with the same normalized form.

    ``"Google Inc."`` and ``"Google LLC"`` both map to whichever of the two comes first.

    Parameters
    ----------
    names : Iterable[str]
        The organization names, in order of preference
    designators : frozenset, None
        The legal designators to strip; defaults to the bundled gazetteer

    Returns
    -------
    dict
        ``name -> display name``

    """
    display = {}
    merged = {}
    for name in names:
        merged[name] = display.setdefault(_key(name, designators), name)
    return merged
