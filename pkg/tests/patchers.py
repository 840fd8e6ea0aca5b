"""Define patches and fakes used for domainholder tests."""

import os

try:
    # Python3
    from unittest.mock import patch
except ImportError:
    # Python2
    from mock import patch

import requests

from domainholder.constants import FixtureMode
from domainholder.exceptions import DomainHolderError
from domainholder.fetch_manager.fixture_store import FixtureStore, HttpResponse


FIXTURES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
ARCHIVE_DIR = os.path.join(FIXTURES_DIR, "archive")

#: The bundled fixture domains, in ``fixtures/domains.txt`` order
FIXTURE_DOMAINS = [
    "api.tiktok-fixture.example",
    "unseenreport.com",
    "cdn.acme-analytics.example",
    "track.examplecorp.example",
    "logs.backendonly.example",
    "sdk.nolinks.example",
    "ads.hispano.example",
    "m.mediaportal.example",
    "graph.socialnet.example",
    "events.quietapp.example",
]

TIKTOK_PARAGRAPH = (
    "Welcome to TikTok (the “Platform”). The Platform is provided and controlled by TikTok Inc. (“TikTok”, “we” or "
    "“us”). We are committed to protecting and respecting your privacy. This Privacy Policy covers the experience we "
    "provide for users age 13 and over on our Platform."
)


def html_page(*paragraphs, title="Page", links=()):
    """Build a small HTML page from paragraphs and ``(href, text)`` links."""
    anchors = "".join('<a href="{}">{}</a> '.format(href, text) for href, text in links)
    body = "".join("<p>{}</p>".format(paragraph) for paragraph in paragraphs)
    return "<html><head><title>{}</title></head><body><main>{}</main><div>{}</div></body></html>".format(
        title, body, anchors
    )


def http_response(body=b"", status_code=200, headers=None):
    """Build an :py:class:`HttpResponse` with an HTML content type unless other headers are given."""
    if isinstance(body, str):
        body = body.encode("utf-8")
    if headers is None:
        headers = (("Content-Type", "text/html; charset=utf-8"),)
    return HttpResponse(status_code, tuple(headers), body)


def redirect_response(location, status_code=301):
    """Build a redirect :py:class:`HttpResponse`."""
    return HttpResponse(status_code, (("Location", location),), b"")


def build_archive(archive_dir, transactions):
    """Write an archive holding ``(descriptor, payload)`` pairs and open it for replay.

    A payload that is an exception is archived as a failed transaction.

    Returns
    -------
    FixtureStore
        A replay store over the new archive

    """
    recorder = FixtureStore(FixtureMode.RECORD, archive_dir)
    for descriptor, payload in transactions:
        if isinstance(payload, DomainHolderError):
            recorder.record_transaction(descriptor, error=payload)
        else:
            recorder.record_transaction(descriptor, payload)

    return FixtureStore(FixtureMode.REPLAY, archive_dir)


class ResponseFake(object):
    """A fake of the `requests.Response` class."""

    def __init__(self, status_code=200, content=b"", headers=None, json_data=None):
        """Initialize a `ResponseFake` instance."""
        self.status_code = status_code
        self.content = content.encode("utf-8") if isinstance(content, str) else content
        self.headers = dict(headers or {})
        self._json = json_data

    def json(self):
        """Return the JSON payload."""
        if self._json is None:
            raise ValueError("No JSON payload")
        return self._json

    def raise_for_status(self):
        """Raise an `HTTPError` for error status codes."""
        if self.status_code >= 400:
            raise requests.exceptions.HTTPError("{} Error".format(self.status_code))


class SessionFake(object):
    """A fake of the `requests.Session` class that answers from a ``url -> ResponseFake`` map.

    A value that is an exception is raised instead of returned; unknown URLs raise `ConnectionError`.

    """

    def __init__(self, responses=None):
        """Initialize a `SessionFake` instance."""
        self.responses = dict(responses or {})
        self.requests = []

    def get(self, url, **kwargs):
        """Mock the `requests.Session.get` method."""
        self.requests.append((url, kwargs))
        response = self.responses.get(url)
        if response is None:
            raise requests.exceptions.ConnectionError("No route to {}".format(url))
        if isinstance(response, Exception):
            raise response
        return response


class SocketFake(object):
    """A fake of a connected `socket.socket` that returns a canned response."""

    def __init__(self, response=b""):
        """Initialize a `SocketFake` instance."""
        self._chunks = [response[i : i + 4096] for i in range(0, len(response), 4096)]
        self.sent = []

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()

    def close(self):
        """Close the socket connection."""

    def sendall(self, data):
        """Record the sent data."""
        self.sent.append(data)

    def recv(self, size):
        """Return the next chunk of the response, or ``b""`` at EOF."""
        return self._chunks.pop(0) if self._chunks else b""


def patch_whois_connection(responses):
    """Mock `socket.create_connection` in the WHOIS client with a ``server -> response text`` map.

    Servers that are not in the map raise `ConnectionRefusedError`; a value that is an exception is raised.

    """
    sockets = []

    def create_connection(address, timeout=None):
        """Mock the `socket.create_connection` function."""
        server, _ = address
        response = responses.get(server)
        if response is None:
            raise ConnectionRefusedError("Connection refused by {}".format(server))
        if isinstance(response, Exception):
            raise response
        sock = SocketFake(response.encode("utf-8"))
        sockets.append((server, sock))
        return sock

    return patch("domainholder.whois.whois_client.socket.create_connection", side_effect=create_connection), sockets


def patch_calls(obj, wraps):
    """Patch a method call without changing its behavior.

    Parameters
    ----------
    obj
        The object whose method will be patched (i.e., `self`)
    wraps
        The method that is being patched (i.e., `self.method`)

    Returns
    -------
    The patched method

    """
    return patch.object(type(obj), wraps.__name__.split()[-1], wraps=wraps)
