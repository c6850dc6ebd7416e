"""Lightweight HTML document tree: parsing, traversal and re-serialization.

The parser is a single-pass regex tokenizer feeding a tree builder that
applies the pragmatic subset of HTML5 error recovery needed for crawl data:
implied end tags (``p``, ``li``, ``dt``/``dd``, table rows/cells, ``option``),
void elements, raw-text elements (``script``/``style``) and silent recovery
from stray or mismatched end tags.  It never raises on malformed input.
"""
from __future__ import annotations

import codecs
import html
import re

__all__ = [
    "DomNode",
    "parse_html",
    "parse_fragment",
    "sniff_encoding",
    "inner_html",
    "serialize_node",
    "text_content",
    "iter_markup_events",
    "VOID_ELEMENTS",
    "RAW_TEXT_ELEMENTS",
    "NON_RENDERED_TAGS",
]

VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

# Content of these elements is consumed verbatim up to the matching end tag.
RAW_TEXT_ELEMENTS = frozenset({"script", "style"})
# Like raw text, but character references are decoded (RCDATA).
_RCDATA_ELEMENTS = frozenset({"textarea", "title"})

# Elements whose text is not rendered page text; text_content() skips them.
NON_RENDERED_TAGS = frozenset({"script", "style", "template", "noscript"})

# Opening any of these closes an open <p> (HTML5 "in body" insertion mode).
_P_CLOSERS = frozenset({
    "address", "article", "aside", "blockquote", "details", "dialog",
    "dir", "div", "dl", "fieldset", "figcaption", "figure", "footer",
    "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup",
    "hr", "main", "menu", "nav", "ol", "p", "pre", "section", "table", "ul",
})

# Walking up the open-element stack stops at these when closing implied tags.
_SCOPE_STOP = frozenset({
    "#document", "html", "body", "table", "td", "th", "caption",
    "template", "applet", "object", "marquee",
})

_OPEN_TAG_RE = re.compile(
    r"<([a-zA-Z][^\t\n\r\f />\x00]*)"
    r"((?:\"[^\"]*\"|'[^']*'|[^>\"'])*)>"
)
_END_TAG_RE = re.compile(r"</([a-zA-Z][^\t\n\r\f />\x00]*)[^>]*>")
_ATTR_RE = re.compile(
    r"([^\s=/>]+)"
    r"(?:\s*=\s*(?:\"([^\"]*)\"|'([^']*)'|([^\s>]*)))?"
)

_CHARSET_META_RE = re.compile(
    rb"<meta[^>]{0,512}?charset\s*=\s*[\"']?\s*([a-zA-Z0-9_.:-]+)", re.IGNORECASE
)
_CHARSET_CT_RE = re.compile(r"charset\s*=\s*[\"']?\s*([a-zA-Z0-9_.:-]+)", re.IGNORECASE)


class DomNode:
    """One element (or the document root, tag ``#document``).

    ``attrs`` is an ordered list of (lower-case name, value) pairs; bare
    attributes carry the value "".  ``children`` holds DomNode and plain-str
    text nodes in document order.
    """

    __slots__ = ("tag", "attrs", "children")

    def __init__(self, tag, attrs=None, children=None):
        self.tag = tag
        self.attrs = attrs if attrs is not None else []
        self.children = children if children is not None else []

    def get(self, name, default=None):
        for key, value in self.attrs:
            if key == name:
                return value
        return default

    def has(self, name):
        return any(key == name for key, _ in self.attrs)

    def element_children(self):
        return [c for c in self.children if isinstance(c, DomNode)]

    def iter_elements(self):
        """Pre-order traversal of all element descendants, self excluded."""
        stack = list(reversed(self.element_children()))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.element_children()))

    def __eq__(self, other):
        if not isinstance(other, DomNode):
            return NotImplemented
        return (
            self.tag == other.tag
            and self.attrs == other.attrs
            and self.children == other.children
        )

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"DomNode({self.tag!r}, attrs={self.attrs!r}, {len(self.children)} children)"


class TreeBuilder:
    """Assembles DomNode trees from start/end/data events."""

    __slots__ = ("root", "_stack")

    def __init__(self):
        self.root = DomNode("#document")
        self._stack = [self.root]

    def start(self, tag, attrs, self_closing=False):
        self._imply_end_tags(tag)
        node = DomNode(tag, attrs)
        self._stack[-1].children.append(node)
        if tag not in VOID_ELEMENTS:
            # HTML5 ignores the trailing "/" on non-void elements.
            self._stack.append(node)

    def end(self, tag):
        if tag in VOID_ELEMENTS:
            return
        stack = self._stack
        for i in range(len(stack) - 1, 0, -1):
            if stack[i].tag == tag:
                del stack[i:]
                return
        # Stray end tag: ignored.

    def data(self, text):
        if not text:
            return
        children = self._stack[-1].children
        if children and isinstance(children[-1], str):
            children[-1] += text
        else:
            children.append(text)

    def finish(self):
        del self._stack[1:]
        return self.root

    def _imply_end_tags(self, tag):
        if tag in _P_CLOSERS:
            self._close_nearest(("p",), _SCOPE_STOP)
        if tag == "li":
            self._close_nearest(("li",), _SCOPE_STOP | {"ul", "ol"})
        elif tag in ("dt", "dd"):
            self._close_nearest(("dt", "dd"), _SCOPE_STOP | {"dl"})
        elif tag == "tr":
            self._close_nearest(("tr",), frozenset({"#document", "html", "table", "thead", "tbody", "tfoot"}))
        elif tag in ("td", "th"):
            self._close_nearest(("td", "th"), frozenset({"#document", "html", "tr", "table"}))
        elif tag in ("option", "optgroup"):
            self._close_nearest(("option",), _SCOPE_STOP | {"select", "optgroup"} - {tag})

    def _close_nearest(self, targets, stops):
        stack = self._stack
        for i in range(len(stack) - 1, 0, -1):
            current = stack[i].tag
            if current in targets:
                del stack[i:]
                return
            if current in stops:
                return


def _parse_attrs(raw):
    attrs = []
    seen = set()
    for match in _ATTR_RE.finditer(raw):
        name = match.group(1)
        if name == "/" or name.startswith("/"):
            name = name.lstrip("/")
            if not name:
                continue
        name = name.lower()
        if name in seen:
            continue  # HTML5 keeps the first occurrence
        seen.add(name)
        value = match.group(2)
        if value is None:
            value = match.group(3)
        if value is None:
            value = match.group(4)
        if value is None:
            value = ""
        elif "&" in value:
            value = html.unescape(value)
        attrs.append((name, value))
    return attrs


def _decode(text):
    return html.unescape(text) if "&" in text else text


def tokenize(source, builder):
    """Drive *builder* with events from HTML text. Tolerates anything."""
    s = source
    lower = None
    pos = 0
    n = len(s)
    find = s.find
    while pos < n:
        lt = find("<", pos)
        if lt < 0:
            builder.data(_decode(s[pos:]))
            break
        if lt > pos:
            builder.data(_decode(s[pos:lt]))
        nxt = s[lt + 1] if lt + 1 < n else ""
        if "a" <= nxt <= "z" or "A" <= nxt <= "Z":
            match = _OPEN_TAG_RE.match(s, lt)
            if match is None:
                builder.data("<")
                pos = lt + 1
                continue
            tag = match.group(1).lower()
            raw_attrs = match.group(2)
            pos = match.end()
            self_closing = raw_attrs.endswith("/")
            if self_closing:
                raw_attrs = raw_attrs[:-1]
            attrs = _parse_attrs(raw_attrs) if raw_attrs and not raw_attrs.isspace() else []
            builder.start(tag, attrs, self_closing)
            if tag in RAW_TEXT_ELEMENTS or tag in _RCDATA_ELEMENTS:
                if lower is None:
                    lower = s.lower()
                pos = _consume_raw_text(s, lower, pos, tag, builder)
        elif nxt == "/":
            match = _END_TAG_RE.match(s, lt)
            if match is not None:
                builder.end(match.group(1).lower())
                pos = match.end()
            else:
                builder.data("<")
                pos = lt + 1
        elif nxt == "!":
            if s.startswith("<!--", lt):
                close = find("-->", lt + 4)
                pos = close + 3 if close >= 0 else n
            else:
                close = find(">", lt + 2)
                pos = close + 1 if close >= 0 else n
        elif nxt == "?":
            close = find(">", lt + 2)
            pos = close + 1 if close >= 0 else n
        else:
            builder.data("<")
            pos = lt + 1
    return builder


def _consume_raw_text(s, lower, pos, tag, builder):
    """Consume rawtext/RCDATA content up to the matching end tag."""
    needle = "</" + tag
    search_from = pos
    n = len(s)
    while True:
        close = lower.find(needle, search_from)
        if close < 0:
            content = s[pos:]
            builder.data(content if tag in RAW_TEXT_ELEMENTS else _decode(content))
            builder.end(tag)
            return n
        after = close + len(needle)
        if after >= n or s[after] in ">/ \t\n\r\f":
            content = s[pos:close]
            builder.data(content if tag in RAW_TEXT_ELEMENTS else _decode(content))
            match = _END_TAG_RE.match(s, close)
            builder.end(tag)
            return match.end() if match is not None else after
        search_from = after


def sniff_encoding(payload, content_type=None):
    """Pick a decoder: BOM, then Content-Type charset, then <meta> prescan.

    Falls back to UTF-8; unknown labels are ignored rather than fatal.
    """
    if payload.startswith(codecs.BOM_UTF8):
        return "utf-8-sig"
    if payload.startswith(codecs.BOM_UTF16_LE) or payload.startswith(codecs.BOM_UTF16_BE):
        return "utf-16"
    if content_type:
        match = _CHARSET_CT_RE.search(content_type)
        if match and _known_codec(match.group(1)):
            return match.group(1)
    match = _CHARSET_META_RE.search(payload[:2048])
    if match:
        label = match.group(1).decode("ascii", "replace")
        if _known_codec(label):
            return label
    return "utf-8"


def _known_codec(label):
    try:
        codecs.lookup(label)
        return True
    except LookupError:
        return False


def parse_html(payload, content_type=None):
    """Parse an HTML document (bytes or text) into a ``#document`` root.

    Bytes are decoded with :func:`sniff_encoding` and lossy replacement, so
    arbitrarily malformed input still yields a tree (worst case: a root
    holding a single text child).  Comments, doctypes and processing
    instructions are dropped.
    """
    if isinstance(payload, bytes):
        encoding = sniff_encoding(payload, content_type)
        payload = payload.decode(encoding, errors="replace")
        if payload.startswith("﻿"):
            payload = payload[1:]
    return tokenize(payload, TreeBuilder()).finish()


def parse_fragment(markup):
    """Parse a markup fragment; alias of parse_html for text input."""
    return tokenize(markup, TreeBuilder()).finish()


def _escape_text(text):
    if "&" in text:
        text = text.replace("&", "&amp;")
    if "<" in text:
        text = text.replace("<", "&lt;")
    if ">" in text:
        text = text.replace(">", "&gt;")
    if "\xa0" in text:
        text = text.replace("\xa0", "&#160;")
    return text


def _escape_attr(value):
    value = _escape_text(value)
    if '"' in value:
        value = value.replace('"', "&quot;")
    return value


def serialize_node(node, parts=None):
    """Serialize an element including its own tag; minimal escaping."""
    out = [] if parts is None else parts
    if node.attrs:
        bits = [node.tag]
        for name, value in node.attrs:
            bits.append(name if value == "" else f'{name}="{_escape_attr(value)}"')
        out.append("<" + " ".join(bits) + ">")
    else:
        out.append("<" + node.tag + ">")
    if node.tag not in VOID_ELEMENTS:
        for child in node.children:
            if isinstance(child, str):
                out.append(_escape_text(child))
            else:
                serialize_node(child, out)
        out.append("</" + node.tag + ">")
    if parts is None:
        return "".join(out)
    return None


def inner_html(node):
    """Serialized children of *node* (the node's own tag excluded)."""
    parts = []
    for child in node.children:
        if isinstance(child, str):
            parts.append(_escape_text(child))
        else:
            serialize_node(child, parts)
    return "".join(parts)


def text_content(node, skip=NON_RENDERED_TAGS):
    """Concatenated rendered text of the subtree (script/style excluded)."""
    parts = []
    stack = list(reversed(node.children))
    while stack:
        child = stack.pop()
        if isinstance(child, str):
            parts.append(child)
        elif child.tag not in skip:
            stack.extend(reversed(child.children))
    return "".join(parts)


class _EventCollector:
    """TreeBuilder stand-in that records a flat event list."""

    __slots__ = ("events", "_raw_depth")

    def __init__(self):
        self.events = []
        self._raw_depth = 0

    def start(self, tag, attrs, self_closing=False):
        self.events.append(("start", tag, attrs))
        if tag in NON_RENDERED_TAGS:
            self._raw_depth += 1

    def end(self, tag):
        self.events.append(("end", tag, None))
        if tag in NON_RENDERED_TAGS and self._raw_depth:
            self._raw_depth -= 1

    def data(self, text):
        if not self._raw_depth:
            self.events.append(("text", text, None))


def iter_markup_events(markup):
    """Flat (kind, tag_or_text, attrs) events of a markup string.

    Non-rendered element content (script/style/...) is omitted from text
    events.  Used by plain-text extraction; no tree is built.
    """
    collector = _EventCollector()
    tokenize(markup, collector)
    return collector.events
