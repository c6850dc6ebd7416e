"""Locate question items in parsed pages, clean their subtrees and map
microdata properties into corpus records.

Cleaning walks a question subtree bottom-up: nodes carrying microdata
attributes keep only attributes named with a kept prefix; plain nodes on the
textual-tag allowlist are kept (same attribute rule); everything else is
replaced by its children.  Script-like containers are dropped outright so
non-rendered text never leaks into the corpus.
"""
from __future__ import annotations

import re
import uuid as uuid_module
from collections import Counter
from dataclasses import dataclass, field

from .dom import DomNode, _escape_text, inner_html, parse_html, text_content
from .records import AnswerRecord, QuestionRecord, WebpageRecord
from .warc import contains_question_marker

__all__ = [
    "DEFAULT_TEXTUAL_TAGS",
    "DEFAULT_KEPT_PREFIXES",
    "DROPPED_CONTAINER_TAGS",
    "CleanPolicy",
    "load_allowlist",
    "find_question_roots",
    "clean_question_subtree",
    "extract_question",
    "extract_webpage",
]

# Textual-content elements kept (bare) inside cleaned question subtrees.
DEFAULT_TEXTUAL_TAGS = frozenset({
    "p", "a", "br", "li", "span", "strong", "code", "em", "div", "ul",
    "pre", "b", "blockquote", "h1", "h2", "h3", "h4", "h5", "h6",
    "td", "tr", "ol", "i", "sup", "sub", "u", "table", "tbody",
})

DEFAULT_KEPT_PREFIXES = ("item", "content", "date")

# Unwrapping these would leak non-rendered text, so they are removed whole.
DROPPED_CONTAINER_TAGS = frozenset({"script", "style", "template", "noscript"})

_QUESTION_TYPE_RE = re.compile(r"https?://schema\.org/Question/?\Z")


@dataclass(frozen=True)
class CleanPolicy:
    kept_attribute_prefixes: tuple[str, ...] = DEFAULT_KEPT_PREFIXES
    textual_tags: frozenset[str] = DEFAULT_TEXTUAL_TAGS
    dropped_tags: frozenset[str] = DROPPED_CONTAINER_TAGS


DEFAULT_POLICY = CleanPolicy()


def load_allowlist(path):
    """Read a textual-tag allowlist: one tag per line, # comments allowed."""
    tags = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line and not line.startswith("#"):
                tags.add(line.lower())
    return frozenset(tags)


def _is_question_type(value):
    return any(_QUESTION_TYPE_RE.match(token) for token in value.split())


def find_question_roots(root):
    """Question-item nodes in document order; matched subtrees not entered,
    so a question nested inside another question is not reported twice."""
    found = []
    stack = list(reversed(root.element_children()))
    while stack:
        node = stack.pop()
        itemtype = node.get("itemtype")
        if itemtype and _is_question_type(itemtype):
            found.append(node)
            continue
        stack.extend(reversed(node.element_children()))
    return found


def _kept_attrs(node, prefixes):
    return [(name, value) for name, value in node.attrs if name.startswith(prefixes)]


def _clean_element(node, policy):
    """Return the replacement node list for one element, children first."""
    if node.tag in policy.dropped_tags and not _has_item_attrs(node):
        return []
    cleaned_children = []
    for child in node.children:
        if isinstance(child, str):
            cleaned_children.append(child)
        else:
            cleaned_children.extend(_clean_element(child, policy))
    if _has_item_attrs(node) or node.tag in policy.textual_tags:
        return [DomNode(node.tag, _kept_attrs(node, policy.kept_attribute_prefixes), cleaned_children)]
    return cleaned_children


def _has_item_attrs(node):
    for name, _ in node.attrs:
        if name == "itemtype" or name == "itemprop":
            return True
    return False


def clean_question_subtree(node, policy=DEFAULT_POLICY):
    """Bottom-up clean of a question subtree; returns a new tree.

    The input node is kept as the root even when it lacks microdata
    attributes, so the question anchor itself is never unwrapped.
    """
    cleaned_children = []
    for child in node.children:
        if isinstance(child, str):
            cleaned_children.append(child)
        else:
            cleaned_children.extend(_clean_element(child, policy))
    return DomNode(node.tag, _kept_attrs(node, policy.kept_attribute_prefixes), cleaned_children)


def _starts_item_scope(node):
    for name, _ in node.attrs:
        if name == "itemscope" or name == "itemtype":
            return True
    return False


def _iter_properties(scope_root):
    """(property name, node) pairs belonging to one microdata item.

    Properties of nested item scopes are not reported; nodes carrying
    multiple space-separated property names are reported once per name.
    """
    stack = list(reversed(scope_root.element_children()))
    while stack:
        node = stack.pop()
        itemprop = node.get("itemprop")
        if itemprop:
            for name in itemprop.split():
                yield name, node
        if not _starts_item_scope(node):
            stack.extend(reversed(node.element_children()))


def _plain_value(node):
    """Microdata value as collapsed plain text (content/datetime aware)."""
    if node.tag == "meta":
        value = node.get("content") or ""
    elif node.tag == "time":
        value = node.get("datetime") or text_content(node)
    else:
        value = text_content(node)
    return " ".join(value.split())


def _markup_value(node):
    if node.tag == "meta":
        return _escape_text(node.get("content") or "").strip()
    return inner_html(node).strip()


def _parse_count(raw):
    raw = raw.strip()
    return int(raw) if raw.isdigit() else None


@dataclass
class _PropertyBag:
    values: dict = field(default_factory=dict)

    def put(self, name, value, counters):
        if value is None:
            return
        if name in self.values:
            counters["duplicate_itemprop"] += 1
            return
        self.values[name] = value

    def get(self, name):
        return self.values.get(name)


def _collect_scalar(bag, prop, node, counters, markup_props, count_props):
    if prop in markup_props:
        value = _markup_value(node)
        bag.put(prop, value or None, counters)
    elif prop in count_props:
        raw = _plain_value(node)
        value = _parse_count(raw)
        if value is None and raw:
            counters["bad_numeric_value"] += 1
            return
        bag.put(prop, value, counters)
    else:
        value = _plain_value(node)
        bag.put(prop, value or None, counters)


_ANSWER_MARKUP_PROPS = frozenset({"text"})
_ANSWER_COUNT_PROPS = frozenset({"upvoteCount", "downvoteCount", "commentCount"})
_QUESTION_MARKUP_PROPS = frozenset({"name", "text"})
_QUESTION_COUNT_PROPS = frozenset({"upvoteCount", "downvoteCount", "answerCount"})


def _extract_answer(node, status, counters):
    bag = _PropertyBag()
    for prop, prop_node in _iter_properties(node):
        if prop in ("text", "author", "dateCreated") or prop in _ANSWER_COUNT_PROPS:
            _collect_scalar(bag, prop, prop_node, counters, _ANSWER_MARKUP_PROPS, _ANSWER_COUNT_PROPS)
    text = bag.get("text")
    if not text:
        counters["answers_dropped_empty"] += 1
        return None
    return AnswerRecord(
        text_markup=text,
        status=status,
        author=bag.get("author"),
        date_created=bag.get("dateCreated"),
        upvote_count=bag.get("upvoteCount"),
        downvote_count=bag.get("downvoteCount"),
        comment_count=bag.get("commentCount"),
    )


def extract_question(node, counters=None):
    """Map a cleaned question root to a QuestionRecord.

    Child items reached through acceptedAnswer/suggestedAnswer become
    answers with that property name as their status.  Returns None (with a
    counter) when the question has neither name nor text.
    """
    if counters is None:
        counters = Counter()
    bag = _PropertyBag()
    answers = []
    for prop, prop_node in _iter_properties(node):
        if prop in ("acceptedAnswer", "suggestedAnswer"):
            answer = _extract_answer(prop_node, prop, counters)
            if answer is not None:
                answers.append(answer)
        elif prop in ("name", "text", "author", "dateCreated") or prop in _QUESTION_COUNT_PROPS:
            _collect_scalar(bag, prop, prop_node, counters, _QUESTION_MARKUP_PROPS, _QUESTION_COUNT_PROPS)
    name = bag.get("name")
    text = bag.get("text")
    if not name and not text:
        counters["questions_rejected_empty"] += 1
        return None
    return QuestionRecord(
        name_markup=name,
        text_markup=text,
        author=bag.get("author"),
        date_created=bag.get("dateCreated"),
        upvote_count=bag.get("upvoteCount"),
        downvote_count=bag.get("downvoteCount"),
        answer_count=bag.get("answerCount"),
        answers=answers,
    )


def _page_language(root):
    for node in root.iter_elements():
        if node.tag == "html":
            lang = node.get("lang")
            return lang if lang else "-"
    return "-"


def extract_webpage(payload, meta, policy=DEFAULT_POLICY, counters=None, uuid_factory=None):
    """Full page pipeline: marker pre-filter, parse, find, clean, extract.

    Returns None when the page has no marker or no valid question survives.
    ``uuid_factory`` lets callers install deterministic UUIDs for testing;
    the default is a fresh random UUID4 per page.
    """
    if counters is None:
        counters = Counter()
    if isinstance(payload, bytes):
        if not contains_question_marker(payload):
            counters["no_marker"] += 1
            return None
    elif "schema.org/Question" not in payload:
        counters["no_marker"] += 1
        return None
    root = parse_html(payload, meta.content_type)
    questions = []
    for question_root in find_question_roots(root):
        cleaned = clean_question_subtree(question_root, policy)
        question = extract_question(cleaned, counters)
        if question is not None:
            questions.append(question)
    if not questions:
        return None
    page_uuid = uuid_factory() if uuid_factory is not None else str(uuid_module.uuid4())
    return WebpageRecord(
        uri=meta.target_uri,
        uuid=page_uuid,
        warc_id=meta.warc_id,
        language_attr=_page_language(root),
        questions=questions,
    )
