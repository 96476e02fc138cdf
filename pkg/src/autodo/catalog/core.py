"""Hierarchical gym-template catalog over two taxonomies.

Templates attach to any number of nodes across the optimization-type and
industry trees (cross-industry templates simply list several category ids).
Subtree template counts are computed per query, never cached.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from ..gymspec import GymSpec, parse_document, to_document, validate
from . import seeds

DO_TYPE = "do_type"
INDUSTRY = "industry"


class NotFound(Exception):
    pass


class UnknownCategory(Exception):
    pass


class ValidationFailed(Exception):
    def __init__(self, findings):
        self.findings = findings
        super().__init__(f"spec has {len(findings)} finding(s)")


@dataclass(frozen=True)
class CategoryNode:
    id: str
    title: str
    parent_id: str | None
    taxonomy: str
    code: str | None = None  # industry nodes carry their NAICS-style code

    def to_document(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "parent_id": self.parent_id,
            "taxonomy": self.taxonomy,
            "code": self.code,
        }


@dataclass(frozen=True)
class TemplateEntry:
    id: str
    name: str
    description: str
    document: dict  # serialized gym document; parsed fresh on load
    category_ids: frozenset[str]
    author: str
    created_at: float

    def to_document(self, include_spec: bool = True) -> dict:
        out = {
            "id": self.id,
            "name": self.name,
            "description": self.description,
            "category_ids": sorted(self.category_ids),
            "author": self.author,
            "created_at": self.created_at,
        }
        if include_spec:
            out["spec"] = self.document
        return out


@dataclass(frozen=True)
class BrowseResult:
    parent: CategoryNode | None  # pinned node, None at a taxonomy root listing
    children: tuple[tuple[CategoryNode, int], ...]  # (node, subtree template count)
    templates: tuple[TemplateEntry, ...]  # attached directly to the pinned node

    def to_document(self) -> dict:
        return {
            "parent": self.parent.to_document() if self.parent else None,
            "children": [
                {**node.to_document(), "template_count": count}
                for node, count in self.children
            ],
            "templates": [t.to_document(include_spec=False) for t in self.templates],
        }


class Catalog:
    def __init__(self, with_seed_templates: bool = True):
        self._lock = threading.Lock()
        self._nodes: dict[str, CategoryNode] = {}
        self._children: dict[str | None, list[str]] = {}
        self._templates: dict[str, TemplateEntry] = {}
        self._load_taxonomies()
        if with_seed_templates:
            self._load_seed_templates()

    # --- taxonomy loading ------------------------------------------------

    def _load_taxonomies(self) -> None:
        for row in seeds.taxonomy_rows("do_type"):
            self._add_node(
                CategoryNode(
                    id=f"do:{row['code']}",
                    title=row["title"],
                    parent_id=None,
                    taxonomy=DO_TYPE,
                )
            )
        for row in seeds.taxonomy_rows("industry"):
            parent = row.get("parent_code")
            self._add_node(
                CategoryNode(
                    id=f"naics:{row['code']}",
                    title=row["title"],
                    parent_id=f"naics:{parent}" if parent else None,
                    taxonomy=INDUSTRY,
                    code=row["code"],
                )
            )
        self._check_integrity()

    def _add_node(self, node: CategoryNode) -> None:
        self._nodes[node.id] = node
        self._children.setdefault(node.parent_id, []).append(node.id)

    def _check_integrity(self) -> None:
        roots = [n for n in self._nodes.values() if n.taxonomy == INDUSTRY and not n.parent_id]
        if len(roots) != 20:
            raise ValueError(f"industry taxonomy must have exactly 20 sectors, found {len(roots)}")
        do_roots = [n for n in self._nodes.values() if n.taxonomy == DO_TYPE]
        if len(do_roots) != 4:
            raise ValueError("do_type taxonomy must have exactly 4 categories")
        for node in self._nodes.values():
            if node.taxonomy != INDUSTRY:
                continue
            if not (2 <= len(node.code) <= 6):
                raise ValueError(f"industry code {node.code!r} outside NAICS length 2..6")
            for end in range(2, len(node.code)):
                prefix = node.code[:end]
                if f"naics:{prefix}" not in self._nodes:
                    raise ValueError(f"code {node.code}: missing prefix node {prefix}")

    def _load_seed_templates(self) -> None:
        for row in seeds.template_rows():
            self.publish_template(
                parse_document(row["spec"]),
                name=row["name"],
                description=row["description"],
                category_ids=[_seed_category_id(c) for c in row["categories"]],
                author=row.get("author", "seed"),
                template_id=row["id"],
            )

    # --- operations -------------------------------------------------------

    def node(self, node_id: str) -> CategoryNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise NotFound(f"no category node {node_id!r}") from None

    def roots(self, taxonomy: str) -> list[CategoryNode]:
        return [
            self._nodes[i]
            for i in self._children.get(None, [])
            if self._nodes[i].taxonomy == taxonomy
        ]

    def browse(self, node_id: str | None = None, taxonomy: str | None = None) -> BrowseResult:
        """Children with subtree counts plus the pinned node's own templates."""
        if node_id is None:
            if taxonomy not in (DO_TYPE, INDUSTRY):
                raise NotFound(f"unknown taxonomy {taxonomy!r}")
            children = self.roots(taxonomy)
            return BrowseResult(
                parent=None,
                children=tuple((n, self.template_count(n.id)) for n in children),
                templates=(),
            )
        parent = self.node(node_id)
        children = [self._nodes[i] for i in self._children.get(node_id, [])]
        attached = tuple(
            t for t in self._sorted_templates() if node_id in t.category_ids
        )
        return BrowseResult(
            parent=parent,
            children=tuple((n, self.template_count(n.id)) for n in children),
            templates=attached,
        )

    def template_count(self, node_id: str) -> int:
        """Distinct templates attached to the node or any descendant."""
        subtree = self._subtree(node_id)
        return sum(
            1 for t in self._templates.values() if t.category_ids & subtree
        )

    def _subtree(self, node_id: str) -> set[str]:
        self.node(node_id)
        out = set()
        stack = [node_id]
        while stack:
            current = stack.pop()
            out.add(current)
            stack.extend(self._children.get(current, []))
        return out

    def load_template(self, template_id: str) -> GymSpec:
        """Parse the stored document fresh, so edits never touch the catalog."""
        entry = self.template(template_id)
        return parse_document(entry.document)

    def template(self, template_id: str) -> TemplateEntry:
        try:
            return self._templates[template_id]
        except KeyError:
            raise NotFound(f"no template {template_id!r}") from None

    def publish_template(
        self,
        spec: GymSpec,
        name: str,
        description: str,
        category_ids: list[str],
        author: str = "",
        template_id: str | None = None,
    ) -> TemplateEntry:
        report = validate(spec)
        if not report.ok:
            raise ValidationFailed(report.findings)
        if not category_ids:
            raise UnknownCategory("at least one category id is required")
        for cid in category_ids:
            if cid not in self._nodes:
                raise UnknownCategory(f"no category node {cid!r}")
        with self._lock:
            entry = TemplateEntry(
                id=template_id or uuid.uuid4().hex[:12],
                name=name,
                description=description,
                document=to_document(spec),
                category_ids=frozenset(category_ids),
                author=author,
                created_at=time.time(),
            )
            self._templates[entry.id] = entry
        return entry

    def search_templates(self, query: str) -> list[TemplateEntry]:
        """Case-insensitive token match over name+description."""
        tokens = [t for t in query.lower().split() if t]
        if not tokens:
            return self._sorted_templates()
        scored = []
        for entry in self._templates.values():
            haystack = f"{entry.name} {entry.description}".lower()
            count = sum(1 for t in tokens if t in haystack)
            if count:
                scored.append((-count, entry.name, entry))
        scored.sort(key=lambda item: item[:2])
        return [entry for _, _, entry in scored]

    def templates(self) -> list[TemplateEntry]:
        return self._sorted_templates()

    def _sorted_templates(self) -> list[TemplateEntry]:
        return sorted(self._templates.values(), key=lambda t: (t.name, t.id))


def _seed_category_id(raw: str) -> str:
    # seed files use "do:<slug>" / "naics:<code>" already
    return raw
