"""
Graph Storage System.
JSON and DOT serialization of graphs and a directory-backed store of named graphs.
"""

import json
import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from graph_core import BaseGraph
from utils import InvalidGraphError


_NODE_RE = re.compile(r'^\s*n(\d+)(?:\s*\[(.*)\])?\s*;\s*$')
_EDGE_RE = re.compile(r'^\s*n(\d+)\s*->\s*n(\d+)\s*\[(.*)\]\s*;\s*$')
_GRAPH_ATTR_RE = re.compile(r'^\s*graph\s*\[(.*)\]\s*;\s*$')
_ATTR_RE = re.compile(r'(\w+)=("(?:[^"\\]|\\.)*"|[-+\w.]+)')


def graph_to_json(graph: BaseGraph) -> str:
    """Serialize a graph to the JSON interchange format."""
    return json.dumps(graph.to_dict(), indent=2, sort_keys=True)


def graph_from_json(text: str) -> BaseGraph:
    """Parse a graph from the JSON interchange format."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidGraphError(f"graph file is not valid JSON: {e}") from e
    return BaseGraph.from_dict(data)


def _attr_list(attrs: Dict[str, Any]) -> str:
    return ", ".join(f"{key}={json.dumps(value)}" for key, value in attrs.items())


def _parse_attrs(text: str) -> Dict[str, Any]:
    attrs = {}
    for key, raw in _ATTR_RE.findall(text or ""):
        try:
            attrs[key] = json.loads(raw)
        except json.JSONDecodeError as e:
            raise InvalidGraphError(f"bad DOT attribute {key}={raw}") from e
    return attrs


def graph_to_dot(graph: BaseGraph) -> str:
    """
    Export a graph to DOT.

    Serre graphs are written as their half-edges with an `inverse` attribute,
    so the export reads back exactly.

    Args:
        graph: graph to export

    Returns:
        DOT source text
    """
    lines = ["digraph G {"]
    header: Dict[str, Any] = {"kind": "oriented" if graph.directed else "serre"}
    if graph.attrs:
        header["attrs"] = json.dumps(graph.attrs, sort_keys=True)
    lines.append(f"  graph [{_attr_list(header)}];")

    for vertex in graph.vertices:
        if vertex.name is None:
            lines.append(f"  n{vertex.id};")
        else:
            lines.append(f"  n{vertex.id} [{_attr_list({'label': vertex.name})}];")

    for edge in graph.edges:
        attrs: Dict[str, Any] = {"id": edge.id}
        if edge.label is not None:
            attrs["label"] = edge.label
        if edge.weight != 1:
            attrs["weight"] = edge.weight
        if edge.inverse is not None:
            attrs["inverse"] = edge.inverse
        lines.append(f"  n{edge.src} -> n{edge.dst} [{_attr_list(attrs)}];")

    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_from_dot(text: str) -> BaseGraph:
    """
    Parse DOT written by graph_to_dot.

    Args:
        text: DOT source text

    Returns:
        The graph
    """
    kind = "oriented"
    attrs: Optional[Dict[str, Any]] = None
    vertices: List[Dict[str, Any]] = []
    edges: List[Dict[str, Any]] = []

    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("digraph") or stripped == "}":
            continue
        match = _GRAPH_ATTR_RE.match(line)
        if match:
            header = _parse_attrs(match.group(1))
            kind = header.get("kind", "oriented")
            if "attrs" in header:
                attrs = json.loads(header["attrs"])
            continue
        match = _EDGE_RE.match(line)
        if match:
            edge_attrs = _parse_attrs(match.group(3))
            entry = {"id": edge_attrs.get("id", len(edges)),
                     "src": int(match.group(1)), "dst": int(match.group(2))}
            for key in ("label", "weight", "inverse"):
                if key in edge_attrs:
                    entry[key] = edge_attrs[key]
            edges.append(entry)
            continue
        match = _NODE_RE.match(line)
        if match:
            entry = {"id": int(match.group(1))}
            node_attrs = _parse_attrs(match.group(2))
            if "label" in node_attrs:
                entry["name"] = node_attrs["label"]
            vertices.append(entry)
            continue
        raise InvalidGraphError(f"unrecognized DOT line: {stripped}")

    data: Dict[str, Any] = {"directed": kind != "serre", "vertices": vertices, "edges": edges}
    if attrs:
        data["attrs"] = attrs
    return BaseGraph.from_dict(data)


def write_graph(path: Union[str, Path], graph: BaseGraph):
    """Write a graph, choosing DOT for a .dot suffix and JSON otherwise."""
    path = Path(path)
    text = graph_to_dot(graph) if path.suffix == ".dot" else graph_to_json(graph)
    path.write_text(text)
    logging.info(f"Wrote {graph!r} to {path}")


def read_graph(path: Union[str, Path]) -> BaseGraph:
    """Read a graph, choosing the format by file suffix."""
    path = Path(path)
    text = path.read_text()
    graph = graph_from_dot(text) if path.suffix == ".dot" else graph_from_json(text)
    logging.info(f"Read {graph!r} from {path}")
    return graph


class GraphStorage:
    """
    Handles storage and retrieval of named graphs in a directory of JSON files.
    """

    def __init__(self, storage_dir: Union[str, Path] = "graphs"):
        """
        Initialize graph storage.

        Args:
            storage_dir: Directory holding one <name>.json file per graph
        """
        self.storage_dir = Path(storage_dir)
        self._ensure_storage_dir()
        logging.info(f"Graph storage initialized in: {self.storage_dir}")

    def _ensure_storage_dir(self):
        """Ensure the storage directory exists."""
        if not self.storage_dir.exists():
            self.storage_dir.mkdir(parents=True)
            logging.info(f"Created storage directory: {self.storage_dir}")

    def _path(self, name: str) -> Path:
        if not re.fullmatch(r"[\w.-]+", name):
            raise InvalidGraphError(f"invalid graph name {name!r}")
        return self.storage_dir / f"{name}.json"

    def save_graph(self, name: str, graph: BaseGraph) -> bool:
        """
        Save a graph under a name, replacing any previous graph of that name.

        Args:
            name: storage key
            graph: graph to save

        Returns:
            True if saved successfully, False otherwise
        """
        try:
            path = self._path(name)
            existed = path.exists()
            write_graph(path, graph)
            logging.info(f"{'Updated' if existed else 'Added'} graph: {name}")
            return True
        except (OSError, InvalidGraphError) as e:
            logging.error(f"Error saving graph {name}: {e}")
            return False

    def get_graph(self, name: str) -> Optional[BaseGraph]:
        """
        Retrieve a graph by name.

        Args:
            name: storage key

        Returns:
            The graph if found and valid, None otherwise
        """
        try:
            path = self._path(name)
            if not path.exists():
                return None
            return read_graph(path)
        except (OSError, InvalidGraphError) as e:
            logging.error(f"Error retrieving graph {name}: {e}")
            return None

    def list_graphs(self) -> List[str]:
        """Names of all stored graphs, sorted."""
        return sorted(path.stem for path in self.storage_dir.glob("*.json"))

    def delete_graph(self, name: str) -> bool:
        """
        Delete a graph from storage.

        Args:
            name: storage key

        Returns:
            True if deleted, False if missing or on error
        """
        try:
            path = self._path(name)
            if not path.exists():
                logging.warning(f"Graph not found for deletion: {name}")
                return False
            os.remove(path)
            logging.info(f"Deleted graph: {name}")
            return True
        except (OSError, InvalidGraphError) as e:
            logging.error(f"Error deleting graph {name}: {e}")
            return False

    def get_storage_stats(self) -> Dict[str, Any]:
        """
        Get statistics about the stored graphs.

        Returns:
            Dictionary with counts by family and orientation
        """
        by_family: Dict[str, int] = {}
        oriented = 0
        names = self.list_graphs()
        for name in names:
            graph = self.get_graph(name)
            if graph is None:
                continue
            family = str(graph.attrs.get("family", "unknown"))
            by_family[family] = by_family.get(family, 0) + 1
            oriented += int(graph.directed)
        return {
            "total_graphs": len(names),
            "graphs_by_family": by_family,
            "oriented_graphs": oriented,
            "storage_dir": str(self.storage_dir),
        }
