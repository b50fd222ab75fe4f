"""File utilities for graph files, reports and atomic writes."""

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Union

from ..errors import FormatError, GraphError, InvalidParams, PortGNNError
from ..models.coloring import Coloring
from ..models.graph import Graph
from ..models.port_numbering import PortNumbering
from ..version import get_version

PathLike = Union[str, Path]

SCHEMA_VERSION = 1


class GraphFile(NamedTuple):
    """Contents of a JSON graph file."""

    graph: Graph
    coloring: Optional[Coloring]
    ports: Optional[PortNumbering]


def spec_hash(payload: Dict[str, Any]) -> str:
    """Stable SHA-256 of a JSON-serializable dictionary.

    Args:
        payload: Parameters that fully determine an output

    Returns:
        Hex digest of the canonical JSON encoding
    """
    encoded = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(encoded).hexdigest()


def build_header(seed: Optional[int], parameters: Dict[str, Any]) -> Dict[str, Any]:
    """Header block carried by every output file."""
    return {
        "tool_version": get_version(),
        "schema_version": SCHEMA_VERSION,
        "spec_hash": spec_hash(parameters),
        "seed": seed,
    }


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write text through a temporary file and rename it into place.

    Args:
        path: Destination file
        text: Full file contents

    Returns:
        Destination path
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=str(target.parent), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise
    return target


def write_json(path: PathLike, data: Dict[str, Any]) -> Path:
    """Write a dictionary as indented, key-sorted JSON."""
    return atomic_write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def read_json(path: PathLike) -> Dict[str, Any]:
    """Read a JSON object from disk.

    Raises:
        FormatError: If the file is missing, not JSON, or not an object
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read JSON from {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path} does not contain a JSON object")
    return data


def write_csv(
    path: PathLike,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    header: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write a CSV file, preceded by `# key: value` header comment lines.

    Args:
        path: Destination file
        columns: Column names
        rows: Row values in column order
        header: Header block to emit as comments

    Returns:
        Destination path
    """
    buffer = io.StringIO()
    for key, value in sorted((header or {}).items()):
        buffer.write(f"# {key}: {value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    return atomic_write_text(path, buffer.getvalue())


def read_csv_rows(path: PathLike) -> List[Dict[str, str]]:
    """Read a CSV written by write_csv, skipping header comments."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


def graph_to_dict(
    g: Graph,
    coloring: Optional[Coloring] = None,
    ports: Optional[PortNumbering] = None,
    header: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Encode a graph file dictionary with canonical ordering."""
    data = g.to_dict()
    if coloring is not None:
        data["coloring"] = coloring.to_list()
    if ports is not None:
        data["ports"] = ports.to_pairs()
    if header is not None:
        data["header"] = header
    return data


def graph_from_dict(data: Dict[str, Any]) -> GraphFile:
    """Decode a graph file dictionary; edge and port order may be loose.

    Raises:
        FormatError: If required fields are missing or malformed
    """
    if "n" not in data or not isinstance(data.get("edges", []), list):
        raise FormatError("graph file needs an integer `n` and an `edges` array")
    try:
        g = Graph.from_dict(data)
        coloring = Coloring(data["coloring"]) if data.get("coloring") is not None else None
        ports = PortNumbering.from_pairs(data["ports"]) if data.get("ports") is not None else None
    except (GraphError, InvalidParams) as exc:
        raise FormatError(f"malformed graph file: {exc}") from exc
    except PortGNNError:
        raise
    except (TypeError, ValueError, IndexError, KeyError) as exc:
        raise FormatError(f"malformed graph file: {exc}") from exc
    if coloring is not None and len(coloring) != g.n:
        raise FormatError(f"coloring has {len(coloring)} entries for {g.n} nodes")
    if ports is not None and not ports.is_total(g):
        raise FormatError("port numbering does not cover exactly the ports of the graph")
    return GraphFile(g, coloring, ports)


def write_graph_file(
    path: PathLike,
    g: Graph,
    coloring: Optional[Coloring] = None,
    ports: Optional[PortNumbering] = None,
    header: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write a JSON graph file."""
    return write_json(path, graph_to_dict(g, coloring, ports, header))


def read_graph_file(path: PathLike) -> GraphFile:
    """Read a JSON graph file."""
    return graph_from_dict(read_json(path))
