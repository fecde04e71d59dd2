"""Report assembly and rendering.

A report holds the results of one CLI run in request order. JSON output is
canonical (sorted keys, two-space indent, UTF-8 kept as is), so parsing a
report and rendering it again gives the same bytes. Timing data never
enters a report.
"""

import json
from dataclasses import dataclass, field
from typing import Mapping

from .commands import CommandResult
from .errors import ProblemFileError

REPORT_FORMAT = 1


@dataclass
class Report:
    """Results of one run.

    Attributes:
        tool_version: Version of the tool that produced the report
        source: Problem file the requests came from
        results: Command results in request order
    """

    tool_version: str
    source: str = ""
    results: list = field(default_factory=list)

    def add(self, result: CommandResult) -> None:
        """Append one result."""
        self.results.append(result)

    def to_dict(self) -> dict:
        """Serializable form."""
        return {
            "format": REPORT_FORMAT,
            "results": [r.to_dict() for r in self.results],
            "source": self.source,
            "tool_version": self.tool_version,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "Report":
        """Rebuild a report from its serialized form.

        Raises:
            ProblemFileError: If the report format is not understood
        """
        if raw.get("format") != REPORT_FORMAT:
            raise ProblemFileError(f"report format {raw.get('format')!r} is not supported")
        return cls(
            str(raw.get("tool_version", "")),
            str(raw.get("source", "")),
            [CommandResult.from_dict(r) for r in raw.get("results", [])],
        )

    def render_json(self) -> str:
        """Canonical JSON text, newline terminated."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def parse_json(cls, text: str) -> "Report":
        """Inverse of render_json."""
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise ProblemFileError(f"report is not valid JSON: {e}") from e

    def render_text(self) -> str:
        """Human-readable report, one block per result."""
        if not self.results:
            return "no requests\n"
        blocks = []
        for r in self.results:
            header = f"[{r.command}]"
            blocks.append("\n".join([header, *r.lines]))
        return "\n\n".join(blocks) + "\n"
