"""Tool: RunLogger
Persist CLI runs (command, validated config, exit code, result) for audit purposes.

Example:
    from tools.run_logger import RunLogger

    audit = RunLogger("logs")
    audit.log_run("classify", config={"order": 4}, exit_code=0, result={"verdict": "non-equivalent"})
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

logger = logging.getLogger(__name__)


class RunLogger:
    """Append-only JSONL audit trail, one file per command name."""

    def __init__(self, log_dir: Union[str, Path] = "logs"):
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)

    def _log_file(self, command: str) -> Path:
        return self.log_dir / f"{command}.jsonl"

    def log_run(
        self,
        command: str,
        config: Optional[Dict[str, Any]] = None,
        exit_code: int = 0,
        result: Optional[Any] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> bool:
        """Append one run record.

        Args:
            command: Subcommand name (star, reduce, divide, classify, check, ktable)
            config: The validated run configuration
            exit_code: Process exit code of the run
            result: JSON-serializable result payload
            metadata: Additional metadata

        Returns:
            True if logged successfully, False otherwise
        """
        if not command:
            return False

        entry = {
            "command": command,
            "timestamp": datetime.now().isoformat(),
            "config": config or {},
            "exit_code": exit_code,
            "result": result,
            "metadata": metadata or {},
        }
        try:
            with open(self._log_file(command), "a", encoding="utf-8") as f:
                f.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")
            return True
        except (OSError, TypeError, ValueError) as exc:
            logger.error("Failed to write run log for %s: %s", command, exc)
            return False

    def get_run_history(self, command: str) -> List[Dict[str, Any]]:
        """All records for a command, oldest first; empty if none were logged."""
        log_file = self._log_file(command)
        if not log_file.exists():
            return []

        history = []
        try:
            with open(log_file, "r", encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if line:
                        history.append(json.loads(line))
        except (OSError, json.JSONDecodeError) as exc:
            logger.error("Failed to read run log for %s: %s", command, exc)
            return []

        return history

    def summarize_runs(self, command: str) -> Dict[str, Any]:
        """Run counts by outcome plus the first and last timestamps."""
        history = self.get_run_history(command)

        if not history:
            return {"error": "No runs logged"}

        succeeded = sum(1 for entry in history if entry.get("exit_code") == 0)
        check_failures = sum(1 for entry in history if entry.get("exit_code") == 1)
        rejected = sum(1 for entry in history if entry.get("exit_code") == 2)

        start_time = history[0]["timestamp"]
        end_time = history[-1]["timestamp"]
        duration_seconds = None
        try:
            duration_seconds = (
                datetime.fromisoformat(end_time) - datetime.fromisoformat(start_time)
            ).total_seconds()
        except ValueError:
            pass

        return {
            "command": command,
            "runs": {
                "succeeded": succeeded,
                "check_failures": check_failures,
                "rejected": rejected,
                "total": len(history),
            },
            "span": {"start": start_time, "end": end_time, "seconds": duration_seconds},
        }

    def list_commands(self) -> List[str]:
        """Commands with at least one logged run, sorted."""
        try:
            return sorted(f.stem for f in self.log_dir.glob("*.jsonl"))
        except OSError:
            return []

    def delete_history(self, command: str) -> bool:
        """Remove the log file of a command; False if there was none."""
        log_file = self._log_file(command)
        try:
            if log_file.exists():
                log_file.unlink()
                return True
            return False
        except OSError as exc:
            logger.error("Failed to delete run log for %s: %s", command, exc)
            return False
