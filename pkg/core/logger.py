import json
import logging
from pathlib import Path
from datetime import datetime
from typing import Dict, Optional

from rich.logging import RichHandler


def setup_logging(verbose: bool = False) -> None:
    """Route library loggers through rich for the command line."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, show_path=False)],
        force=True,
    )


class RunLogger:
    """
    Session log for training / verification runs:
    - Human-readable run log
    - Structured events (JSON Lines): epoch records, step errors, checks
    - Error log with context
    """

    def __init__(self, output_dir: Path, label: str = "run"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.session_dir = self.output_dir / f"{label}_{timestamp}"
        self.session_dir.mkdir(exist_ok=True)

        self.main_log_file = self.session_dir / "run_log.txt"
        self.event_log_file = self.session_dir / "events.jsonl"
        self.error_log_file = self.session_dir / "errors_log.txt"

        self.event_counter = 0
        self.logger = logging.getLogger(__name__)

        self.log_info("=" * 80)
        self.log_info(f"SESSION STARTED: {label} {timestamp}")
        self.log_info("=" * 80)

    def log_info(self, message: str):
        """Append a timestamped line to the run log"""
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
        with open(self.main_log_file, 'a', encoding='utf-8') as f:
            f.write(f"[{timestamp}] {message}\n")

    def log_event(self, event_type: str, details: Dict):
        """Log structured event data in JSON Lines format"""
        self.event_counter += 1
        entry = {
            "event_id": self.event_counter,
            "timestamp": datetime.now().isoformat(),
            "event_type": event_type,
            "details": details,
        }
        with open(self.event_log_file, 'a', encoding='utf-8') as f:
            f.write(json.dumps(entry, default=_jsonable) + '\n')

        self.log_info(f"EVENT #{self.event_counter}: {event_type} - {json.dumps(details, default=_jsonable)}")

    def log_error(self, error_type: str, error_message: str, context: Optional[Dict] = None):
        """Log error with context"""
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
        entry = f"\n[{timestamp}] ERROR: {error_type}\n"
        entry += f"Message: {error_message}\n"
        if context:
            entry += f"Context: {json.dumps(context, indent=2, default=_jsonable)}\n"
        entry += "-" * 80 + "\n"

        with open(self.error_log_file, 'a', encoding='utf-8') as f:
            f.write(entry)

        self.logger.error(f"{error_type}: {error_message}")

    def log_epoch(self, model: str, record: Dict):
        """Epoch summary without the per-sample dual snapshot"""
        details = {k: v for k, v in record.items() if k != 'z'}
        details['model'] = model
        self.log_event("epoch_completed", details)

    def log_check(self, name: str, status: str, value: Optional[float], threshold: Optional[float]):
        self.log_event("verification_check", {
            "check": name,
            "status": status,
            "value": value,
            "threshold": threshold,
        })

    def save_final_summary(self, summary: Dict):
        """Save final run summary next to the logs"""
        summary_file = self.session_dir / "run_summary.json"
        with open(summary_file, 'w', encoding='utf-8') as f:
            json.dump({
                "session_ended": datetime.now().isoformat(),
                "total_events": self.event_counter,
                "summary": summary,
            }, f, indent=2, default=_jsonable)

        self.log_info("=" * 80)
        self.log_info("SESSION COMPLETED")
        self.log_info(f"Total events logged: {self.event_counter}")
        self.log_info("=" * 80)


def _jsonable(value):
    """Fallback for numpy scalars / arrays inside log payloads"""
    if hasattr(value, 'tolist'):
        return value.tolist()
    return str(value)
