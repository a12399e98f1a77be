"""
Campaign report writer
CSV rows, JSON summaries and violation dumps under one output directory
"""

import os
import json
import logging
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from config import ReportConfig
from campaign import CampaignResult

logger = logging.getLogger(__name__)


def _to_builtin(value: Any) -> Any:
    """json.dump hook for numpy scalars and arrays"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class CampaignReporter:
    """Writes the files of one campaign run into output_dir"""

    def __init__(self, output_dir: str = "reports"):
        self.output_dir = output_dir
        self.written: List[str] = []

    def _path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)

    def prepare(self):
        os.makedirs(self.output_dir, exist_ok=True)

    def write_frame(self, frame: pd.DataFrame, filename: str) -> str:
        path = self._path(filename)
        frame.to_csv(path, index=False, float_format=ReportConfig.FLOAT_FORMAT)
        self.written.append(path)
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_json(self, data: Dict[str, Any], filename: str) -> str:
        path = self._path(filename)
        with open(path, 'w') as f:
            json.dump(data, f, indent=2, sort_keys=True, default=_to_builtin)
            f.write("\n")
        self.written.append(path)
        logger.info(f"Wrote {path}")
        return path

    def write_violations(self, violations: List[Dict[str, Any]]) -> str:
        return self.write_json({'count': len(violations), 'violations': violations},
                               ReportConfig.VIOLATIONS_FILE)

    def write_result(self, result: CampaignResult) -> List[str]:
        """All files for a result: rows, summary, extra tables, violations on failure"""
        self.prepare()
        mode = result.mode.value

        if result.rows:
            self.write_frame(pd.DataFrame(result.rows), f"{mode}{ReportConfig.ROWS_SUFFIX}")
        for filename, frame in sorted(result.frames.items()):
            self.write_frame(frame, filename)
        self.write_json(result.summary, f"{mode}{ReportConfig.SUMMARY_SUFFIX}")

        if result.violations:
            logger.error(f"{len(result.violations)} invariant violations in {mode}")
            self.write_violations(result.violations)

        return list(self.written)


def print_campaign_summary(result: CampaignResult):
    """Print formatted campaign summary"""

    print(f"=== {result.mode.value.upper()} SUMMARY ===")
    for key, value in sorted(result.summary.items()):
        if isinstance(value, float):
            print(f"{key}: {value:.6g}")
        else:
            print(f"{key}: {value}")

    if result.violations:
        print(f"\n--- Violations ({len(result.violations)}) ---")
        for record in result.violations[:10]:
            print(f"trial {record['trial']}: {record['message']}")
        if len(result.violations) > 10:
            print(f"... and {len(result.violations) - 10} more")


__all__ = [
    'CampaignReporter',
    'print_campaign_summary',
]
