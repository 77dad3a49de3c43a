import json
import logging

import pandas as pd

from .models import REPORT_COLUMNS
from .serializers import ErrorReportSerializer

logger = logging.getLogger(__name__)

INTEGER_COLUMNS = ['sample_size', 'ell', 'space_entries', 'seed', 'n', 'd', 'k']
TIMING_COLUMNS = ['train_seconds', 'test_seconds']


def reports_frame(reports, timings=True):
    frame = pd.DataFrame.from_records([report.as_row() for report in reports], columns=REPORT_COLUMNS)
    frame = frame.astype({column: 'Int64' for column in INTEGER_COLUMNS})
    if not timings:
        frame[TIMING_COLUMNS] = None
    return frame


def write_csv(reports, path, timings=True):
    frame = reports_frame(reports, timings=timings)
    frame.to_csv(path, index=False, float_format='%.17g', na_rep='', lineterminator='\n')
    logger.info("wrote %d report rows to %s", len(frame), path)


def write_jsonl(reports, path, timings=True):
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for report in reports:
            record = ErrorReportSerializer(report).data
            if not timings:
                for column in TIMING_COLUMNS:
                    record[column] = None
            handle.write(json.dumps(record, sort_keys=True) + '\n')
    logger.info("wrote %d report records to %s", len(reports), path)


def read_report_csv(path):
    return pd.read_csv(path, dtype={'method': str})
