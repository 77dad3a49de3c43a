"""
Plain numeric CSV files: one point per line, comma separated, an optional
header line. Reading is chunked through pandas so a training pass never holds
more than `chunk_rows` lines at once.
"""
import codecs
import logging
import re

import numpy as np
import pandas as pd

from sketching.exceptions import MalformedInput

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_ROWS = 4096

_PARSER_LINE = re.compile(r'line (\d+)')


def _reader(path, header, chunk_rows):
    return pd.read_csv(
        path,
        header=None,
        skiprows=1 if header else 0,
        dtype=str,
        keep_default_na=False,
        skip_blank_lines=False,
        encoding='utf-8',
        chunksize=chunk_rows,
    )


def _undecodable(path, block_bytes=1 << 16):
    """(byte offset, line) of the first byte that is not valid UTF-8."""
    decoder = codecs.getincrementaldecoder('utf-8')()
    offset, line = 0, 1
    with open(path, 'rb') as handle:
        while chunk := handle.read(block_bytes):
            try:
                decoder.decode(chunk)
            except UnicodeDecodeError as exc:
                position = max(exc.start - len(exc.object) + len(chunk), 0)
                return offset + position, line + chunk.count(b"\n", 0, position)
            offset += len(chunk)
            line += chunk.count(b"\n")
        try:
            decoder.decode(b'', final=True)
        except UnicodeDecodeError:
            return offset, line
    return None, None


def _decode_failure(path, exc):
    offset, line = _undecodable(path)
    if offset is None:
        offset = exc.start
    return MalformedInput(f"invalid UTF-8 byte at offset {offset}", line=line)


def iter_csv_blocks(path, header=False, drop_first_col=False, chunk_rows=DEFAULT_CHUNK_ROWS):
    """
    Yield (first_line, block) pairs, block being a float64 array of up to
    chunk_rows points. first_line is the 1-based file line of block[0].
    """
    offset = 2 if header else 1
    try:
        reader = _reader(path, header, chunk_rows)
    except pd.errors.EmptyDataError:
        return
    except UnicodeDecodeError as exc:
        raise _decode_failure(path, exc) from exc

    consumed = 0
    with reader:
        while True:
            try:
                frame = next(reader)
            except StopIteration:
                break
            except pd.errors.EmptyDataError:
                break
            except pd.errors.ParserError as exc:
                match = _PARSER_LINE.search(str(exc))
                line = int(match.group(1)) if match else None
                raise MalformedInput("inconsistent number of fields", line=line) from exc
            except UnicodeDecodeError as exc:
                raise _decode_failure(path, exc) from exc

            if drop_first_col:
                frame = frame.iloc[:, 1:]
            if frame.shape[1] == 0:
                raise MalformedInput("row has no feature columns", line=consumed + offset)

            values = frame.apply(lambda column: pd.to_numeric(column.astype(str).str.strip(), errors='coerce'))
            block = values.to_numpy(dtype=np.float64)
            bad = np.isnan(block)
            if bad.any():
                row, col = np.argwhere(bad)[0]
                raise MalformedInput(
                    f"field {col + 1} ({frame.iat[row, col]!r}) is not a number",
                    line=consumed + offset + int(row),
                )
            logger.debug("read %d rows from %s (lines %d+)", block.shape[0], path, consumed + offset)
            yield consumed + offset, block
            consumed += block.shape[0]


def iter_csv_rows(path, header=False, drop_first_col=False, chunk_rows=DEFAULT_CHUNK_ROWS):
    for _, block in iter_csv_blocks(path, header, drop_first_col, chunk_rows):
        yield from block


def read_csv_matrix(path, header=False, drop_first_col=False, chunk_rows=DEFAULT_CHUNK_ROWS):
    blocks = [block for _, block in iter_csv_blocks(path, header, drop_first_col, chunk_rows)]
    if not blocks:
        return np.zeros((0, 0))
    return np.vstack(blocks)


def count_rows(path, header=False, drop_first_col=False, chunk_rows=DEFAULT_CHUNK_ROWS):
    return sum(block.shape[0] for _, block in iter_csv_blocks(path, header, drop_first_col, chunk_rows))


def column_means(path, header=False, drop_first_col=False, chunk_rows=DEFAULT_CHUNK_ROWS):
    """Streamed column mean, the first of the two passes behind --center."""
    total, n = None, 0
    for _, block in iter_csv_blocks(path, header, drop_first_col, chunk_rows):
        total = block.sum(axis=0) if total is None else total + block.sum(axis=0)
        n += block.shape[0]
    if n == 0:
        return None
    return total / n


def write_matrix_csv(path, A, header=False):
    """17 significant digits, so every float64 reads back exactly."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    names = ','.join(f"c{j}" for j in range(A.shape[1])) if header else ''
    with open(path, 'w', encoding='ascii', newline='\n') as handle:
        if A.size == 0:
            if header:
                handle.write(names + '\n')
            return
        np.savetxt(handle, A, fmt='%.17g', delimiter=',', header=names, comments='')
