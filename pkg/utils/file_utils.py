"""
File Utilities - reading and writing the line-oriented text formats

Formats:
  tuple lists   one block per line, comma-separated integer encodings,
                header "# q=2 n=7 k=3"
  generators    space-separated matrix rows, matrices separated by a blank
                line, header "# q=2 n=11"
  matrices      header "# rows cols", entry rows, then "#w" weight rows
                (column weights first, optional row weights second)
"""

import hashlib
import os
import re
from contextlib import contextmanager

import chardet

from config.settings import TEXT_ENCODINGS
from core.errors import FormatError, QPackError
from core.gfmat import FqMatrix, decode_tuple
from core.orbits import GroupGens

HEADER_FIELD = re.compile(r"(\w+)=(\S+)")


def detect_encoding(raw):
    """Best guess for the encoding of raw bytes; None when chardet is unsure"""
    guess = chardet.detect(raw[:65536])
    if guess.get('encoding') and (guess.get('confidence') or 0) >= 0.5:
        return guess['encoding']
    return None


def read_text_file(file_path):
    """Text of file_path, trying the detected encoding and then the fallbacks"""
    try:
        with open(file_path, 'rb') as file:
            raw = file.read()
    except OSError as e:
        raise FormatError(f"cannot read file: {e.strerror or e}", file_path) from e

    encodings = TEXT_ENCODINGS
    detected = detect_encoding(raw)
    if detected:
        encodings = [detected] + [e for e in TEXT_ENCODINGS if e.lower() != detected.lower()]
    for encoding in encodings:
        try:
            return raw.decode(encoding)
        except (UnicodeDecodeError, LookupError):
            continue
    raise FormatError("could not decode file with any known encoding", file_path)


@contextmanager
def open_for_writing(file_path):
    """Text handle for file_path; OS errors surface as FormatError naming the file"""
    try:
        with open(file_path, 'w', encoding='utf-8') as file:
            yield file
    except OSError as e:
        raise FormatError(f"cannot write file: {e.strerror or e}", file_path) from e


def _lines(file_path):
    """(line number, stripped text) pairs"""
    return [(i, line.strip()) for i, line in enumerate(read_text_file(file_path).splitlines(), 1)]


def parse_header(text):
    return {key: value for key, value in HEADER_FIELD.findall(text)}


def _int_field(header, key, file_path, default=None):
    value = header.get(key, default)
    if value is None:
        raise FormatError(f"header is missing '{key}='", file_path, 1)
    try:
        return int(value)
    except ValueError:
        raise FormatError(f"header field {key}={value} is not an integer", file_path, 1)


# ---------------------------------------------------------------------------
# Tuple lists (blocks or representatives)
# ---------------------------------------------------------------------------

def read_tuple_file(file_path, n=None, q=None):
    """Header dict and a list of (line number, int tuple)"""
    header = {}
    tuples = []
    for number, line in _lines(file_path):
        if not line:
            continue
        if line.startswith('#'):
            header.update(parse_header(line))
            continue
        try:
            tuples.append((number, tuple(int(x) for x in line.replace(' ', '').split(',') if x)))
        except ValueError:
            raise FormatError(f"expected comma-separated integers, got {line!r}", file_path, number)
    if n is not None:
        header['n'] = str(n)
    if q is not None:
        header['q'] = str(q)
    header['q'] = str(_int_field(header, 'q', file_path, default='2'))
    _int_field(header, 'n', file_path)
    return header, tuples


def read_subspaces(file_path, n=None, q=None):
    """Canonical subspaces from a tuple file, with errors pointing at the line"""
    header, tuples = read_tuple_file(file_path, n, q)
    q, n = int(header['q']), int(header['n'])
    subspaces = []
    for number, ints in tuples:
        try:
            subspaces.append(decode_tuple(ints, n, q))
        except QPackError as e:
            raise FormatError(str(e), file_path, number) from e
    k = header.get('k')
    if k is not None and any(S.k != int(k) for S in subspaces):
        raise FormatError(f"not every block has dimension {k}", file_path)
    return header, subspaces


def write_tuple_file(file_path, subspaces, q, n, k):
    with open_for_writing(file_path) as file:
        file.write(f"# q={q} n={n} k={k}\n")
        for codes in subspaces:
            codes = codes.codes if hasattr(codes, 'codes') else codes
            file.write(",".join(str(int(c)) for c in codes) + "\n")


# ---------------------------------------------------------------------------
# Generator matrices
# ---------------------------------------------------------------------------

def read_matrix_rows(file_path):
    """Header dict and a list of matrices, each a list of integer rows"""
    header = {}
    matrices = []
    current = []
    for number, line in _lines(file_path):
        if line.startswith('#'):
            header.update(parse_header(line))
            continue
        if not line:
            if current:
                matrices.append(current)
                current = []
            continue
        try:
            current.append([int(x) for x in line.split()])
        except ValueError:
            raise FormatError(f"expected space-separated integers, got {line!r}", file_path, number)
    if current:
        matrices.append(current)
    if not matrices:
        raise FormatError("no matrices found", file_path)
    return header, matrices


def read_generators(file_path, name=None):
    """GroupGens from a generator file"""
    header, matrices = read_matrix_rows(file_path)
    q = _int_field(header, 'q', file_path, default='2')
    n = _int_field(header, 'n', file_path, default=str(len(matrices[0])))
    for i, rows in enumerate(matrices, 1):
        if len(rows) != n or any(len(row) != n for row in rows):
            raise FormatError(f"generator {i} is not {n}x{n}", file_path)
    name = name or os.path.splitext(os.path.basename(file_path))[0]
    try:
        return GroupGens(q, n, tuple(FqMatrix.from_rows(q, rows) for rows in matrices), name=name)
    except QPackError as e:
        raise FormatError(str(e), file_path) from e


def write_generators(file_path, gens):
    with open_for_writing(file_path) as file:
        file.write(f"# q={gens.q} n={gens.n}\n")
        file.write("\n\n".join(str(g) for g in gens.generators) + "\n")


# ---------------------------------------------------------------------------
# Incidence matrices
# ---------------------------------------------------------------------------

def read_incidence_text(file_path):
    """(entries, col_weights, row_weights) lists; row_weights is None when absent"""
    lines = [(number, line) for number, line in _lines(file_path) if line]
    if not lines or not lines[0][1].startswith('#'):
        raise FormatError("missing '# rows cols' header", file_path, 1)
    try:
        rows, cols = (int(x) for x in lines[0][1].lstrip('#').split()[:2])
    except ValueError:
        raise FormatError("malformed '# rows cols' header", file_path, lines[0][0])
    entries, weights = [], []
    for number, line in lines[1:]:
        target = weights if line.startswith('#w') else entries
        fields = line[2:].split() if line.startswith('#w') else line.split()
        if line.startswith('#') and not line.startswith('#w'):
            continue
        try:
            target.append([int(x) for x in fields])
        except ValueError:
            raise FormatError(f"expected integers, got {line!r}", file_path, number)
    if len(entries) != rows or any(len(row) != cols for row in entries):
        raise FormatError(f"expected a {rows}x{cols} matrix", file_path)
    col_weights = weights[0] if weights else [1] * cols
    row_weights = weights[1] if len(weights) > 1 else None
    if len(col_weights) != cols or (row_weights is not None and len(row_weights) != rows):
        raise FormatError("weight row has the wrong length", file_path)
    return entries, col_weights, row_weights


def write_incidence_text(file_path, A):
    with open_for_writing(file_path) as file:
        file.write(incidence_text(A))


def incidence_text(A):
    lines = [f"# {A.shape[0]} {A.shape[1]}"]
    lines += [" ".join(str(int(x)) for x in row) for row in A.entries]
    lines.append("#w " + " ".join(str(int(w)) for w in A.col_weights))
    lines.append("#w " + " ".join(str(int(w)) for w in A.row_weights))
    return "\n".join(lines) + "\n"


def file_sha256(file_path):
    digest = hashlib.sha256()
    with open(file_path, 'rb') as file:
        for chunk in iter(lambda: file.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()
