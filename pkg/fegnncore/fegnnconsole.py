'''FE-GNN Core: FE-GNN Console
\n\tAligned text tables and key/value blocks for result summaries.'''
import os
import sys
__all__ = ['formatcell', 'formattable', 'printtable', 'formatkeyvalues',
           'printkeyvalues', 'ansibold']


#__ANSI Formatting__
def _hasansisupport(stream):
    '''Check if a stream is a terminal that understands ANSI escape codes.'''
    isatty = getattr(stream, 'isatty', None)
    if isatty is None or not isatty():
        return False
    return os.name != 'nt' or 'WT_SESSION' in os.environ

def ansibold(text, stream = None):
    '''Make a string boldfaced when the stream supports ANSI escape codes.'''
    stream = sys.stdout if stream is None else stream
    return f'\x1b[1m{text}\x1b[22m' if _hasansisupport(stream) else text


#__Tables__
def formatcell(value, precision = 4):
    '''Format one table cell; floats get a fixed number of decimals.'''
    if isinstance(value, bool) or value is None:
        return '-' if value is None else str(value).lower()
    if isinstance(value, float):
        return 'nan' if value != value else f'{value:.{precision}f}'
    return str(value)

def formattable(header, rows, precision = 4):
    '''Return rows as left-aligned columns under a header and a rule.'''
    if not hasattr(rows, '__iter__'):
        raise TypeError('rows must be an iterable')
    cells = [[str(h) for h in header]]
    cells += [[formatcell(v, precision) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ['  '.join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, '  '.join('-' * w for w in widths))
    return '\n'.join(lines)

def printtable(header, rows, precision = 4, stream = None):
    '''Display a table with a bold header line.'''
    stream = sys.stdout if stream is None else stream
    lines = formattable(header, rows, precision).split('\n')
    lines[0] = ansibold(lines[0], stream)
    print('\n'.join(lines), file = stream)


#__Key/Value Blocks__
def formatkeyvalues(mapping, precision = 4, indent = 0):
    '''Return "key: value" lines with keys padded to a common width.'''
    if not isinstance(indent, int) or indent < 0:
        raise ValueError('indent must be a non-negative integer')
    if not mapping:
        return ''
    width = max(len(str(key)) for key in mapping)
    pad = ' ' * indent
    return '\n'.join(f'{pad}{str(key).ljust(width)}  {formatcell(value, precision)}'
                     for key, value in mapping.items())

def printkeyvalues(mapping, precision = 4, indent = 0, stream = None):
    '''Display a key/value block.'''
    print(formatkeyvalues(mapping, precision, indent), file = sys.stdout if stream is None else stream)
