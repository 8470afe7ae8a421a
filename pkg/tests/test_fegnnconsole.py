import io
import pytest

from fegnncore import formatcell, formattable, printtable, formatkeyvalues, ansibold


def test_format_cells():
    assert formatcell(0.123456) == '0.1235'
    assert formatcell(float('nan')) == 'nan'
    assert formatcell(None) == '-'
    assert formatcell(True) == 'true'
    assert formatcell(7) == '7'

def test_table_alignment():
    text = formattable(['seed', 'acc'], [[0, 0.5], [10, 0.25]], precision = 2)
    assert text.splitlines() == ['seed  acc', '----  ----', '0     0.50', '10    0.25']

def test_plain_stream_is_not_bold():
    stream = io.StringIO()
    printtable(['a'], [[1]], stream = stream)
    assert stream.getvalue().splitlines()[0] == 'a'
    assert ansibold('x', stream) == 'x'

def test_key_values():
    assert formatkeyvalues({'mean': 0.5, 'ci95': 0.01}, indent = 2) == '  mean  0.5000\n  ci95  0.0100'
    assert formatkeyvalues({}) == ''
    with pytest.raises(ValueError):
        formatkeyvalues({'a': 1}, indent = -1)
