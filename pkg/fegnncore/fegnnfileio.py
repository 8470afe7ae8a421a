'''FE-GNN Core: FE-GNN File I/O
\n\tA library of functions for reading and writing the plain-text, CSV and
JSON-lines files that datasets, profiles and run records are stored in.'''
import csv
import json
import os
from .fegnngraph import inputerror
__all__ = ['readdatalines', 'writetextfile', 'writecsvfile',
           'writejsonlines', 'readjsonlines', 'readconfigfile', 'makedirectory',
           'seedpath']


#___Reading Text Files___
def readdatalines(file_path):
    '''Return (line number, stripped text) for every data line of a UTF-8
    text file. Blank lines and lines starting with '#' are skipped.'''
    if not isinstance(file_path, (str, os.PathLike)):
        raise TypeError('file_path must be a string or path')
    if not os.path.isfile(file_path):
        raise inputerror(f'{file_path}: file not found')
    lines = []
    with open(file_path, 'r', encoding = 'utf-8') as file:
        for number, line in enumerate(file, start = 1):
            text = line.strip()
            if text and not text.startswith('#'):
                lines.append((number, text))
    return lines

def writetextfile(file_path, lines):
    '''Write lines to a text file, one per line.'''
    with open(file_path, 'w', encoding = 'utf-8') as file:
        for line in lines:
            file.write(f'{line}\n')


#___Reading and Writing CSV Files___
def writecsvfile(file_path, header, rows):
    '''Write a header row followed by data rows to a CSV file.'''
    with open(file_path, 'w', encoding = 'utf-8', newline = '') as file:
        writer = csv.writer(file)
        writer.writerow(header)
        writer.writerows(rows)


#___Reading and Writing JSON Lines___
def writejsonlines(file_path, records, append = False):
    '''Write each record as one JSON object per line.'''
    with open(file_path, 'a' if append else 'w', encoding = 'utf-8') as file:
        for record in records:
            file.write(json.dumps(record, sort_keys = True) + '\n')

def readjsonlines(file_path):
    '''Read a file of line-delimited JSON objects.'''
    return [json.loads(text) for _, text in readdatalines(file_path)]


#___Configuration Files___
def readconfigfile(file_path):
    '''Parse a flat "key = value" configuration file into a dictionary.
    \nKeys are normalized to use underscores; values are kept as strings.'''
    config = {}
    for number, text in readdatalines(file_path):
        if '=' not in text:
            raise inputerror(f'{file_path}:{number}: expected "key = value"')
        key, value = text.split('=', 1)
        key = key.strip().lstrip('-').replace('-', '_')
        if not key:
            raise inputerror(f'{file_path}:{number}: empty key')
        config[key] = value.strip()
    return config


#___Paths___
def makedirectory(path):
    '''Create a directory and its parents if they do not already exist.'''
    os.makedirs(path, exist_ok = True)
    return path

def seedpath(path, seed):
    '''Return path with ".seed<S>" inserted before its extension.'''
    stem, ext = os.path.splitext(str(path))
    return f'{stem}.seed{seed}{ext}'
