'''Run the fegnn command with "python -m fegnncore".'''
import sys
from .fegnncli import main

sys.exit(main())
