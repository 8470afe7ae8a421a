'''
FE-GNN Core v0.1.0: feature-expanded graph neural networks for node classification.

FE-GNN Core is composed of the following modules:

* **FE-GNN Graph** (`fegnngraph.py`): Edge lists, symmetric sparse matrices, the normalized adjacency and Laplacian, and the error classes.
* **FE-GNN Features** (`fegnnfeatures.py`): Monomial, Chebyshev and Bernstein feature subspaces, column normalization, feature space assembly.
* **FE-GNN Spectral** (`fegnnspectral.py`): Truncated SVD of symmetric graph matrices and structural principal components.
* **FE-GNN Model** (`fegnnmodel.py`): The linear per-subspace model, its weight-sharing variant, cross-entropy and analytic gradients.
* **FE-GNN Optimize** (`fegnnoptimize.py`): Training configuration, Adam, early-stopped training and evaluation.
* **FE-GNN Diagnostics** (`fegnndiagnostics.py`): Mutual coherence, correlation profiles, column-norm dispersion, homophily and linearization certificates.
* **FE-GNN Data** (`fegnndata.py`): The canonical dataset format, random splits and stochastic block models.
* **FE-GNN File I/O** (`fegnnfileio.py`): Text, CSV, JSON-lines and config files.
* **FE-GNN Console** (`fegnnconsole.py`): Aligned text tables.
* **FE-GNN Experiments** (`fegnnexperiments.py`): Run configurations, ablations, sweeps and grids.
* **FE-GNN Command Line** (`fegnncli.py`): The `fegnn` command.

'''
__version__ = '0.1.0'

#___Library Information___
def getversion():
    '''Return the current version of FE-GNN Core.'''
    return __version__

#Make all modules accessible with the command `from fegnncore import *`
from .fegnngraph import *
from .fegnnfileio import *
from .fegnnfeatures import *
from .fegnnspectral import *
from .fegnnmodel import *
from .fegnnoptimize import *
from .fegnndiagnostics import *
from .fegnndata import *
from .fegnnconsole import *
from .fegnnexperiments import *
from .fegnncli import *
