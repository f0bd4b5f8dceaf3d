import numpy as np
import numpy.typing as npt

# complex128 array of shape (2 ** n_qubits,), qubit k is bit k of the index
StateArray = npt.NDArray[np.complex128]

# float64 array of shape (n_params,)
ParamArray = npt.NDArray[np.float64]

# complex128 array of shape (2 ** n_qubits, 2 ** n_qubits)
DenseMatrix = npt.NDArray[np.complex128]

# bitstring (most significant qubit first) to probability
Distribution = dict[str, float]
