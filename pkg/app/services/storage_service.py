"""
Storage Service
Reads and writes the JSON files the command line works on: states,
spectra, density targets, qudit states and reports.

Complex numbers are stored as [re, im] pairs. Reports are written with
sorted keys so identical runs produce byte-identical output.
"""

import json
import logging
from pathlib import Path
from typing import Any, List, Sequence, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ValidationError, field_validator

from app.core.config import settings
from app.core.exceptions import MalformedFileError
from app.services.explorer import QuditState, validate_qudit_state
from app.services.spectra import Spectrum
from app.services.statevec import PureState, QubitDensity, validate_density, validate_state

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
FileModel = TypeVar("FileModel", bound=BaseModel)


# ============================================================================
# FILE MODELS
# ============================================================================

def _check_pairs(values: List[List[float]]) -> List[List[float]]:
    for entry in values:
        if len(entry) != 2:
            raise ValueError(f"complex entries are [re, im] pairs, got {entry}")
    return values


class StateFile(BaseModel):
    n: int
    amplitudes: List[List[float]]

    @field_validator("amplitudes")
    @classmethod
    def check_amplitudes(cls, values: List[List[float]]) -> List[List[float]]:
        return _check_pairs(values)


class SpectrumFile(BaseModel):
    lambdas: List[float]


class DensityTargetsFile(BaseModel):
    rhos: List[List[List[List[float]]]]

    @field_validator("rhos")
    @classmethod
    def check_two_by_two(cls, rhos: List[List[List[List[float]]]]) -> List[List[List[List[float]]]]:
        for rho in rhos:
            if len(rho) != 2 or any(len(row) != 2 for row in rho):
                raise ValueError("every target must be a 2x2 matrix")
            for row in rho:
                _check_pairs(row)
        return rhos


class QuditStateFile(BaseModel):
    d: int
    n: int
    amplitudes: List[List[float]]

    @field_validator("amplitudes")
    @classmethod
    def check_amplitudes(cls, values: List[List[float]]) -> List[List[float]]:
        return _check_pairs(values)


def to_pairs(values: Sequence[complex]) -> List[List[float]]:
    return [[float(np.real(z)), float(np.imag(z))] for z in values]


def from_pairs(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def matrix_to_pairs(matrix: np.ndarray) -> List[List[List[float]]]:
    return [to_pairs(row) for row in np.asarray(matrix)]


# ============================================================================
# SERVICE
# ============================================================================

class StorageService:
    """
    File access for every JSON format the package understands.

    Parse failures (invalid JSON, schema mismatches) surface as
    MalformedFileError; semantic failures (wrong length, norm) keep their
    own error class.
    """

    def _read(self, path: PathLike, model: Type[FileModel]) -> FileModel:
        try:
            raw = Path(path).read_text(encoding="utf-8")
            return model.model_validate(json.loads(raw))
        except FileNotFoundError:
            raise MalformedFileError(f"file not found: {path}")
        except json.JSONDecodeError as e:
            raise MalformedFileError(f"{path} is not valid JSON: {e}")
        except ValidationError as e:
            raise MalformedFileError(f"{path} does not match {model.__name__}: {e.error_count()} error(s)")

    def _write(self, path: PathLike, payload: Any) -> None:
        Path(path).write_text(self.dumps(payload) + "\n", encoding="utf-8")
        logger.info(f"💾 Wrote {path}")

    @staticmethod
    def dumps(payload: Any) -> str:
        """Stable JSON text for a model or plain data."""
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        return json.dumps(payload, sort_keys=True, indent=2)

    # ------------------------------------------------------------------ states

    def load_state(self, path: PathLike) -> PureState:
        """
        Read a state file; rejects a wrong length or a norm deviation above
        settings.file_norm_tolerance.
        """
        data = self._read(path, StateFile)
        return validate_state(from_pairs(data.amplitudes), data.n, tol=settings.file_norm_tolerance)

    def save_state(self, path: PathLike, state: PureState) -> None:
        self._write(path, StateFile(n=state.n, amplitudes=to_pairs(state.amplitudes)))

    def load_qudit_state(self, path: PathLike) -> QuditState:
        data = self._read(path, QuditStateFile)
        return validate_qudit_state(from_pairs(data.amplitudes), data.d, data.n, tol=settings.file_norm_tolerance)

    def save_qudit_state(self, path: PathLike, state: QuditState) -> None:
        self._write(path, QuditStateFile(d=state.d, n=state.n, amplitudes=to_pairs(state.amplitudes)))

    # ----------------------------------------------------------------- spectra

    def load_spectrum(self, path: PathLike) -> Spectrum:
        return Spectrum(lambdas=self._read(path, SpectrumFile).lambdas)

    def save_spectrum(self, path: PathLike, spectrum: Spectrum) -> None:
        self._write(path, SpectrumFile(lambdas=spectrum.lambdas))

    def load_density_targets(self, path: PathLike) -> List[QubitDensity]:
        """Read and validate one 2x2 density matrix per qubit."""
        data = self._read(path, DensityTargetsFile)
        targets = [QubitDensity(np.array([from_pairs(row) for row in rho])) for rho in data.rhos]
        for rho in targets:
            validate_density(rho)
        return targets

    def save_density_targets(self, path: PathLike, targets: Sequence[QubitDensity]) -> None:
        self._write(path, DensityTargetsFile(rhos=[matrix_to_pairs(rho.matrix) for rho in targets]))

    # ----------------------------------------------------------------- reports

    def write_report(self, path: PathLike, report: Any) -> None:
        self._write(path, report)


# Global service instance
storage_service = StorageService()
