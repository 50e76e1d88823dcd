"""Effectful host layer around the pure core."""

from .runner import (DEFAULT_IMAGE_LIMIT, FUZZ_FUEL, ExitReason, ImageFormatError,
                     ImageTooLarge, ProgramImage, RunReport, StepViolation,
                     fuzz_one, load_image, read_image_file, run_program)

__all__ = [
    "DEFAULT_IMAGE_LIMIT", "FUZZ_FUEL", "ExitReason", "ImageFormatError",
    "ImageTooLarge", "ProgramImage", "RunReport", "StepViolation", "fuzz_one",
    "load_image", "read_image_file", "run_program",
]
