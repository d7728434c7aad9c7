from .extract import (LAYER_WIDTHS, ExtractionError, ExtractionSpec,
                      dump_activations)

__all__ = ["LAYER_WIDTHS", "ExtractionError", "ExtractionSpec",
           "dump_activations"]
