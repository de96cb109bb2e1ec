"""
Matrix Image - PNG rendering of incidence matrices

One square cell per entry: background for 0, dark for 1 and a highlight
colour for entries above 1 (the columns that can never be selected).
"""

import logging

import numpy as np
from PIL import Image

from config.settings import IMAGE_CELL_SIZE, IMAGE_COLORS
from core.errors import FormatError

logger = logging.getLogger(__name__)


def matrix_to_image(entries, cell=IMAGE_CELL_SIZE, grid=True):
    """Pillow image of a 2-d integer array"""
    entries = np.asarray(entries)
    rgb = np.empty(entries.shape + (3,), dtype=np.uint8)
    rgb[...] = IMAGE_COLORS['background']
    rgb[entries == 1] = IMAGE_COLORS['one']
    rgb[entries > 1] = IMAGE_COLORS['many']
    scaled = np.repeat(np.repeat(rgb, cell, axis=0), cell, axis=1)
    if grid and cell > 2:
        scaled[::cell, :] = IMAGE_COLORS['grid']
        scaled[:, ::cell] = IMAGE_COLORS['grid']
    return Image.fromarray(scaled)


def save_matrix_image(A, path, cell=IMAGE_CELL_SIZE):
    image = matrix_to_image(A.entries, cell=cell)
    try:
        image.save(path, format='PNG')
    except OSError as e:
        raise FormatError(f"cannot write image: {e.strerror or e}", path) from e
    logger.info("wrote %dx%d matrix image to %s (%dx%d px)", A.shape[0], A.shape[1], path, *image.size)
    return image
