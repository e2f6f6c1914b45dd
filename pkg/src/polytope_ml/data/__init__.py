"""Dataset generation, labelling and file formats."""
