from .generators import (LabeledDataset, gen_arcs, gen_point_masses, gen_sandwich, gen_symmetric,
                         gen_wedges, read_dataset_csv, write_csv)
from .idx import load_idx_images, load_idx_labels, load_mnist
from .model_store import load_model, save_model
