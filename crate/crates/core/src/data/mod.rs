//! Dataset acquisition: synthetic separable data, separator estimation for
//! real data, and MNIST in IDX format.

mod idx;
mod mnist;
mod separable;

pub use idx::{encode_idx_images, encode_idx_labels, load_idx, parse_idx_images, parse_idx_labels, IdxImages, RawMnist};
pub use mnist::{build_mnist_task, MnistSplit, MnistTask};
pub use separable::{estimate_separator, generate_separable, SeparableSpec};
