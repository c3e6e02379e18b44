//! Pajek files, CSV tables and SVG.

mod pajek;
mod svg;
mod tables;

pub use pajek::{
    quote_label, read_pajek_net, write_pajek_matrix, write_pajek_net, write_partition_clu,
    write_vector_vec, ParsedNet,
};
pub use svg::{palette_color, write_svg, CANVAS, MAX_STROKE, PALETTE};
pub use tables::{
    eigenvalues_csv, frames_csv, labels_csv, loadings_csv, loadings_display_csv, matrix_csv,
    read_frames_csv, read_labels_csv, read_matrix_csv, reliability_csv, similarity_csv,
    variance_csv, wordstats_csv,
};
