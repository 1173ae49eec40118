#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace esnevo {

/// One labeled pattern: a T x d sequence.
struct Pattern {
    Eigen::MatrixXd sequence;
    int label = 0;
};

using DatasetSplit = std::vector<Pattern>;

/// Labeled collection of fixed-length sequences with a train/test split.
struct Dataset {
    std::string name;
    DatasetSplit train;
    DatasetSplit test;
    int num_classes = 0;
    int seq_len = 0;   ///< T, shared by every pattern
    int input_dim = 0; ///< d

    /// Throws DataError when shapes or labels are inconsistent.
    void validate() const;
};

enum class DatasetFormat { ucr_csv, uci_csv };

/// UCR-style loader: each row is a class label followed by the T values of a
/// univariate sequence (d = 1); comma, tab or space separated. Labels are
/// remapped to contiguous 0-based ids by sorted order of the train labels.
Dataset load_dataset(const std::string& train_path, const std::string& test_path,
                     DatasetFormat format, const std::string& name = "");

/// Single-file loader for UCI-table data (breast cancer layout: id, 9
/// features, class). Features become a length-9, d = 1 sequence; '?' cells
/// are imputed with the column mean. A seeded shuffle splits train/test.
Dataset load_dataset_single(const std::string& path, DatasetFormat format,
                            double train_ratio, std::uint64_t split_seed,
                            const std::string& name = "");

/// Additive zero-mean Gaussian noise at the given SNR (dB). Noise variance is
/// P_signal / 10^(snr_db/10) with P_signal the mean squared value of the
/// split; train and test are perturbed independently. Deterministic per seed.
Dataset add_noise(const Dataset& data, double snr_db, std::uint64_t seed);

}  // namespace esnevo
