#include "esnevo/dataset.hpp"

#include "esnevo/errors.hpp"
#include "esnevo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace esnevo {

void Dataset::validate() const {
    if (train.empty()) throw DataError("dataset '" + name + "' has an empty training split");
    if (num_classes < 1) throw DataError("dataset '" + name + "' has no classes");
    auto check = [&](const DatasetSplit& split, const char* which) {
        for (const auto& p : split) {
            if (p.sequence.rows() != seq_len || p.sequence.cols() != input_dim)
                throw DataError("dataset '" + name + "': ragged " + which + " pattern shapes");
            if (p.label < 0 || p.label >= num_classes)
                throw DataError("dataset '" + name + "': " + which + " label out of range");
        }
    };
    check(train, "train");
    check(test, "test");
}

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::vector<double>> parse_table(const std::string& path, bool allow_missing) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (char& ch : line)
            if (ch == ',' || ch == '\t' || ch == ';' || ch == '\r') ch = ' ';
        std::istringstream fields(line);
        std::vector<double> row;
        std::string tok;
        while (fields >> tok) {
            if (allow_missing && tok == "?") {
                row.push_back(kMissing);
                continue;
            }
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                row.push_back(v);
            } catch (const std::exception&) {
                throw DataError("non-numeric cell '" + tok + "' at " + path + ":" +
                                std::to_string(lineno));
            }
        }
        if (row.empty()) continue;  // blank line
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("ragged row at " + path + ":" + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("no data rows in '" + path + "'");
    return rows;
}

std::string stem_of(const std::string& path) {
    const auto slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    const auto dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

}  // namespace

Dataset load_dataset(const std::string& train_path, const std::string& test_path,
                     DatasetFormat format, const std::string& name) {
    if (format != DatasetFormat::ucr_csv)
        throw ConfigError("load_dataset(train, test): only ucr_csv takes a file pair");
    const auto train_rows = parse_table(train_path, /*allow_missing=*/false);
    const auto test_rows = parse_table(test_path, /*allow_missing=*/false);
    if (train_rows.front().size() < 2) throw DataError("ucr rows need a label plus values");
    if (test_rows.front().size() != train_rows.front().size())
        throw DataError("train and test rows have different lengths");

    std::map<double, int> label_ids;
    for (const auto& row : train_rows) label_ids.emplace(row[0], 0);
    int next = 0;
    for (auto& [raw, id] : label_ids) id = next++;

    Dataset data;
    data.name = name.empty() ? stem_of(train_path) : name;
    data.seq_len = static_cast<int>(train_rows.front().size()) - 1;
    data.input_dim = 1;
    data.num_classes = static_cast<int>(label_ids.size());

    auto to_split = [&](const std::vector<std::vector<double>>& rows, bool is_test) {
        DatasetSplit split;
        split.reserve(rows.size());
        for (const auto& row : rows) {
            const auto it = label_ids.find(row[0]);
            if (it == label_ids.end()) {
                if (is_test) throw DataError("unknown label in test split of '" + data.name + "'");
                continue;
            }
            Pattern p;
            p.label = it->second;
            p.sequence.resize(data.seq_len, 1);
            for (int t = 0; t < data.seq_len; ++t)
                p.sequence(t, 0) = row[static_cast<std::size_t>(t) + 1];
            split.push_back(std::move(p));
        }
        return split;
    };
    data.train = to_split(train_rows, false);
    data.test = to_split(test_rows, true);
    data.validate();
    return data;
}

Dataset load_dataset_single(const std::string& path, DatasetFormat format, double train_ratio,
                            std::uint64_t split_seed, const std::string& name) {
    if (format != DatasetFormat::uci_csv)
        throw ConfigError("load_dataset_single: only uci_csv takes a single file");
    if (!(train_ratio > 0.0) || !(train_ratio < 1.0))
        throw ConfigError("train_ratio must lie in (0, 1)");
    auto rows = parse_table(path, /*allow_missing=*/true);
    if (rows.front().size() < 3)
        throw DataError("uci rows need an id, at least one feature and a class");
    const std::size_t cols = rows.front().size();
    const std::size_t feat_begin = 1;           // first column is the sample id
    const std::size_t feat_end = cols - 1;      // last column is the class

    // impute '?' cells with the observed column mean
    for (std::size_t j = feat_begin; j < feat_end; ++j) {
        double sum = 0.0;
        std::size_t seen = 0;
        for (const auto& row : rows)
            if (!std::isnan(row[j])) {
                sum += row[j];
                ++seen;
            }
        if (seen == 0) throw DataError("feature column " + std::to_string(j) + " is entirely missing");
        const double mean = sum / static_cast<double>(seen);
        for (auto& row : rows)
            if (std::isnan(row[j])) row[j] = mean;
    }
    for (const auto& row : rows)
        if (std::isnan(row[0]) || std::isnan(row[cols - 1]))
            throw DataError("missing id or class cell in '" + path + "'");

    std::map<double, int> label_ids;
    for (const auto& row : rows) label_ids.emplace(row[cols - 1], 0);
    int next = 0;
    for (auto& [raw, id] : label_ids) id = next++;

    Dataset data;
    data.name = name.empty() ? stem_of(path) : name;
    data.seq_len = static_cast<int>(feat_end - feat_begin);
    data.input_dim = 1;
    data.num_classes = static_cast<int>(label_ids.size());

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(split_seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::clamp<long>(
        std::llround(train_ratio * static_cast<double>(rows.size())), 1,
        static_cast<long>(rows.size()) - 1));

    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& row = rows[order[i]];
        Pattern p;
        p.label = label_ids.at(row[cols - 1]);
        p.sequence.resize(data.seq_len, 1);
        for (int t = 0; t < data.seq_len; ++t)
            p.sequence(t, 0) = row[feat_begin + static_cast<std::size_t>(t)];
        (i < n_train ? data.train : data.test).push_back(std::move(p));
    }
    data.validate();
    return data;
}

Dataset add_noise(const Dataset& data, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw ConfigError("add_noise: snr_db must be finite");
    if (data.train.empty() && data.test.empty()) throw DataError("add_noise: empty dataset");

    Dataset noisy = data;
    const double power_ratio = std::pow(10.0, snr_db / 10.0);
    int split_index = 0;
    for (DatasetSplit* split : {&noisy.train, &noisy.test}) {
        const std::uint64_t split_seed = derive_seed(seed, static_cast<std::uint64_t>(split_index++));
        if (split->empty()) continue;
        double sum_sq = 0.0;
        std::int64_t count = 0;
        for (const auto& p : *split) {
            sum_sq += p.sequence.squaredNorm();
            count += p.sequence.size();
        }
        const double signal_power = sum_sq / static_cast<double>(count);
        const double sigma = std::sqrt(signal_power / power_ratio);
        if (sigma == 0.0) continue;  // silent split stays silent
        Rng rng(split_seed);
        std::normal_distribution<double> gauss(0.0, sigma);
        for (auto& p : *split)
            for (Eigen::Index r = 0; r < p.sequence.rows(); ++r)
                for (Eigen::Index c = 0; c < p.sequence.cols(); ++c)
                    p.sequence(r, c) += gauss(rng);
    }
    return noisy;
}

}  // namespace esnevo
