#include "pulearn/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cfenv>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace pu {

long LabeledDataset::count_positive() const {
    return std::count(labels.begin(), labels.end(), 1);
}

void LabeledDataset::validate() const {
    if (features.rows() != static_cast<long>(labels.size()))
        throw std::invalid_argument("dataset: row count does not match label count");
    if (!features.allFinite())
        throw std::invalid_argument("dataset: non-finite feature value");
    for (int y : labels)
        if (y != 0 && y != 1) throw std::invalid_argument("dataset: label outside {0,1}");
}

// round-half-to-even, independent of the ambient FP rounding mode
static long round_half_even(double x) {
    double floor_x = std::floor(x);
    double frac = x - floor_x;
    if (frac > 0.5) return static_cast<long>(floor_x) + 1;
    if (frac < 0.5) return static_cast<long>(floor_x);
    long lo = static_cast<long>(floor_x);
    return (lo % 2 == 0) ? lo : lo + 1;
}

PUSplit make_pu_split(std::shared_ptr<const LabeledDataset> data, double r, uint64_t seed) {
    if (!data) throw std::invalid_argument("make_pu_split: null dataset");
    data->validate();
    if (r < 0.0 || r >= 1.0) throw std::invalid_argument("make_pu_split: r outside [0,1)");

    std::vector<int> pos, neg;
    for (long i = 0; i < data->rows(); ++i)
        (data->labels[i] == 1 ? pos : neg).push_back(static_cast<int>(i));
    if (pos.empty() || neg.empty()) throw std::invalid_argument("degenerate dataset");

    const long n_hidden = round_half_even(r * static_cast<double>(pos.size()));
    if (n_hidden >= static_cast<long>(pos.size()))
        throw std::invalid_argument("no labeled positives");

    // uniform sample of hidden positives: shuffle a copy, take a prefix
    std::vector<int> shuffled = pos;
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    PUSplit split;
    split.source = std::move(data);
    split.r = r;
    split.hidden_positive_idx.assign(shuffled.begin(), shuffled.begin() + n_hidden);
    std::sort(split.hidden_positive_idx.begin(), split.hidden_positive_idx.end());
    split.positive_idx.assign(shuffled.begin() + n_hidden, shuffled.end());
    std::sort(split.positive_idx.begin(), split.positive_idx.end());

    split.unlabeled_idx = neg;
    split.unlabeled_idx.insert(split.unlabeled_idx.end(), split.hidden_positive_idx.begin(),
                               split.hidden_positive_idx.end());
    std::sort(split.unlabeled_idx.begin(), split.unlabeled_idx.end());

    const double omega = static_cast<double>(split.omega());
    const double n_up = static_cast<double>(n_hidden);
    split.mu_p = n_up / omega;
    split.pi_u = split.unlabeled_idx.empty() ? 0.0 : n_up / static_cast<double>(split.unlabeled_idx.size());
    split.ratio_up_p = n_up / static_cast<double>(split.positive_idx.size());
    return split;
}

LabeledDataset gen_two_gaussians(long n_per_class, long d, double separation, uint64_t seed) {
    if (n_per_class < 1) throw std::invalid_argument("gen_two_gaussians: n_per_class < 1");
    if (d < 1) throw std::invalid_argument("gen_two_gaussians: d < 1");
    if (separation < 0.0) throw std::invalid_argument("gen_two_gaussians: negative separation");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    LabeledDataset ds;
    ds.features.resize(2 * n_per_class, d);
    ds.labels.assign(2 * n_per_class, 0);
    const double shift = separation / 2.0;
    for (long i = 0; i < n_per_class; ++i) {
        for (long j = 0; j < d; ++j) ds.features(i, j) = normal(rng);
        ds.features(i, 0) += shift;
        ds.labels[i] = 1;
    }
    for (long i = n_per_class; i < 2 * n_per_class; ++i) {
        for (long j = 0; j < d; ++j) ds.features(i, j) = normal(rng);
        ds.features(i, 0) -= shift;
    }
    return ds;
}

// ---------------------------------------------------------------------------
// delimited text

static bool parse_field_double(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0';
}

LabeledDataset load_delimited(const std::string& path, const std::set<long>& positive_classes) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_delimited: cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::vector<long> raw_labels;
    std::string line;
    long line_no = 0;
    long dim = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.push_back("");

        std::vector<double> vals(fields.size());
        bool numeric = true;
        for (size_t i = 0; i < fields.size(); ++i)
            if (!parse_field_double(fields[i], vals[i])) { numeric = false; break; }

        if (!numeric) {
            if (line_no == 1) continue; // header
            throw std::runtime_error("load_delimited: non-numeric field at line " +
                                     std::to_string(line_no));
        }
        if (fields.size() < 2)
            throw std::runtime_error("load_delimited: need at least one feature and a label at line " +
                                     std::to_string(line_no));
        if (dim == -1) dim = static_cast<long>(fields.size()) - 1;
        if (static_cast<long>(fields.size()) - 1 != dim)
            throw std::runtime_error("load_delimited: inconsistent field count at line " +
                                     std::to_string(line_no));

        double lbl = vals.back();
        if (lbl != std::floor(lbl))
            throw std::runtime_error("load_delimited: non-integer label at line " +
                                     std::to_string(line_no));
        raw_labels.push_back(static_cast<long>(lbl));
        vals.pop_back();
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error("load_delimited: no data rows in " + path);

    std::set<long> seen(raw_labels.begin(), raw_labels.end());
    for (long c : positive_classes)
        if (!seen.count(c))
            throw std::runtime_error("load_delimited: positive class " + std::to_string(c) +
                                     " not present in " + path);

    LabeledDataset ds;
    ds.features.resize(static_cast<long>(rows.size()), dim);
    ds.labels.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        for (long j = 0; j < dim; ++j) ds.features(static_cast<long>(i), j) = rows[i][j];
        ds.labels[i] = positive_classes.count(raw_labels[i]) ? 1 : 0;
    }
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------------------
// IDX image/label pairs (optionally gzip-compressed)

namespace {

// Reads a whole file through zlib's gz layer, which passes uncompressed
// data straight through, so plain and .gz files share one code path.
std::vector<unsigned char> read_binary(const std::string& path) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (!gz) throw std::runtime_error("idx: cannot open " + path);
    std::vector<unsigned char> data;
    unsigned char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof(buf))) > 0) data.insert(data.end(), buf, buf + n);
    bool bad = n < 0;
    gzclose(gz);
    if (bad) throw std::runtime_error("idx: decompression failed for " + path);
    return data;
}

uint32_t read_be32(const std::vector<unsigned char>& d, size_t off, const std::string& path) {
    if (off + 4 > d.size())
        throw std::runtime_error("idx parse error in " + path + " at byte " + std::to_string(off) +
                                 ": truncated");
    return (uint32_t(d[off]) << 24) | (uint32_t(d[off + 1]) << 16) | (uint32_t(d[off + 2]) << 8) |
           uint32_t(d[off + 3]);
}

} // namespace

LabeledDataset load_idx_pair(const std::string& images_path, const std::string& labels_path,
                             const std::set<long>& positive_classes) {
    const auto img = read_binary(images_path);
    const auto lbl = read_binary(labels_path);

    const uint32_t img_magic = read_be32(img, 0, images_path);
    if (img_magic != 0x00000803u) {
        std::ostringstream os;
        os << "idx parse error in " << images_path << " at byte 0: magic 0x" << std::hex
           << img_magic << " (expected 0x00000803)";
        throw std::runtime_error(os.str());
    }
    const uint32_t lbl_magic = read_be32(lbl, 0, labels_path);
    if (lbl_magic != 0x00000801u) {
        std::ostringstream os;
        os << "idx parse error in " << labels_path << " at byte 0: magic 0x" << std::hex
           << lbl_magic << " (expected 0x00000801)";
        throw std::runtime_error(os.str());
    }

    const uint32_t n = read_be32(img, 4, images_path);
    const uint32_t rows = read_be32(img, 8, images_path);
    const uint32_t cols = read_be32(img, 12, images_path);
    const uint32_t n_lbl = read_be32(lbl, 4, labels_path);
    if (n != n_lbl)
        throw std::runtime_error("idx: image count " + std::to_string(n) + " != label count " +
                                 std::to_string(n_lbl));

    const size_t pixels = size_t(rows) * cols;
    if (img.size() != 16 + size_t(n) * pixels)
        throw std::runtime_error("idx parse error in " + images_path + " at byte " +
                                 std::to_string(img.size()) + ": expected " +
                                 std::to_string(16 + size_t(n) * pixels) + " bytes");
    if (lbl.size() != 8 + size_t(n))
        throw std::runtime_error("idx parse error in " + labels_path + " at byte " +
                                 std::to_string(lbl.size()) + ": expected " +
                                 std::to_string(8 + size_t(n)) + " bytes");

    std::set<long> seen;
    for (size_t i = 0; i < n; ++i) seen.insert(lbl[8 + i]);
    for (long c : positive_classes)
        if (!seen.count(c))
            throw std::runtime_error("idx: positive class " + std::to_string(c) +
                                     " not present in " + labels_path);

    LabeledDataset ds;
    ds.features.resize(n, static_cast<long>(pixels));
    ds.labels.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const unsigned char* px = img.data() + 16 + i * pixels;
        for (size_t j = 0; j < pixels; ++j)
            ds.features(static_cast<long>(i), static_cast<long>(j)) = px[j] / 255.0;
        ds.labels[i] = positive_classes.count(lbl[8 + i]) ? 1 : 0;
    }
    return ds;
}

double perturb_mu_p(double mu_p, double delta) {
    if (mu_p < 0.0 || mu_p >= 1.0) throw std::invalid_argument("invalid prior");
    const double out = mu_p * (1.0 + delta);
    if (out < 0.0 || out >= 1.0) throw std::invalid_argument("invalid prior");
    return out;
}

} // namespace pu
