#pragma once

#include "pulearn/common.hpp"

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace pu {

/// Feature matrix with ground-truth binary labels. The truth is used only
/// for composing train/test splits and for scoring; training objectives
/// other than the supervised oracle never see it.
struct LabeledDataset {
    Matrix features;          // n x d
    std::vector<int> labels;  // 0/1, 1 = positive class

    long rows() const { return features.rows(); }
    long dim() const { return features.cols(); }
    long count_positive() const;

    /// Throws if shapes disagree, a value is non-finite, or a label is
    /// outside {0,1}.
    void validate() const;
};

/// The training-time view of a dataset: labeled positives P, the unlabeled
/// pool U (all true negatives plus the hidden positives U_p), and the
/// priors derived from the split.
///
/// mu_p  = |U_p| / (|P| + |U|)   -- hidden-positive mass over the whole sample
/// pi_u  = |U_p| / |U|           -- positive fraction inside the unlabeled pool
/// ratio_up_p = |U_p| / |P|      -- hidden-to-labeled ratio (drift identity)
struct PUSplit {
    std::shared_ptr<const LabeledDataset> source;
    std::vector<int> positive_idx;         // P
    std::vector<int> unlabeled_idx;        // U
    std::vector<int> hidden_positive_idx;  // U_p, subset of U
    double r = 0.0;      // fraction of the positive class moved into U
    double mu_p = 0.0;
    double pi_u = 0.0;
    double ratio_up_p = 0.0;

    long omega() const { return static_cast<long>(positive_idx.size() + unlabeled_idx.size()); }
};

/// Moves round(r * #positives) positives (chosen uniformly under `seed`)
/// into the unlabeled pool together with every negative row. Rounding is
/// half-to-even. Throws "degenerate dataset" when a class is empty and
/// "no labeled positives" when r would empty P.
PUSplit make_pu_split(std::shared_ptr<const LabeledDataset> data, double r, uint64_t seed);

/// Two isotropic unit-variance Gaussians, n rows per class, displaced by
/// +-separation/2 along the first axis. separation < 0 throws.
LabeledDataset gen_two_gaussians(long n_per_class, long d, double separation, uint64_t seed);

enum class DatasetFormat { DelimitedText, IdxImagePair };

/// Comma-separated text: d numeric fields then one integer class label per
/// line; a non-numeric first line is treated as a header and skipped.
/// Class labels in `positive_classes` map to 1, everything else to 0.
LabeledDataset load_delimited(const std::string& path, const std::set<long>& positive_classes);

/// IDX image/label pair (big-endian, magic 0x00000803 / 0x00000801).
/// Files may be gzip-compressed; byte offsets in parse errors refer to the
/// decompressed stream. Pixels are scaled to [0,1].
LabeledDataset load_idx_pair(const std::string& images_path, const std::string& labels_path,
                             const std::set<long>& positive_classes);

/// Relative perturbation mu_p * (1 + delta); throws "invalid prior" if the
/// input or the result leaves [0,1).
double perturb_mu_p(double mu_p, double delta);

} // namespace pu
