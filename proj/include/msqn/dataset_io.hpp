#pragma once

#include <iosfwd>
#include <string>

#include "msqn/objectives.hpp"

namespace msqn {

struct RawDataset {
  RowMatrix features;
  Vector labels;
};

/// "<label> <i>:<v> ..." with 1-based indices; the dimension is the largest
/// index seen.
RawDataset parse_libsvm(std::istream& in);
/// Comma-separated, last column is the label; a non-numeric first row is
/// taken as a header.
RawDataset parse_csv(std::istream& in);
/// format: csv or libsvm. Throws InputError for unreadable or malformed files.
RawDataset read_dataset(const std::string& path, const std::string& format);

/// Zero mean and unit population variance per column; constant columns
/// become zero.
void standardize(RowMatrix& features);

/// Two distinct label values mapped to −1 (lower) and +1 (higher).
Vector binary_labels(const Vector& labels);

Loss parse_loss(const std::string& name);

/// Parse, standardize and (for the logistic loss) remap labels.
RegressionObjective ingest(const std::string& path, const std::string& format, Loss loss,
                           double tau = 0.0);
RegressionObjective ingest(const RawDataset& raw, Loss loss, double tau = 0.0);

/// CSV with 17 significant digits, label last.
void emit_csv(const RowMatrix& features, const Vector& labels, std::ostream& out);

}  // namespace msqn
