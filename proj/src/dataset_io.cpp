#include "msqn/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msqn/error.hpp"

namespace msqn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

RawDataset assemble(const std::vector<std::vector<std::pair<Index, double>>>& rows,
                    const std::vector<double>& labels, Index dim) {
  RawDataset out;
  out.features = RowMatrix::Zero(static_cast<Index>(rows.size()), dim);
  out.labels.resize(static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [j, v] : rows[i]) out.features(static_cast<Index>(i), j) = v;
    out.labels(static_cast<Index>(i)) = labels[i];
  }
  return out;
}

}  // namespace

RawDataset parse_libsvm(std::istream& in) {
  std::vector<std::vector<std::pair<Index, double>>> rows;
  std::vector<double> labels;
  Index dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    std::istringstream tokens{std::string(body)};
    std::string tok;
    tokens >> tok;
    double label = 0.0;
    if (!parse_double(tok, label)) fail(lineno, "bad label '" + tok + "'");
    std::vector<std::pair<Index, double>> row;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail(lineno, "expected index:value, got '" + tok + "'");
      long long idx = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc() || ptr != tok.data() + colon || idx < 1) {
        fail(lineno, "bad feature index in '" + tok + "'");
      }
      double v = 0.0;
      if (!parse_double(std::string_view(tok).substr(colon + 1), v) || !std::isfinite(v)) {
        fail(lineno, "bad feature value in '" + tok + "'");
      }
      row.emplace_back(static_cast<Index>(idx - 1), v);
      dim = std::max(dim, static_cast<Index>(idx));
    }
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty()) throw InputError("empty dataset");
  if (dim == 0) throw InputError("dataset has no features");
  return assemble(rows, labels, dim);
}

RawDataset parse_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> values;
    bool numeric = true;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view field = rest.substr(0, comma);
      double v = 0.0;
      if (!parse_double(field, v) || !std::isfinite(v)) numeric = false;
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (first) {
      first = false;
      if (!numeric) {
        width = values.size();
        continue;
      }
    }
    if (!numeric) fail(lineno, "non-numeric field");
    if (width == 0) width = values.size();
    if (values.size() != width) {
      fail(lineno, "expected " + std::to_string(width) + " fields, got " +
                       std::to_string(values.size()));
    }
    if (width < 2) fail(lineno, "need at least one feature and a label");
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputError("empty dataset");
  RawDataset out;
  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(width) - 1;
  out.features.resize(n, d);
  out.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) out.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    out.labels(i) = rows[static_cast<std::size_t>(i)].back();
  }
  return out;
}

RawDataset read_dataset(const std::string& path, const std::string& format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  if (format == "csv") return parse_csv(in);
  if (format == "libsvm") return parse_libsvm(in);
  throw InputError("unknown format '" + format + "' (expected csv or libsvm)");
}

void standardize(RowMatrix& features) {
  const double n = static_cast<double>(features.rows());
  for (Index j = 0; j < features.cols(); ++j) {
    auto col = features.col(j);
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd > 0.0) {
      col /= sd;
    } else {
      col.setZero();
    }
  }
}

Vector binary_labels(const Vector& labels) {
  if (labels.size() == 0) throw InputError("no labels");
  const double lo = labels.minCoeff();
  const double hi = labels.maxCoeff();
  Vector out(labels.size());
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels(i) != lo && labels(i) != hi) {
      throw InputError("logistic loss needs two label values; row " + std::to_string(i + 1) +
                       " has a third");
    }
    out(i) = labels(i) == hi && hi != lo ? 1.0 : -1.0;
  }
  return out;
}

Loss parse_loss(const std::string& name) {
  if (name == "square") return Loss::Square;
  if (name == "logistic") return Loss::Logistic;
  throw InvalidArgument("unknown loss '" + name + "' (expected square or logistic)");
}

RegressionObjective ingest(const RawDataset& raw, Loss loss, double tau) {
  RowMatrix features = raw.features;
  standardize(features);
  Vector labels = loss == Loss::Logistic ? binary_labels(raw.labels) : raw.labels;
  return RegressionObjective(std::move(features), std::move(labels), loss, tau);
}

RegressionObjective ingest(const std::string& path, const std::string& format, Loss loss,
                           double tau) {
  return ingest(read_dataset(path, format), loss, tau);
}

void emit_csv(const RowMatrix& features, const Vector& labels, std::ostream& out) {
  if (features.rows() != labels.size()) throw DimensionMismatch("emit: rows and labels differ");
  char buf[32];
  for (Index i = 0; i < features.rows(); ++i) {
    for (Index j = 0; j < features.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", features(i, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", labels(i));
    out << buf << '\n';
  }
}

}  // namespace msqn
