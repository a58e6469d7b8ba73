#pragma once

// Confusion matrices in the reporting orientation used throughout: rows are
// the classification result, columns the expected class.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbs/error.hpp"
#include "mbs/feature_classifier.hpp"
#include "mbs/text.hpp"

namespace mbs {

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> labels)
      : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {}

  // counts[predicted][expected], row-major.
  ConfusionMatrix(std::vector<std::string> labels, const std::vector<std::vector<long>>& counts)
      : ConfusionMatrix(std::move(labels)) {
    if (counts.size() != labels_.size()) throw Error(Errc::invalid_argument, "count rows must match labels");
    for (std::size_t p = 0; p < counts.size(); ++p) {
      if (counts[p].size() != labels_.size()) throw Error(Errc::invalid_argument, "count columns must match labels");
      for (std::size_t e = 0; e < counts[p].size(); ++e) {
        if (counts[p][e] < 0) throw Error(Errc::invalid_argument, "counts must be non-negative");
        at(p, e) = counts[p][e];
      }
    }
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

  long& at(std::size_t predicted, std::size_t expected) { return counts_[predicted * size() + expected]; }
  long at(std::size_t predicted, std::size_t expected) const { return counts_[predicted * size() + expected]; }

  std::size_t index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return i;
    }
    throw Error(Errc::unknown_label, "label '" + std::string(label) + "' not in matrix");
  }

  long total() const {
    long t = 0;
    for (long c : counts_) t += c;
    return t;
  }
  long diagonal() const {
    long d = 0;
    for (std::size_t i = 0; i < size(); ++i) d += at(i, i);
    return d;
  }
  long column_total(std::size_t expected) const {
    long t = 0;
    for (std::size_t p = 0; p < size(); ++p) t += at(p, expected);
    return t;
  }
  long row_total(std::size_t predicted) const {
    long t = 0;
    for (std::size_t e = 0; e < size(); ++e) t += at(predicted, e);
    return t;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<long> counts_;
};

struct Outcome {
  std::string expected;
  std::string predicted;
};

inline ConfusionMatrix build_confusion(std::span<const Outcome> pairs, std::vector<std::string> labels) {
  ConfusionMatrix m(std::move(labels));
  for (const auto& p : pairs) m.at(m.index_of(p.predicted), m.index_of(p.expected)) += 1;
  return m;
}

// Percentage of all tallies on the diagonal.
inline double overall_accuracy(const ConfusionMatrix& m) {
  const long total = m.total();
  if (total <= 0) throw Error(Errc::empty_matrix, "matrix has no tallies");
  return 100.0 * static_cast<double>(m.diagonal()) / static_cast<double>(total);
}

inline double per_class_rate(const ConfusionMatrix& m, std::string_view label) {
  const std::size_t i = m.index_of(label);
  const long col = m.column_total(i);
  if (col <= 0) throw Error(Errc::empty_column, "no expected samples of '" + std::string(label) + "'");
  return 100.0 * static_cast<double>(m.at(i, i)) / static_cast<double>(col);
}

// Classifies every row against the rest of the corpus. `classify` is called
// as classify(point, training_set) and returns a Ranking.
template <std::size_t Dim, class Classifier>
ConfusionMatrix leave_one_out(const BasicTrainingSet<Dim>& corpus, Classifier&& classify) {
  if (corpus.empty()) throw Error(Errc::insufficient_rows, "empty corpus");
  for (std::size_t c = 0; const auto n : corpus.class_counts()) {
    if (n < 2) throw Error(Errc::insufficient_rows, "class '" + corpus.classes()[c] + "' has fewer than 2 rows");
    ++c;
  }
  std::vector<Outcome> pairs;
  pairs.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto rest = corpus.without_row(i);
    const Ranking r = classify(corpus.rows()[i].x, rest);
    pairs.push_back({corpus.label_of(i), r.top().label});
  }
  return build_confusion(pairs, corpus.classes());
}

// Each test row against the whole training set.
template <std::size_t Dim, class Classifier>
ConfusionMatrix evaluate_split(const BasicTrainingSet<Dim>& train, const BasicTrainingSet<Dim>& test,
                               Classifier&& classify) {
  std::vector<std::string> labels = train.classes();
  for (const auto& l : test.classes()) {
    if (!train.find_class(l)) labels.push_back(l);
  }
  std::vector<Outcome> pairs;
  for (std::size_t i = 0; i < test.size(); ++i) {
    pairs.push_back({test.label_of(i), classify(test.rows()[i].x, train).top().label});
  }
  return build_confusion(pairs, std::move(labels));
}

// `# rows=predicted cols=expected`, a label row, one count row per
// predicted class, then `accuracy,<pct>`.
inline std::string format_matrix_report(const ConfusionMatrix& m) {
  std::string out = "# rows=predicted cols=expected\n";
  out += "label";
  for (const auto& l : m.labels()) out += ',' + l;
  out += '\n';
  for (std::size_t p = 0; p < m.size(); ++p) {
    out += m.labels()[p];
    for (std::size_t e = 0; e < m.size(); ++e) out += ',' + std::to_string(m.at(p, e));
    out += '\n';
  }
  out += "accuracy," + text::format_fixed(overall_accuracy(m), 2) + '\n';
  return out;
}

inline ConfusionMatrix parse_matrix_report(std::string_view contents) {
  std::vector<std::string> labels;
  std::vector<std::vector<long>> rows;
  bool saw_orientation = false;
  for (const auto& raw : text::lines(contents)) {
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line == "# rows=predicted cols=expected") saw_orientation = true;
      continue;
    }
    const auto c = text::split(line, ',');
    if (c[0] == "label") {
      labels.assign(c.begin() + 1, c.end());
    } else if (c[0] == "accuracy") {
      continue;
    } else {
      if (labels.empty() || rows.size() >= labels.size() || c.size() != labels.size() + 1 || c[0] != labels[rows.size()]) {
        throw Error(Errc::parse_error, "malformed matrix row '" + std::string(line) + "'");
      }
      std::vector<long> row;
      for (std::size_t i = 1; i < c.size(); ++i) row.push_back(static_cast<long>(text::parse_int(c[i])));
      rows.push_back(std::move(row));
    }
  }
  if (!saw_orientation) throw Error(Errc::parse_error, "missing orientation header");
  return ConfusionMatrix(std::move(labels), rows);
}

}  // namespace mbs
