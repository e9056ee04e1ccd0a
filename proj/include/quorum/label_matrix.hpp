#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "quorum/error.hpp"

namespace quorum {

// One observed label: labeler `labeler` assigned `label` to some item.
struct label_entry {
  int labeler = 0;
  int label = 0;
  bool operator==(const label_entry&) const = default;
};

// (item, labeler, label) row as it appears in a labels file.
struct label_triple {
  int item = 0;
  int labeler = 0;
  int label = 0;
  bool operator==(const label_triple&) const = default;
};

// Sparse labeler-by-item assignment. Labelers are 1..L, items 1..N, labels
// 1..K. A missing label is represented by absence, never by a stored zero.
// Immutable after construction; safe to share across concurrent readers.
class label_matrix {
 public:
  // Builds from rows. L and N are the maximum observed ids; K is the maximum
  // observed label unless `forced_classes` > 0 pins it, in which case any
  // label above it is rejected. `forced_items` can raise N above the maximum
  // observed id (items known to exist but unlabeled by everyone).
  explicit label_matrix(const std::vector<label_triple>& rows,
                        int forced_classes = 0, int forced_items = 0) {
    if (rows.empty()) throw domain_error("no labels");
    for (const auto& r : rows) {
      if (r.item < 1) throw domain_error("item id must be >= 1");
      if (r.labeler < 1) throw domain_error("labeler id must be >= 1");
      if (r.label < 1) throw domain_error("label must be >= 1");
      if (forced_classes > 0 && r.label > forced_classes)
        throw domain_error("label " + std::to_string(r.label) +
                           " outside forced class range 1.." +
                           std::to_string(forced_classes));
      labelers_ = std::max(labelers_, r.labeler);
      items_ = std::max(items_, r.item);
      classes_ = std::max(classes_, r.label);
    }
    if (forced_classes > 0) classes_ = forced_classes;
    items_ = std::max(items_, forced_items);
    by_item_.resize(items_);
    for (const auto& r : rows)
      by_item_[r.item - 1].push_back({r.labeler, r.label});
    for (int j = 0; j < items_; ++j) {
      auto& v = by_item_[j];
      std::sort(v.begin(), v.end(), [](const label_entry& a, const label_entry& b) {
        return a.labeler < b.labeler;
      });
      for (std::size_t t = 1; t < v.size(); ++t)
        if (v[t].labeler == v[t - 1].labeler)
          throw duplicate_error("duplicate label for item " +
                                std::to_string(j + 1) + ", labeler " +
                                std::to_string(v[t].labeler));
      entry_count_ += v.size();
    }
  }

  int labelers() const { return labelers_; }
  int items() const { return items_; }
  int classes() const { return classes_; }
  std::size_t entry_count() const { return entry_count_; }

  // Labels observed for item j, sorted by labeler id.
  const std::vector<label_entry>& item_entries(int item) const {
    check_item(item);
    return by_item_[item - 1];
  }

  // x_ij, or 0 when labeler i did not label item j.
  int label(int labeler, int item) const {
    check_item(item);
    if (labeler < 1 || labeler > labelers_)
      throw domain_error("labeler out of range");
    const auto& v = by_item_[item - 1];
    auto it = std::lower_bound(
        v.begin(), v.end(), labeler,
        [](const label_entry& e, int i) { return e.labeler < i; });
    return (it != v.end() && it->labeler == labeler) ? it->label : 0;
  }

  // Length-L view for a focal class: +1 where x_ij = k, -1 where the labeler
  // chose another class, 0 where unlabeled.
  std::vector<double> signed_view(int item, int focal_class) const {
    check_item(item);
    check_class(focal_class);
    std::vector<double> v(labelers_, 0.0);
    for (const auto& e : by_item_[item - 1])
      v[e.labeler - 1] = (e.label == focal_class) ? 1.0 : -1.0;
    return v;
  }

  // Length-K*L view; block i holds the one-hot encoding of labeler i's label,
  // all zero when the labeler abstained.
  std::vector<double> one_hot_view(int item) const {
    check_item(item);
    std::vector<double> v(std::size_t(classes_) * labelers_, 0.0);
    for (const auto& e : by_item_[item - 1])
      v[std::size_t(e.labeler - 1) * classes_ + (e.label - 1)] = 1.0;
    return v;
  }

  // Same entries with the class count raised; lowering is rejected.
  label_matrix with_classes(int classes) const {
    label_matrix m = *this;
    if (classes < m.classes_)
      throw domain_error("cannot lower the class count");
    m.classes_ = classes;
    return m;
  }

  std::vector<label_triple> rows() const {
    std::vector<label_triple> out;
    out.reserve(entry_count_);
    for (int j = 1; j <= items_; ++j)
      for (const auto& e : by_item_[j - 1]) out.push_back({j, e.labeler, e.label});
    return out;
  }

 private:
  void check_item(int item) const {
    if (item < 1 || item > items_) throw domain_error("item out of range");
  }
  void check_class(int k) const {
    if (k < 1 || k > classes_) throw domain_error("class out of range");
  }

  int labelers_ = 0;
  int items_ = 0;
  int classes_ = 0;
  std::size_t entry_count_ = 0;
  std::vector<std::vector<label_entry>> by_item_;
};

// True label y_j for the items where it is known.
class gold_labels {
 public:
  gold_labels() = default;
  explicit gold_labels(const std::vector<std::pair<int, int>>& items) {
    for (auto [item, label] : items) {
      if (item < 1) throw domain_error("item id must be >= 1");
      if (label < 1) throw domain_error("gold label must be >= 1");
      if (!labels_.emplace(item, label).second)
        throw duplicate_error("duplicate gold label for item " +
                              std::to_string(item));
    }
  }

  bool has(int item) const { return labels_.count(item) != 0; }
  int at(int item) const {
    auto it = labels_.find(item);
    if (it == labels_.end())
      throw domain_error("no gold label for item " + std::to_string(item));
    return it->second;
  }
  std::size_t size() const { return labels_.size(); }
  int max_label() const {
    int k = 0;
    for (const auto& [item, label] : labels_) k = std::max(k, label);
    return k;
  }
  // Sorted by item id.
  const std::map<int, int>& entries() const { return labels_; }

 private:
  std::map<int, int> labels_;
};

// Result of densely renumbering sparse file ids. new id n maps back to
// item_ids[n-1] / labeler_ids[n-1].
struct compaction {
  label_matrix matrix;
  gold_labels gold;
  std::vector<int> item_ids;
  std::vector<int> labeler_ids;
  bool identity = true;
};

// Renumbers labeler ids and the union of matrix and gold item ids densely,
// preserving order. Real datasets carry gapped ids; algorithms here index
// 1..L and 1..N, so gap removal keeps those loops tight. The returned maps
// record the original ids.
inline compaction compact_ids(const label_matrix& m, const gold_labels& gold) {
  std::vector<int> item_ids, labeler_ids;
  {
    std::vector<bool> item_seen(m.items() + 1, false);
    std::vector<bool> labeler_seen(m.labelers() + 1, false);
    for (int j = 1; j <= m.items(); ++j)
      for (const auto& e : m.item_entries(j)) {
        item_seen[j] = true;
        labeler_seen[e.labeler] = true;
      }
    int max_item = m.items();
    for (const auto& [item, label] : gold.entries())
      max_item = std::max(max_item, item);
    item_seen.resize(max_item + 1, false);
    for (const auto& [item, label] : gold.entries()) item_seen[item] = true;
    for (int j = 1; j < int(item_seen.size()); ++j)
      if (item_seen[j]) item_ids.push_back(j);
    for (int i = 1; i < int(labeler_seen.size()); ++i)
      if (labeler_seen[i]) labeler_ids.push_back(i);
  }
  std::map<int, int> item_new, labeler_new;
  for (int n = 0; n < int(item_ids.size()); ++n) item_new[item_ids[n]] = n + 1;
  for (int n = 0; n < int(labeler_ids.size()); ++n)
    labeler_new[labeler_ids[n]] = n + 1;

  std::vector<label_triple> rows;
  for (const auto& r : m.rows())
    rows.push_back({item_new.at(r.item), labeler_new.at(r.labeler), r.label});
  std::vector<std::pair<int, int>> gold_rows;
  for (const auto& [item, label] : gold.entries())
    gold_rows.push_back({item_new.at(item), label});

  bool identity = int(item_ids.size()) == m.items() &&
                  int(labeler_ids.size()) == m.labelers();
  for (int n = 0; identity && n < int(item_ids.size()); ++n)
    identity = item_ids[n] == n + 1;
  for (int n = 0; identity && n < int(labeler_ids.size()); ++n)
    identity = labeler_ids[n] == n + 1;

  return {label_matrix(rows, m.classes(), int(item_ids.size())),
          gold_labels(gold_rows), std::move(item_ids), std::move(labeler_ids),
          identity};
}

}  // namespace quorum
