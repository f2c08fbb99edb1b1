#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "causaldr/errors.hpp"
#include "causaldr/psmodels.hpp"
#include "causaldr/rng.hpp"

namespace causaldr::psmodels {

namespace {

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int vote = 0;
};

// Classification trees on bootstrap resamples, splits by Gini impurity over
// a random feature subset. Samples with value <= threshold go left; split
// points sit only between distinct adjacent values, so tree structure does
// not depend on how ties are ordered. Thresholds are midpoints, clamped so
// rounding can never move the partition off the scored split position.
class TreeBuilder {
 public:
  TreeBuilder(const linalg::Matrix& f, const std::vector<int>& a,
              const ForestParams& params, rng::Stream& stream)
      : f_(f), a_(a), params_(params), stream_(stream), feat_order_(f.cols()) {
    std::iota(feat_order_.begin(), feat_order_.end(), 0);
    mtry_ = params.mtry > 0
                ? std::min<std::size_t>(params.mtry, f.cols())
                : std::max<std::size_t>(1, static_cast<std::size_t>(
                                               std::floor(std::sqrt(double(f.cols())))));
  }

  // in_bag[i] is set for every subject drawn into this tree's resample.
  std::vector<Node> build(std::vector<char>& in_bag) {
    const std::size_t n = f_.rows();
    idx_.resize(n);
    in_bag.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      idx_[i] = static_cast<int>(stream_.next_index(n));
      in_bag[idx_[i]] = 1;
    }
    nodes_.clear();
    grow(0, n, 0);
    return std::move(nodes_);
  }

 private:
  int leaf(std::size_t treated, std::size_t m) {
    Node node;
    node.vote = 2 * treated > m ? 1 : 0;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
  }

  int grow(std::size_t lo, std::size_t hi, int depth) {
    const std::size_t m = hi - lo;
    std::size_t treated = 0;
    for (std::size_t i = lo; i < hi; ++i) treated += static_cast<std::size_t>(a_[idx_[i]]);

    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);
    const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
    if (treated == 0 || treated == m || m < 2 * min_leaf || depth_capped)
      return leaf(treated, m);

    // Maximizing sum over children of (t^2 + (m-t)^2)/m is equivalent to
    // minimizing Gini-weighted impurity.
    const double parent_score =
        (double(treated) * treated + double(m - treated) * (m - treated)) / double(m);
    double best_score = parent_score + 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;

    for (std::size_t j = 0; j < mtry_; ++j) {
      const std::size_t pick = j + stream_.next_index(feat_order_.size() - j);
      std::swap(feat_order_[j], feat_order_[pick]);
      const int feat = feat_order_[j];

      scratch_.clear();
      for (std::size_t i = lo; i < hi; ++i)
        scratch_.emplace_back(f_(idx_[i], feat), a_[idx_[i]]);
      std::sort(scratch_.begin(), scratch_.end());

      std::size_t left_t = 0;
      for (std::size_t s = 1; s < m; ++s) {
        left_t += static_cast<std::size_t>(scratch_[s - 1].second);
        if (s < min_leaf || m - s < min_leaf) continue;
        if (scratch_[s - 1].first == scratch_[s].first) continue;
        const std::size_t right_t = treated - left_t;
        const double score =
            (double(left_t) * left_t + double(s - left_t) * (s - left_t)) / double(s) +
            (double(right_t) * right_t + double(m - s - right_t) * (m - s - right_t)) /
                double(m - s);
        if (score > best_score) {
          best_score = score;
          best_feature = feat;
          const double lo_val = scratch_[s - 1].first;
          const double hi_val = scratch_[s].first;
          double threshold = lo_val + 0.5 * (hi_val - lo_val);
          if (threshold >= hi_val) threshold = lo_val;
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) return leaf(treated, m);

    const auto mid = std::partition(idx_.begin() + lo, idx_.begin() + hi,
                                    [&](int i) { return f_(i, best_feature) <= best_threshold; });
    const auto split = static_cast<std::size_t>(mid - idx_.begin());

    Node node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    nodes_.push_back(node);
    const auto self = static_cast<int>(nodes_.size() - 1);
    nodes_[self].left = grow(lo, split, depth + 1);
    const int right = grow(split, hi, depth + 1);
    nodes_[self].right = right;
    return self;
  }

  const linalg::Matrix& f_;
  const std::vector<int>& a_;
  const ForestParams& params_;
  rng::Stream& stream_;
  std::vector<int> feat_order_;
  std::size_t mtry_;
  std::vector<int> idx_;
  std::vector<Node> nodes_;
  std::vector<std::pair<double, int>> scratch_;
};

int predict_vote(const std::vector<Node>& tree, const double* row) {
  int at = 0;
  while (tree[at].feature >= 0)
    at = row[tree[at].feature] <= tree[at].threshold ? tree[at].left : tree[at].right;
  return tree[at].vote;
}

}  // namespace

ForestFit fit_random_forest(const linalg::Matrix& f, const std::vector<int>& a,
                            std::uint64_t seed, const ForestParams& params) {
  params.validate();
  const std::size_t n = f.rows();
  if (a.size() != n) throw ShapeError("fit_random_forest: label length mismatch");
  if (f.cols() == 0) throw ShapeError("fit_random_forest: needs at least one feature");
  std::size_t treated = 0;
  for (int v : a) treated += static_cast<std::size_t>(v);
  if (treated == 0 || treated == n)
    throw ContractError("fit_random_forest: both arms must be non-empty");

  std::vector<int> votes(n, 0);
  std::vector<int> counted(n, 0);
  std::vector<char> in_bag;
  for (int t = 0; t < params.trees; ++t) {
    rng::Stream stream = rng::derive_stream(seed, {rng::tag::kForest, std::uint64_t(t)});
    TreeBuilder builder(f, a, params, stream);
    const std::vector<Node> tree = builder.build(in_bag);
    for (std::size_t i = 0; i < n; ++i) {
      if (params.oob_votes && in_bag[i]) continue;
      votes[i] += predict_vote(tree, f.row(i));
      ++counted[i];
    }
  }

  ForestFit fit;
  fit.probs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // A subject in every bag has no out-of-bag trees; fall back to the
    // class prior so the probability stays defined.
    fit.probs[i] = counted[i] > 0
                       ? static_cast<double>(votes[i]) / static_cast<double>(counted[i])
                       : static_cast<double>(treated) / static_cast<double>(n);
  }
  return fit;
}

}  // namespace causaldr::psmodels
