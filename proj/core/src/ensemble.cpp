#include "nafs/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

#include "nafs/error.hpp"

namespace nafs {

const char* to_string(EnsembleStrategy s) {
  switch (s) {
    case EnsembleStrategy::kMean: return "mean";
    case EnsembleStrategy::kMax: return "max";
    case EnsembleStrategy::kConcat: return "concat";
  }
  return "?";
}

EnsembleStrategy ensemble_strategy_from_string(const std::string& s) {
  if (s == "mean") return EnsembleStrategy::kMean;
  if (s == "max") return EnsembleStrategy::kMax;
  if (s == "concat") return EnsembleStrategy::kConcat;
  throw ParamError("unknown ensemble strategy: " + s);
}

namespace {

void validate(const EnsembleConfig& ens) {
  if (ens.r_values.empty()) throw ParamError("ensemble needs at least one r value");
  std::set<double> distinct(ens.r_values.begin(), ens.r_values.end());
  if (distinct.size() != ens.r_values.size())
    throw ParamError("ensemble r values must be distinct");
}

FeatureMatrix pool(std::vector<FeatureMatrix> branches, std::span<const double> r_values,
                   EnsembleStrategy strategy, bool post_normalize) {
  const std::int64_t n = branches.front().rows();
  const std::int64_t f = branches.front().cols();
  for (const auto& b : branches) {
    if (b.rows() != n || b.cols() != f)
      throw DataError("internal error: ensemble branch shapes diverged");
  }

  // Mean accumulates in ascending-r order so the result is exactly
  // invariant under permutations of r_values; concat keeps the given order.
  std::vector<std::size_t> by_r(branches.size());
  for (std::size_t t = 0; t < by_r.size(); ++t) by_r[t] = t;
  std::sort(by_r.begin(), by_r.end(),
            [&](std::size_t a, std::size_t b) { return r_values[a] < r_values[b]; });

  FeatureMatrix z;
  switch (strategy) {
    case EnsembleStrategy::kMean: {
      z = FeatureMatrix(n, f, 0.0);
      for (std::size_t t : by_r) {
        const auto src = branches[t].data();
        auto dst = z.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
      }
      const double inv = 1.0 / static_cast<double>(branches.size());
      for (double& v : z.data()) v *= inv;
      break;
    }
    case EnsembleStrategy::kMax: {
      z = std::move(branches[by_r.front()]);
      for (std::size_t idx = 1; idx < by_r.size(); ++idx) {
        const auto src = branches[by_r[idx]].data();
        auto dst = z.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
      }
      break;
    }
    case EnsembleStrategy::kConcat: {
      z = FeatureMatrix(n, f * static_cast<std::int64_t>(branches.size()));
      for (std::size_t t = 0; t < branches.size(); ++t) {
        for (std::int64_t i = 0; i < n; ++i) {
          const auto src = branches[t].row(i);
          auto dst = z.row(i);
          std::copy(src.begin(), src.end(), dst.begin() + f * static_cast<std::int64_t>(t));
        }
      }
      break;
    }
  }
  if (post_normalize) z.l2_normalize_rows();
  return z;
}

}  // namespace

FeatureMatrix nafs_ensemble(const Graph& g, const FeatureMatrix& x,
                            const SmoothingConfig& cfg, const EnsembleConfig& ens) {
  validate(ens);
  const std::size_t branch_count = ens.r_values.size();
  std::vector<FeatureMatrix> branches(branch_count);

  if (ens.parallel_branches && branch_count > 1) {
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    workers.reserve(branch_count);
    for (std::size_t t = 0; t < branch_count; ++t) {
      workers.emplace_back([&, t] {
        try {
          branches[t] = nafs_single(g, x, ens.r_values[t], cfg);
        } catch (...) {
          std::scoped_lock lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t t = 0; t < branch_count; ++t)
      branches[t] = nafs_single(g, x, ens.r_values[t], cfg);
  }
  return pool(std::move(branches), ens.r_values, ens.strategy, ens.post_normalize);
}

PrefixEnsemble::PrefixEnsemble(const Graph& g, const FeatureMatrix& x,
                               const SmoothingConfig& cfg, const EnsembleConfig& ens)
    : ens_(ens) {
  validate(ens);
  branches_.reserve(ens.r_values.size());
  for (double r : ens.r_values) branches_.emplace_back(g, x, r, cfg);
}

int PrefixEnsemble::step() const { return branches_.front().step(); }

void PrefixEnsemble::advance() {
  for (auto& b : branches_) b.advance();
}

FeatureMatrix PrefixEnsemble::current() const {
  std::vector<FeatureMatrix> snapshots;
  snapshots.reserve(branches_.size());
  for (const auto& b : branches_) snapshots.push_back(b.current());
  return pool(std::move(snapshots), ens_.r_values, ens_.strategy, ens_.post_normalize);
}

}  // namespace nafs
