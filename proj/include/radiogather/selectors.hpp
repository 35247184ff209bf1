#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "radiogather/common.hpp"

namespace radiogather {

enum class SelectorKind { strong, half };

/// How a family's defining property has been established.
enum class SelectorCheck { none, sampled, exhaustive, exact };

/// Ordered family of label sets with a declared (n, k, kind) contract.
///
/// strong: every X subseteq [n] with |X| <= k has each x in X singled out by
/// some set (S_i cap X == {x}).
/// half: every such X has at least ceil(|X|/2) of its elements singled out.
class SelectorFamily {
 public:
  SelectorFamily(int n, int k, SelectorKind kind, std::vector<LabelSet> sets);

  int n() const { return n_; }
  int k() const { return k_; }
  SelectorKind kind() const { return kind_; }
  std::size_t length() const { return sets_.size(); }
  const LabelSet& set(std::size_t i) const { return sets_[i]; }
  const std::vector<LabelSet>& sets() const { return sets_; }

  bool verified() const { return check_ == SelectorCheck::exhaustive || check_ == SelectorCheck::exact; }
  SelectorCheck check() const { return check_; }
  void mark_checked(SelectorCheck c) { check_ = c; }

  /// True iff `node` is in S_{step mod length}; the transmit schedule the
  /// protocols run cyclically on global time.
  bool schedule_transmits(NodeId node, Step step) const;

  /// Indices i with node in S_i, ascending. Used for wake-step hints.
  const std::vector<std::int32_t>& member_indices(NodeId node) const;
  /// Smallest step s >= from with schedule_transmits(node, s); kNeverStep if none.
  Step next_transmit_step(NodeId node, Step from) const;

  std::string to_text() const;
  static SelectorFamily from_text(const std::string& text);
  void save(const std::string& path) const;
  static SelectorFamily load(const std::string& path);

 private:
  int n_, k_;
  SelectorKind kind_;
  std::vector<LabelSet> sets_;
  SelectorCheck check_ = SelectorCheck::none;
  std::vector<std::vector<std::int32_t>> members_;  // per label
};

using SelectorFamilyPtr = std::shared_ptr<const SelectorFamily>;

struct VerifyResult {
  enum class Status { pass, fail, infeasible };
  Status status = Status::pass;
  bool exhaustive = false;
  std::vector<NodeId> witness_set;  // violating X, when status == fail
  NodeId witness_x = -1;            // uncovered element (strong); -1 for a half-count failure
  long long work = 0;               // subsets examined

  bool passed() const { return status == Status::pass; }
};

/// Exhaustive check of the defining property over every X with |X| <= k.
/// Refuses (status infeasible) when the estimated word-operation count
/// exceeds `budget_ops`; it never silently passes.
VerifyResult verify_strong_selector(const SelectorFamily& f,
                                    long long budget_ops = 2'000'000'000);
VerifyResult verify_half_selector(const SelectorFamily& f,
                                  long long budget_ops = 2'000'000'000);

/// Monte Carlo check: draws `trials` uniform subsets of size <= k and tests
/// the property on each. pass here means "no counterexample found".
VerifyResult verify_sampled(const SelectorFamily& f, long long trials, Seed seed);

/// Options steering construction when a randomized family needs vetting.
struct BuildOptions {
  long long budget_subsets = 2'000'000'000;  // exhaustive-verification op budget
  int max_resamples = 16;
  long long sampled_trials = 100'000;
  bool allow_singleton_fallback = true;    // use the always-correct RoundRobin family
  bool force_random = false;               // never fall back (seed-sweep experiments)
};

/// Randomized construction: each set includes each label independently with
/// probability 1/k. Special cases: k == 1 returns the single full set (exactly
/// correct); when target_length >= n and the fallback is allowed the singleton
/// family {0},{1},... in RoundRobin order is returned (exactly correct for
/// every k). Other families carry check() == none until verified.
SelectorFamily build_strong_selector(int n, int k, std::size_t target_length, Seed seed,
                                     const BuildOptions& opts = {});
SelectorFamily build_half_selector(int n, int k, std::size_t target_length, Seed seed,
                                   const BuildOptions& opts = {});

/// Builds a family and vets it: exhaustive verification with resampling when
/// affordable, singleton fallback when the family is at least RoundRobin-long,
/// and a sampled check otherwise. Throws ConfigError if no usable family can
/// be produced.
SelectorFamily build_checked_selector(SelectorKind kind, int n, int k,
                                      std::size_t target_length, Seed seed,
                                      const BuildOptions& opts = {});

/// Family ladder indexed by j: strong rungs have k = 2^j and exact length
/// c * 4^j * ceil(log2 n); half rungs have k = 2^j and length c * 2^j * L.
/// Shorter constructed families are padded with empty sets, which single out
/// nothing and collide with nothing.
struct SelectorLadder {
  int n = 0;
  SelectorKind kind = SelectorKind::strong;
  int c = 16;               // the hidden constant (c_s or c_h)
  int log_n = 1;            // ceil(log2 n), >= 1
  bool strength_bump = false;
  std::vector<SelectorFamilyPtr> rungs;  // index j

  std::size_t rung_length(int j) const;
  const SelectorFamily& rung(int j) const { return *rungs[j]; }
  int max_j() const { return static_cast<int>(rungs.size()) - 1; }
};

/// Rung j gets strength 2^j, or 2^j + 1 when strength_bump is set (the
/// single-frequency no-SRT variant requests one extra unit of strength).
SelectorLadder build_strong_ladder(int n, int max_j, int c_strong, Seed seed,
                                   const BuildOptions& opts = {}, bool strength_bump = false);
SelectorLadder build_half_ladder(int n, int max_j, int c_half, Seed seed,
                                 const BuildOptions& opts = {});

}  // namespace radiogather
