#include "radiogather/selectors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radiogather {

namespace {

const char* kind_name(SelectorKind k) {
  return k == SelectorKind::strong ? "strong" : "half";
}

std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

/// Per-label transmit masks over the family indices: bit i of mask(x) is set
/// iff x in S_i. All verification reduces to word-parallel mask algebra.
struct LabelMasks {
  std::size_t len;
  std::size_t words;
  std::vector<std::uint64_t> bits;  // n * words

  explicit LabelMasks(const SelectorFamily& f)
      : len(f.length()), words(words_for(f.length())), bits(static_cast<std::size_t>(f.n()) * words, 0) {
    for (std::size_t i = 0; i < f.length(); ++i) {
      const LabelSet& s = f.set(i);
      for (auto x = s.find_first(); x != LabelSet::npos; x = s.find_next(x))
        bits[x * words + i / 64] |= (1ULL << (i % 64));
    }
  }
  const std::uint64_t* mask(NodeId x) const { return bits.data() + static_cast<std::size_t>(x) * words; }
};

/// Number of size-1..k subsets of [n], saturating at cap.
long long count_subsets(int n, int k, long long cap) {
  long long total = 0;
  long long binom = 1;
  for (int m = 1; m <= k && m <= n; ++m) {
    if (binom > cap / (n - m + 1) + 1) return cap + 1;
    binom = binom * (n - m + 1) / m;
    if (binom > cap || total > cap - binom) return cap + 1;
    total += binom;
  }
  return total;
}

/// Word operations the exhaustive check would need, saturating at cap.
long long estimate_verify_ops(const SelectorFamily& f, long long cap) {
  const long long subsets = count_subsets(f.n(), f.k(), cap);
  if (subsets > cap) return cap + 1;
  const long long per = static_cast<long long>(f.k()) * f.k() *
                        static_cast<long long>(words_for(f.length()));
  if (per != 0 && subsets > cap / per) return cap + 1;
  return subsets * per;
}

/// Visits every subset X of [n] with 1 <= |X| <= k. The callback gets the
/// member list and returns false to stop early.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  std::vector<NodeId> idx;
  for (int m = 1; m <= k && m <= n; ++m) {
    idx.assign(m, 0);
    for (int i = 0; i < m; ++i) idx[i] = i;
    for (;;) {
      if (!fn(idx)) return;
      int i = m - 1;
      while (i >= 0 && idx[i] == n - m + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

/// Count of isolated elements of X; for strong verification the first
/// uncovered element is reported through `uncovered`.
int isolated_count(const LabelMasks& masks, const std::vector<NodeId>& x,
                   NodeId* uncovered) {
  const std::size_t w = masks.words;
  int isolated = 0;
  if (uncovered) *uncovered = -1;
  std::vector<std::uint64_t> others(w);
  for (std::size_t xi = 0; xi < x.size(); ++xi) {
    std::fill(others.begin(), others.end(), 0);
    for (std::size_t yi = 0; yi < x.size(); ++yi) {
      if (yi == xi) continue;
      const std::uint64_t* m = masks.mask(x[yi]);
      for (std::size_t j = 0; j < w; ++j) others[j] |= m[j];
    }
    const std::uint64_t* mx = masks.mask(x[xi]);
    bool iso = false;
    for (std::size_t j = 0; j < w; ++j)
      if (mx[j] & ~others[j]) {
        iso = true;
        break;
      }
    if (iso)
      ++isolated;
    else if (uncovered && *uncovered == -1)
      *uncovered = x[xi];
  }
  return isolated;
}

bool subset_ok(SelectorKind kind, const LabelMasks& masks, const std::vector<NodeId>& x,
               NodeId* uncovered) {
  int iso = isolated_count(masks, x, uncovered);
  if (kind == SelectorKind::strong) return iso == static_cast<int>(x.size());
  // half: at least ceil(|X|/2) isolated
  return iso >= static_cast<int>((x.size() + 1) / 2);
}

VerifyResult verify_exhaustive(const SelectorFamily& f, SelectorKind kind,
                               long long budget_ops) {
  VerifyResult res;
  res.exhaustive = true;
  if (estimate_verify_ops(f, budget_ops) > budget_ops) {
    res.status = VerifyResult::Status::infeasible;
    return res;
  }
  LabelMasks masks(f);
  res.status = VerifyResult::Status::pass;
  for_each_subset(f.n(), f.k(), [&](const std::vector<NodeId>& x) {
    ++res.work;
    NodeId uncovered = -1;
    if (!subset_ok(kind, masks, x, &uncovered)) {
      res.status = VerifyResult::Status::fail;
      res.witness_set = x;
      res.witness_x = kind == SelectorKind::strong ? uncovered : -1;
      return false;
    }
    return true;
  });
  return res;
}

std::vector<LabelSet> random_sets(int n, int k, std::size_t target_length, Seed seed) {
  std::mt19937_64 rng(seed);
  std::vector<LabelSet> sets(target_length, LabelSet(n));
  const double p = 1.0 / static_cast<double>(k);
  for (auto& s : sets)
    for (int x = 0; x < n; ++x)
      if (draw_unit(rng) < p) s.set(x);
  return sets;
}

std::vector<LabelSet> singleton_sets(int n, std::size_t target_length) {
  std::vector<LabelSet> sets(target_length, LabelSet(n));
  for (std::size_t i = 0; i < std::min<std::size_t>(n, target_length); ++i) sets[i].set(i);
  return sets;
}

std::vector<LabelSet> full_set(int n, std::size_t target_length) {
  std::vector<LabelSet> sets(target_length, LabelSet(n));
  if (!sets.empty()) sets[0].set();
  return sets;
}

SelectorFamily build_random(SelectorKind kind, int n, int k, std::size_t target_length,
                            Seed seed, const BuildOptions& opts) {
  if (k < 1 || k > n) throw std::invalid_argument("selector: need 1 <= k <= n");
  if (target_length < 1) throw std::invalid_argument("selector: target_length must be >= 1");
  if (k == 1 && !opts.force_random) {
    SelectorFamily f(n, k, kind, full_set(n, target_length));
    f.mark_checked(SelectorCheck::exact);
    return f;
  }
  if (opts.allow_singleton_fallback && !opts.force_random &&
      target_length >= static_cast<std::size_t>(n)) {
    SelectorFamily f(n, k, kind, singleton_sets(n, target_length));
    f.mark_checked(SelectorCheck::exact);
    return f;
  }
  return SelectorFamily(n, k, kind, random_sets(n, k, target_length, seed));
}

}  // namespace

SelectorFamily::SelectorFamily(int n, int k, SelectorKind kind, std::vector<LabelSet> sets)
    : n_(n), k_(k), kind_(kind), sets_(std::move(sets)), members_(n) {
  if (n < 1) throw std::invalid_argument("selector: n must be >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("selector: need 1 <= k <= n");
  for (auto& s : sets_) {
    if (s.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("selector: set universe mismatch");
  }
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    const LabelSet& s = sets_[i];
    for (auto x = s.find_first(); x != LabelSet::npos; x = s.find_next(x))
      members_[x].push_back(static_cast<std::int32_t>(i));
  }
}

bool SelectorFamily::schedule_transmits(NodeId node, Step step) const {
  if (sets_.empty()) return false;
  return sets_[static_cast<std::size_t>(step % static_cast<Step>(sets_.size()))].test(node);
}

const std::vector<std::int32_t>& SelectorFamily::member_indices(NodeId node) const {
  return members_[node];
}

Step SelectorFamily::next_transmit_step(NodeId node, Step from) const {
  const auto& idx = members_[node];
  if (idx.empty() || sets_.empty()) return kNeverStep;
  const Step len = static_cast<Step>(sets_.size());
  const auto phase = static_cast<std::int32_t>(from % len);
  auto it = std::lower_bound(idx.begin(), idx.end(), phase);
  if (it != idx.end()) return from + (*it - phase);
  return from + (len - phase) + idx.front();
}

std::string SelectorFamily::to_text() const {
  std::ostringstream os;
  os << kind_name(kind_) << ' ' << n_ << ' ' << k_ << ' ' << sets_.size() << '\n';
  for (const auto& s : sets_) {
    bool first = true;
    for (auto x = s.find_first(); x != LabelSet::npos; x = s.find_next(x)) {
      if (!first) os << ' ';
      os << x;
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

SelectorFamily SelectorFamily::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string kind_str;
  int n, k;
  std::size_t len;
  if (!(is >> kind_str >> n >> k >> len))
    throw std::invalid_argument("selector file: malformed header");
  SelectorKind kind;
  if (kind_str == "strong")
    kind = SelectorKind::strong;
  else if (kind_str == "half")
    kind = SelectorKind::half;
  else
    throw std::invalid_argument("selector file: unknown kind '" + kind_str + "'");
  std::string rest;
  std::getline(is, rest);  // finish header line
  std::vector<LabelSet> sets;
  sets.reserve(len);
  std::string line;
  while (sets.size() < len && std::getline(is, line)) {
    LabelSet s(n);
    std::istringstream ls(line);
    long x;
    while (ls >> x) {
      if (x < 0 || x >= n) throw std::invalid_argument("selector file: label out of range");
      s.set(x);
    }
    sets.push_back(std::move(s));
  }
  if (sets.size() != len) throw std::invalid_argument("selector file: truncated set list");
  return SelectorFamily(n, k, kind, std::move(sets));
}

void SelectorFamily::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << to_text();
}

SelectorFamily SelectorFamily::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_text(ss.str());
}

VerifyResult verify_strong_selector(const SelectorFamily& f, long long budget_subsets) {
  return verify_exhaustive(f, SelectorKind::strong, budget_subsets);
}

VerifyResult verify_half_selector(const SelectorFamily& f, long long budget_subsets) {
  return verify_exhaustive(f, SelectorKind::half, budget_subsets);
}

VerifyResult verify_sampled(const SelectorFamily& f, long long trials, Seed seed) {
  if (trials < 1) throw std::invalid_argument("verify_sampled: trials must be >= 1");
  VerifyResult res;
  res.exhaustive = false;
  res.status = VerifyResult::Status::pass;
  LabelMasks masks(f);
  std::mt19937_64 rng(seed);
  std::vector<NodeId> x;
  for (long long t = 0; t < trials; ++t) {
    ++res.work;
    int m = 1 + static_cast<int>(draw_below(rng, std::min(f.k(), f.n())));
    x.clear();
    while (static_cast<int>(x.size()) < m) {
      NodeId v = static_cast<NodeId>(draw_below(rng, f.n()));
      if (std::find(x.begin(), x.end(), v) == x.end()) x.push_back(v);
    }
    std::sort(x.begin(), x.end());
    NodeId uncovered = -1;
    if (!subset_ok(f.kind(), masks, x, &uncovered)) {
      res.status = VerifyResult::Status::fail;
      res.witness_set = x;
      res.witness_x = f.kind() == SelectorKind::strong ? uncovered : -1;
      return res;
    }
  }
  return res;
}

SelectorFamily build_strong_selector(int n, int k, std::size_t target_length, Seed seed,
                                     const BuildOptions& opts) {
  return build_random(SelectorKind::strong, n, k, target_length, seed, opts);
}

SelectorFamily build_half_selector(int n, int k, std::size_t target_length, Seed seed,
                                   const BuildOptions& opts) {
  return build_random(SelectorKind::half, n, k, target_length, seed, opts);
}

SelectorFamily build_checked_selector(SelectorKind kind, int n, int k,
                                      std::size_t target_length, Seed seed,
                                      const BuildOptions& opts) {
  if (k == 1) {
    SelectorFamily f(n, k, kind, full_set(n, target_length));
    f.mark_checked(SelectorCheck::exact);
    return f;
  }
  const bool feasible = [&] {
    const long long per = static_cast<long long>(k) * k *
                          static_cast<long long>((target_length + 63) / 64);
    const long long subsets = count_subsets(n, k, opts.budget_subsets);
    return subsets <= opts.budget_subsets && per != 0 &&
           subsets <= opts.budget_subsets / per;
  }();
  if (feasible) {
    for (int attempt = 0; attempt <= opts.max_resamples; ++attempt) {
      SelectorFamily f(n, k, kind,
                       random_sets(n, k, target_length, derive_seed(seed, attempt)));
      VerifyResult vr = kind == SelectorKind::strong
                            ? verify_strong_selector(f, opts.budget_subsets)
                            : verify_half_selector(f, opts.budget_subsets);
      if (vr.passed()) {
        f.mark_checked(SelectorCheck::exhaustive);
        return f;
      }
    }
    if (opts.allow_singleton_fallback && target_length >= static_cast<std::size_t>(n)) {
      SelectorFamily f(n, k, kind, singleton_sets(n, target_length));
      f.mark_checked(SelectorCheck::exact);
      return f;
    }
    throw ConfigError("selector: randomized construction kept failing verification");
  }
  if (opts.allow_singleton_fallback && target_length >= static_cast<std::size_t>(n)) {
    SelectorFamily f(n, k, kind, singleton_sets(n, target_length));
    f.mark_checked(SelectorCheck::exact);
    return f;
  }
  SelectorFamily f(n, k, kind, random_sets(n, k, target_length, seed));
  VerifyResult vr = verify_sampled(f, opts.sampled_trials, derive_seed(seed, 0x5a));
  if (!vr.passed())
    throw ConfigError("selector: sampled verification found a counterexample");
  f.mark_checked(SelectorCheck::sampled);
  return f;
}

std::size_t SelectorLadder::rung_length(int j) const {
  const std::size_t base = static_cast<std::size_t>(c) * log_n;
  if (kind == SelectorKind::strong) return base << (2 * j);  // c * 4^j * L
  return base << j;                                          // c * 2^j * L
}

namespace {

SelectorLadder build_ladder(SelectorKind kind, int n, int max_j, int c, Seed seed,
                            const BuildOptions& opts, bool strength_bump) {
  if (max_j < 0) throw std::invalid_argument("ladder: max_j must be >= 0");
  SelectorLadder ladder;
  ladder.n = n;
  ladder.kind = kind;
  ladder.c = c;
  ladder.log_n = log2_ceil(n);
  ladder.strength_bump = strength_bump;
  for (int j = 0; j <= max_j; ++j) {
    int k = 1 << j;
    if (strength_bump) k += 1;
    k = std::min(k, n);
    std::size_t len = ladder.rung_length(j);
    SelectorFamily f =
        build_checked_selector(kind, n, k, len, derive_seed(seed, 0x1add, j), opts);
    ladder.rungs.push_back(std::make_shared<SelectorFamily>(std::move(f)));
  }
  return ladder;
}

}  // namespace

SelectorLadder build_strong_ladder(int n, int max_j, int c_strong, Seed seed,
                                   const BuildOptions& opts, bool strength_bump) {
  return build_ladder(SelectorKind::strong, n, max_j, c_strong, seed, opts, strength_bump);
}

SelectorLadder build_half_ladder(int n, int max_j, int c_half, Seed seed,
                                 const BuildOptions& opts) {
  return build_ladder(SelectorKind::half, n, max_j, c_half, seed, opts, false);
}

}  // namespace radiogather
