#include "crfem/multiindex.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace crfem {

IndexSet::IndexSet(std::vector<int> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  auto dup = std::adjacent_find(labels_.begin(), labels_.end());
  if (dup != labels_.end())
    throw std::invalid_argument("duplicate label in index set");
}

IndexSet IndexSet::range(int count) {
  std::vector<int> l(count);
  std::iota(l.begin(), l.end(), 0);
  return IndexSet(std::move(l));
}

bool IndexSet::contains(int label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

std::size_t IndexSet::position(int label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label)
    throw std::invalid_argument("label " + std::to_string(label) +
                                " not in index set");
  return static_cast<std::size_t>(it - labels_.begin());
}

bool IndexSet::subset_of(const IndexSet& other) const {
  return std::includes(other.labels_.begin(), other.labels_.end(),
                       labels_.begin(), labels_.end());
}

IndexSet IndexSet::set_union(const IndexSet& other) const {
  std::vector<int> out;
  std::set_union(labels_.begin(), labels_.end(), other.labels_.begin(),
                 other.labels_.end(), std::back_inserter(out));
  IndexSet s;
  s.labels_ = std::move(out);
  return s;
}

IndexSet IndexSet::set_minus(const IndexSet& other) const {
  std::vector<int> out;
  std::set_difference(labels_.begin(), labels_.end(), other.labels_.begin(),
                      other.labels_.end(), std::back_inserter(out));
  IndexSet s;
  s.labels_ = std::move(out);
  return s;
}

IndexSet IndexSet::with(int label) const {
  if (contains(label)) return *this;
  std::vector<int> out = labels_;
  out.push_back(label);
  return IndexSet(std::move(out));
}

MultiIndex::MultiIndex(IndexSet l, std::vector<int> e)
    : labels(std::move(l)), entries(std::move(e)) {
  if (labels.card() != entries.size())
    throw std::invalid_argument("multi-index entry count mismatch");
  for (int v : entries)
    if (v < 0) throw std::invalid_argument("negative multi-index entry");
}

int MultiIndex::degree() const {
  return std::accumulate(entries.begin(), entries.end(), 0);
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < entries.size(); ++i)
    os << (i ? "," : "") << entries[i];
  os << ")";
  return os.str();
}

int SmoothnessVector::at(int i) const {
  if (i < 1 || static_cast<std::size_t>(i) > r.size())
    throw std::out_of_range("smoothness index " + std::to_string(i));
  return r[static_cast<std::size_t>(i - 1)];
}

int SmoothnessVector::at_extended(int i) const {
  if (static_cast<std::size_t>(i) == r.size() + 1) {
    if (r.empty()) throw std::out_of_range("extended index on empty r");
    return 2 * r.back();
  }
  return at(i);
}

SmoothnessVector SmoothnessVector::shifted(int c) const {
  std::vector<int> out = r;
  for (int& v : out) v -= c;
  return SmoothnessVector(std::move(out));
}

SmoothnessVector SmoothnessVector::tail_shifted(int from, int c) const {
  if (from < 0 || static_cast<std::size_t>(from) > r.size())
    throw std::out_of_range("tail_shifted from " + std::to_string(from));
  std::vector<int> out(r.begin() + from, r.end());
  for (int& v : out) v -= c;
  return SmoothnessVector(std::move(out));
}

std::string SmoothnessVector::str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
  os << ")";
  return os.str();
}

std::string assumption_violation(const SmoothnessVector& r, int k) {
  for (int v : r.r)
    if (v < -1) return "r entry below -1";
  for (std::size_t i = 0; i + 1 < r.r.size(); ++i)
    if (r.r[i + 1] < 2 * r.r[i]) return "r_{i+1} < 2·r_i";
  if (r.r.empty()) {
    if (k < 0) return "k < 0";
    return "";
  }
  if (k < 2 * r.r.back() + 1) return "k < 2·r_d+1";
  return "";
}

bool validate_assumption(const SmoothnessVector& r, int k) {
  return assumption_violation(r, k).empty();
}

SmoothnessVector q_vector(const SmoothnessVector& r, int m, int theta_abs) {
  return r.tail_shifted(m, theta_abs);
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

namespace {

void enumerate_rec(std::size_t pos, int remaining, std::vector<int>& cur,
                   const IndexSet& D, std::vector<MultiIndex>& out) {
  if (pos + 1 == D.card()) {
    cur[pos] = remaining;
    out.emplace_back(D, cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = v;
    enumerate_rec(pos + 1, remaining - v, cur, D, out);
  }
}

std::vector<int> sorted_entries(const MultiIndex& alpha) {
  std::vector<int> s = alpha.entries;
  std::sort(s.begin(), s.end());
  return s;
}

// min_t = sum of the t smallest entries, t = 1..card
std::vector<int> min_prefix_sums(const MultiIndex& alpha) {
  std::vector<int> s = sorted_entries(alpha);
  std::vector<int> prefix(s.size() + 1, 0);
  for (std::size_t i = 0; i < s.size(); ++i) prefix[i + 1] = prefix[i] + s[i];
  return prefix;
}

// labels of the s smallest entries, ties broken by label order
IndexSet smallest_labels(const MultiIndex& alpha, int s) {
  std::vector<std::size_t> order(alpha.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return alpha.entries[a] < alpha.entries[b];
  });
  std::vector<int> labels;
  for (int i = 0; i < s; ++i)
    labels.push_back(alpha.labels.label(order[static_cast<std::size_t>(i)]));
  return IndexSet(std::move(labels));
}

void for_each_subset(std::size_t n, std::size_t t,
                     const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(t);
  std::iota(idx.begin(), idx.end(), 0);
  if (t > n) return;
  for (;;) {
    fn(idx);
    std::size_t i = t;
    while (i-- > 0) {
      if (idx[i] + (t - i) <= n - 1) {
        ++idx[i];
        for (std::size_t j = i + 1; j < t; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
  }
}

// Asserts the classifying subset at level s is unique (Prop-level guarantee;
// fails loudly if an invalid r slipped through).
void assert_unique_subset(const MultiIndex& alpha, int s, int threshold,
                          const char* which) {
  if (s == 0) return;
  int hits = 0;
  for_each_subset(alpha.entries.size(), static_cast<std::size_t>(s),
                  [&](const std::vector<std::size_t>& idx) {
                    int sum = 0;
                    for (auto i : idx) sum += alpha.entries[i];
                    if (sum <= threshold) ++hits;
                  });
  if (hits != 1)
    throw std::logic_error(std::string(which) +
                           " classification subset not unique for " +
                           alpha.str());
}

}  // namespace

std::vector<MultiIndex> enumerate_sigma(const IndexSet& D, int k) {
  if (D.empty()) throw std::invalid_argument("empty index set");
  if (k < 0) throw std::invalid_argument("negative degree");
  std::vector<MultiIndex> out;
  std::vector<int> cur(D.card(), 0);
  enumerate_rec(0, k, cur, D, out);
  return out;
}

long long binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long long sigma_cardinality(std::size_t set_card, int k) {
  return binomial(k + static_cast<long long>(set_card) - 1, k);
}

bool in_sigma0(const MultiIndex& alpha, const SmoothnessVector& q) {
  if (q.size() + 1 != alpha.labels.card())
    throw std::invalid_argument("sigma0: q length must be card(D)-1");
  auto prefix = min_prefix_sums(alpha);
  for (std::size_t t = 1; t <= q.size(); ++t)
    if (prefix[t] <= q.at(static_cast<int>(t))) return false;
  return true;
}

std::vector<MultiIndex> enumerate_sigma0(const IndexSet& D, int k,
                                         const SmoothnessVector& q) {
  std::vector<MultiIndex> out;
  for (auto& alpha : enumerate_sigma(D, k))
    if (in_sigma0(alpha, q)) out.push_back(std::move(alpha));
  return out;
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

namespace {

void check_classify_inputs(const MultiIndex& alpha, const SmoothnessVector& r) {
  if (r.size() + 1 != alpha.labels.card())
    throw std::invalid_argument(
        "classification needs r of length card(D)-1, got r=" + r.str() +
        " for " + alpha.str());
  std::string why = assumption_violation(r, alpha.degree());
  if (!why.empty())
    throw std::invalid_argument("assumption violated: " + why + " (r=" +
                                r.str() + ", k=" + std::to_string(alpha.degree()) +
                                ")");
}

Classification make_classification(const MultiIndex& alpha,
                                   DecompositionKind kind, int s,
                                   const IndexSet& N) {
  Classification c;
  c.kind = kind;
  c.s = s;
  c.N = N;
  c.Delta = alpha.labels.set_minus(N);
  c.n = 0;
  for (int l : N) c.n += alpha.entry(l);
  c.delta = alpha.degree() - c.n;
  return c;
}

}  // namespace

Classification classify_primal(const MultiIndex& alpha,
                               const SmoothnessVector& r) {
  check_classify_inputs(alpha, r);
  auto prefix = min_prefix_sums(alpha);
  const int s_max = static_cast<int>(alpha.labels.card()) - 1;
  for (int s = s_max; s >= 1; --s) {
    if (prefix[static_cast<std::size_t>(s)] <= r.at(s)) {
      IndexSet N = smallest_labels(alpha, s);
      assert_unique_subset(alpha, s, r.at(s), "primal");
      return make_classification(alpha, DecompositionKind::primal, s, N);
    }
  }
  return make_classification(alpha, DecompositionKind::primal, 0, IndexSet{});
}

Classification classify_dual(const MultiIndex& alpha,
                             const SmoothnessVector& r) {
  check_classify_inputs(alpha, r);
  auto prefix = min_prefix_sums(alpha);
  const int s_max = static_cast<int>(alpha.labels.card()) - 1;
  int s = 0;
  while (s < s_max && prefix[static_cast<std::size_t>(s + 1)] <= r.at(s + 1))
    ++s;
  if (s == 0)
    return make_classification(alpha, DecompositionKind::dual, 0, IndexSet{});
  IndexSet N = smallest_labels(alpha, s);
  assert_unique_subset(alpha, s, r.at(s), "dual");
  return make_classification(alpha, DecompositionKind::dual, s, N);
}

Classification classify(const MultiIndex& alpha, const SmoothnessVector& r,
                        DecompositionKind kind) {
  return kind == DecompositionKind::primal ? classify_primal(alpha, r)
                                           : classify_dual(alpha, r);
}

// ---------------------------------------------------------------------------
// refined decomposition
// ---------------------------------------------------------------------------

std::vector<MultiIndex> refined_enumerate(const IndexSet& N, int n,
                                          const IndexSet& D, int k,
                                          const SmoothnessVector& r,
                                          DecompositionKind kind,
                                          SliceKind slice,
                                          const MultiIndex* fixed) {
  if (!N.subset_of(D)) throw std::invalid_argument("N must be a subset of D");
  if (slice != SliceKind::none && N == D)
    throw std::invalid_argument("slice requires N proper subset of D");
  if (!N.empty() && n > r.at(static_cast<int>(N.card())))
    return {};  // Sigma_{N,n} = empty for n > r_{card(N)}
  std::vector<MultiIndex> out;
  for (auto& alpha : enumerate_sigma(D, k)) {
    Classification c = classify(alpha, r, kind);
    if (c.N != N || c.n != n) continue;
    if (slice == SliceKind::theta) {
      bool match = true;
      for (int l : N)
        if (alpha.entry(l) != fixed->entry(l)) match = false;
      if (!match) continue;
    } else if (slice == SliceKind::sigma) {
      bool match = true;
      for (int l : c.Delta)
        if (alpha.entry(l) != fixed->entry(l)) match = false;
      if (!match) continue;
    }
    out.push_back(std::move(alpha));
  }
  return out;
}

namespace {

MultiIndex restrict_to(const MultiIndex& alpha, const IndexSet& part) {
  std::vector<int> entries;
  entries.reserve(part.card());
  for (int l : part) entries.push_back(alpha.entry(l));
  return MultiIndex(part, std::move(entries));
}

}  // namespace

MultiIndex restrict_to_delta(const MultiIndex& alpha,
                             const SmoothnessVector& r) {
  return restrict_to(alpha, classify_primal(alpha, r).Delta);
}

MultiIndex restrict_to_n(const MultiIndex& alpha, const SmoothnessVector& r) {
  return restrict_to(alpha, classify_primal(alpha, r).N);
}

MultiIndex extend_from(const MultiIndex& theta, const MultiIndex& sigma,
                       const SmoothnessVector& r) {
  const IndexSet& N = theta.labels;
  const IndexSet& Delta = sigma.labels;
  const int s = static_cast<int>(N.card());
  const int n = theta.degree();
  for (int l : N)
    if (Delta.contains(l))
      throw std::invalid_argument("extend_from: overlapping index sets");
  if (s > 0 && n > r.at(s))
    throw std::invalid_argument("extend_from: n exceeds r_card(N)");
  if (s > 0) {
    SmoothnessVector q = q_vector(r, s, n);
    if (!in_sigma0(sigma, q))
      throw std::invalid_argument("extend_from: sigma outside Sigma_0^{(q)}");
  } else if (!in_sigma0(sigma, r)) {
    throw std::invalid_argument("extend_from: sigma outside Sigma_0^{(r)}");
  }
  IndexSet D = N.set_union(Delta);
  std::vector<int> entries(D.card(), 0);
  for (int l : N) entries[D.position(l)] = theta.entry(l);
  for (int l : Delta) entries[D.position(l)] = sigma.entry(l);
  MultiIndex alpha(D, std::move(entries));
  Classification c = classify_primal(alpha, r);
  if (c.N != N || c.n != n)
    throw std::logic_error("extend_from: assembled index classified off-block");
  return alpha;
}

int s_value(int d, int k, std::size_t card_n, int n,
            const SmoothnessVector& r) {
  const int shift = r.at_extended(static_cast<int>(card_n) + 1) - n + 1;
  return k - n - (d + 1 - static_cast<int>(card_n)) * shift;
}

MultiIndex dual_node_shift(const MultiIndex& alpha, const SmoothnessVector& r) {
  Classification c = classify_dual(alpha, r);
  const int shift = r.at_extended(c.s + 1) - c.n + 1;
  std::vector<int> entries;
  for (int l : c.Delta) {
    int v = alpha.entry(l) - shift;
    if (v < 0) throw std::logic_error("dual shift produced negative entry");
    entries.push_back(v);
  }
  return MultiIndex(c.Delta, std::move(entries));
}

MultiIndex embed_dual(const MultiIndex& beta, const MultiIndex& theta,
                      const IndexSet& D, int I, int l,
                      const SmoothnessVector& r) {
  if (!D.contains(I)) throw std::invalid_argument("embed_dual: I not in D");
  if (beta.labels != D.set_minus(IndexSet({I})))
    throw std::invalid_argument("embed_dual: beta must live on D \\ {I}");
  if (l < 0 || l > r.at(1))
    throw std::invalid_argument("embed_dual: l must satisfy 0 <= l <= r_1");
  if (theta.degree() != l)
    throw std::invalid_argument("embed_dual: |theta| must equal l");
  SmoothnessVector p_l = r.tail_shifted(1, l);
  Classification cb = classify_dual(beta, p_l);
  if (theta.labels != cb.N.with(I))
    throw std::invalid_argument("embed_dual: theta must live on N'(beta) u {I}");
  std::vector<int> entries(D.card(), 0);
  for (int lab : D) {
    int v = 0;
    if (lab == I)
      v = theta.entry(I);
    else if (cb.N.contains(lab))
      v = beta.entry(lab) + theta.entry(lab);
    else
      v = beta.entry(lab);
    entries[D.position(lab)] = v;
  }
  MultiIndex alpha(D, std::move(entries));
  Classification ca = classify_dual(alpha, r);
  if (ca.N != cb.N.with(I) || ca.n != cb.n + l)
    throw std::logic_error("embed_dual: assembled index classified off-block");
  return alpha;
}

// ---------------------------------------------------------------------------
// counting
// ---------------------------------------------------------------------------

CountsTable counts_by_codim(int d, int k, const SmoothnessVector& r,
                            DecompositionKind kind) {
  std::string why = assumption_violation(r, k);
  if (!why.empty())
    throw std::invalid_argument("assumption violated: " + why);
  if (r.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("counts_by_codim: r must have length d");
  CountsTable table;
  table.d = d;
  table.k = k;
  table.r = r;
  table.kind = kind;

  if (kind == DecompositionKind::primal) {
    for (int m = d; m >= 0; --m) {
      CodimCount cc;
      cc.codim = m;
      cc.subsimplex_dim = d - m;
      cc.num_subsimplices = binomial(d + 1, d - m + 1);
      if (m == 0) {
        long long interior =
            static_cast<long long>(enumerate_sigma0(IndexSet::range(d + 1), k, r).size());
        cc.theta_series = {interior};
        cc.per_subsimplex = interior;
      } else {
        const int rm = r.at(m);
        for (int t = 0; t <= rm; ++t) {
          long long n_theta = binomial(t + m - 1, m - 1);
          long long weights = static_cast<long long>(
              enumerate_sigma0(IndexSet::range(d - m + 1), k - t,
                               q_vector(r, m, t))
                  .size());
          cc.theta_series.push_back(n_theta * weights);
        }
        cc.per_subsimplex = 0;
        for (long long v : cc.theta_series) cc.per_subsimplex += v;
      }
      cc.total = cc.per_subsimplex * cc.num_subsimplices;
      table.by_codim.push_back(std::move(cc));
    }
  } else {
    // dual counts by exhaustive classification (desk scale)
    std::vector<long long> totals(static_cast<std::size_t>(d) + 1, 0);
    for (const auto& alpha : enumerate_sigma(IndexSet::range(d + 1), k))
      ++totals[static_cast<std::size_t>(classify_dual(alpha, r).s)];
    for (int m = d; m >= 0; --m) {
      CodimCount cc;
      cc.codim = m;
      cc.subsimplex_dim = d - m;
      cc.num_subsimplices = binomial(d + 1, d - m + 1);
      cc.total = totals[static_cast<std::size_t>(m)];
      if (cc.total % cc.num_subsimplices != 0)
        throw std::logic_error("dual class size not symmetric across subsimplices");
      cc.per_subsimplex = cc.total / cc.num_subsimplices;
      table.by_codim.push_back(std::move(cc));
    }
  }
  table.total = 0;
  for (const auto& cc : table.by_codim) table.total += cc.total;
  if (table.total != binomial(k + d, d))
    throw std::logic_error("codim counts do not sum to dim P_k");
  return table;
}

}  // namespace crfem
