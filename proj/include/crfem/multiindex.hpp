#ifndef CRFEM_MULTIINDEX_HPP
#define CRFEM_MULTIINDEX_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crfem {

/// Sorted duplicate-free set of global vertex labels. Classes computed over
/// global labels transfer directly to sub-simplices of meshes.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<int> labels);
  static IndexSet range(int count);  // {0, 1, ..., count-1}

  std::size_t card() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  int label(std::size_t pos) const { return labels_[pos]; }
  const std::vector<int>& labels() const { return labels_; }

  bool contains(int label) const;
  std::size_t position(int label) const;  // throws if absent
  bool subset_of(const IndexSet& other) const;

  IndexSet set_union(const IndexSet& other) const;
  IndexSet set_minus(const IndexSet& other) const;
  IndexSet with(int label) const;

  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
  friend bool operator<(const IndexSet& a, const IndexSet& b) {
    return a.labels_ < b.labels_;
  }

 private:
  std::vector<int> labels_;
};

/// Multi-index over an index set: nonnegative entries, aligned with the sorted
/// labels, summing to the degree.
struct MultiIndex {
  IndexSet labels;
  std::vector<int> entries;

  MultiIndex() = default;
  MultiIndex(IndexSet l, std::vector<int> e);

  int degree() const;
  int entry(int label) const { return entries[labels.position(label)]; }
  std::string str() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    if (a.labels != b.labels) return a.labels < b.labels;
    return a.entries < b.entries;
  }
};

/// Smoothness vector r = (r_1, ..., r_d); entries >= -1, negative entries form
/// a leading prefix (enforced by the growth condition r_{i+1} >= 2 r_i).
struct SmoothnessVector {
  std::vector<int> r;

  SmoothnessVector() = default;
  explicit SmoothnessVector(std::vector<int> v) : r(std::move(v)) {}

  std::size_t size() const { return r.size(); }
  /// 1-based accessor r_i, i in [1, size()].
  int at(int i) const;
  /// r_i extended one past the end by r_{d+1} := 2 r_d, the value consistent
  /// with continuing the growth chain; used by the dual node map where the
  /// top (vertex) class needs r_{card(N)+1}.
  int at_extended(int i) const;
  /// Entrywise shift r - c (may create -1 entries).
  SmoothnessVector shifted(int c) const;
  /// Suffix (r_{from+1}, ..., r_d) shifted by -c; the facet parameter p_l.
  SmoothnessVector tail_shifted(int from, int c) const;

  std::string str() const;
};

bool validate_assumption(const SmoothnessVector& r, int k);
/// Empty string when valid, otherwise the violated condition.
std::string assumption_violation(const SmoothnessVector& r, int k);

enum class DecompositionKind { primal, dual };

/// Class data of a multi-index in the primal or dual decomposition.
struct Classification {
  DecompositionKind kind = DecompositionKind::primal;
  int s = 0;        // codim class = card(N)
  IndexSet N;       // "small entry" labels
  IndexSet Delta;   // complement within the index set
  int n = 0;        // sum of entries over N
  int delta = 0;    // sum over Delta
};

/// Derived smoothness vector q_t = r_{t+m} - |theta| for sub-simplex weight
/// spaces; valid together with degree k - |theta|.
SmoothnessVector q_vector(const SmoothnessVector& r, int m, int theta_abs);

// --- enumeration ---

/// All alpha over D with entries summing to k, lexicographically decreasing
/// (leading entry from k down to 0). Throws on empty D.
std::vector<MultiIndex> enumerate_sigma(const IndexSet& D, int k);
long long sigma_cardinality(std::size_t set_card, int k);

/// Sigma_0^{(q)}(D, k): every t-subset sum exceeds q_t for 1 <= t < card(D).
std::vector<MultiIndex> enumerate_sigma0(const IndexSet& D, int k,
                                         const SmoothnessVector& q);
bool in_sigma0(const MultiIndex& alpha, const SmoothnessVector& q);

// --- classification ---

Classification classify_primal(const MultiIndex& alpha,
                               const SmoothnessVector& r);
Classification classify_dual(const MultiIndex& alpha,
                             const SmoothnessVector& r);
Classification classify(const MultiIndex& alpha, const SmoothnessVector& r,
                        DecompositionKind kind);

// --- refined decomposition ---

enum class SliceKind { none, theta, sigma };

/// Sigma_{N,n}(d,k) (or the dual variant), optionally sliced by fixed theta on
/// N or fixed sigma on Delta. Returns the empty list when n > r_{card(N)}.
std::vector<MultiIndex> refined_enumerate(
    const IndexSet& N, int n, const IndexSet& D, int k,
    const SmoothnessVector& r, DecompositionKind kind,
    SliceKind slice = SliceKind::none, const MultiIndex* fixed = nullptr);

/// R_(Delta): restriction of a primal-classified alpha to its Delta entries.
MultiIndex restrict_to_delta(const MultiIndex& alpha,
                             const SmoothnessVector& r);
/// R_(N): restriction to the N entries.
MultiIndex restrict_to_n(const MultiIndex& alpha, const SmoothnessVector& r);
/// Inverse of the restriction pair: assembles alpha from theta on N and sigma
/// on Delta; validates theta in Sigma(N,n), sigma in Sigma_0^{(q)}(Delta,k-n).
MultiIndex extend_from(const MultiIndex& theta, const MultiIndex& sigma,
                       const SmoothnessVector& r);

/// S(d, k, N, n) = k - n - (d+1-card(N)) (r_{card(N)+1} - n + 1); may be
/// negative, signalling an empty class slice (no interior nodes).
int s_value(int d, int k, std::size_t card_n, int n, const SmoothnessVector& r);
/// R'_(Delta'): subtracts r_{card(N)+1} - n + 1 from each Delta' entry of a
/// dual-classified alpha.
MultiIndex dual_node_shift(const MultiIndex& alpha, const SmoothnessVector& r);

/// Assembles alpha on D from beta over D \ {I} (dual-classified under the
/// shifted vector p_l) and theta over N'(beta) union {I} with |theta| = l.
MultiIndex embed_dual(const MultiIndex& beta, const MultiIndex& theta,
                      const IndexSet& D, int I, int l,
                      const SmoothnessVector& r);

// --- counting ---

struct CodimCount {
  int codim = 0;
  int subsimplex_dim = 0;
  long long num_subsimplices = 0;
  long long per_subsimplex = 0;
  long long total = 0;
  /// Per-derivative-order counts on one sub-simplex (primal kind only):
  /// theta_series[t] = #theta with |theta| = t times the weight-space size.
  std::vector<long long> theta_series;
};

struct CountsTable {
  int d = 0;
  int k = 0;
  SmoothnessVector r;
  DecompositionKind kind = DecompositionKind::primal;
  std::vector<CodimCount> by_codim;
  long long total = 0;
};

CountsTable counts_by_codim(int d, int k, const SmoothnessVector& r,
                            DecompositionKind kind);

long long binomial(long long n, long long k);

}  // namespace crfem

#endif
