// Sparse truncated Fourier-Taylor series over a mode lattice.
//
// A term is  c * e^{i<k,theta>} I1^{l1} I2^{l2} prod_j z_j^{alpha_j}
//            * prod_j zbar_j^{beta_j}
// with k in Z^2, l in N^2 and alpha, beta finitely supported on the lattice.
// Two structures share the container:
//   * lattice_qqbar       — plain polynomials in (q, qbar); k = l = 0 and the
//                           alpha/beta slots hold q / qbar exponents.
//   * mixed_angle_action  — the (theta, I, z, zbar) coordinates around the
//                           tangential pair; alpha/beta are supported on the
//                           normal modes only.
// Total degree of a term is 2|l| + |alpha| + |beta|; series carry hard caps
// on degree and on |k|_inf, and operations that would overflow a cap drop
// the child term while counting it (never silently).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <unordered_map>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/util.hpp"

namespace dnls {

enum class Structure { lattice_qqbar, mixed_angle_action };

// ------------------------------------------------------------------ TermKey
// Inline fixed-capacity multi-index.  Exponent lists are sorted by mode with
// unused slots zeroed, so equality is memcmp and hashing is byte-FNV.
// Capacity 8 supports degree caps up to 8 (every distinct mode in alpha
// carries at least one power).
inline constexpr int kMaxFactors = 8;

struct TermKey {
  std::int8_t k[2] = {0, 0};
  std::uint8_t l[2] = {0, 0};
  std::uint8_t n_alpha = 0, n_beta = 0;
  std::int8_t a_mode[kMaxFactors] = {0};
  std::uint8_t a_pow[kMaxFactors] = {0};
  std::int8_t b_mode[kMaxFactors] = {0};
  std::uint8_t b_pow[kMaxFactors] = {0};

  bool operator==(const TermKey& o) const {
    return std::memcmp(this, &o, sizeof(TermKey)) == 0;
  }

  int degree() const {
    int d = 2 * (int(l[0]) + int(l[1]));
    for (int i = 0; i < n_alpha; ++i) d += a_pow[i];
    for (int i = 0; i < n_beta; ++i) d += b_pow[i];
    return d;
  }
  int z_degree() const {
    int d = 0;
    for (int i = 0; i < n_alpha; ++i) d += a_pow[i];
    for (int i = 0; i < n_beta; ++i) d += b_pow[i];
    return d;
  }
  int k_inf() const { return std::max(std::abs(int(k[0])), std::abs(int(k[1]))); }
  int k_l1() const { return std::abs(int(k[0])) + std::abs(int(k[1])); }

  int alpha(int j) const {
    for (int i = 0; i < n_alpha; ++i)
      if (a_mode[i] == j) return a_pow[i];
    return 0;
  }
  int beta(int j) const {
    for (int i = 0; i < n_beta; ++i)
      if (b_mode[i] == j) return b_pow[i];
    return 0;
  }

  // Gauge weight: k1 + k2 + sum_j (alpha_j - beta_j).  Phase invariance of
  // the flow forces this to vanish on every term of the pipeline series.
  int gauge() const {
    int g = int(k[0]) + int(k[1]);
    for (int i = 0; i < n_alpha; ++i) g += a_pow[i];
    for (int i = 0; i < n_beta; ++i) g -= b_pow[i];
    return g;
  }

  // Momentum weight: k1 n1 + k2 n2 + sum_j j (alpha_j - beta_j).  Translation
  // invariance forces this to vanish ("compact form").
  int momentum(int n1, int n2) const {
    int m = int(k[0]) * n1 + int(k[1]) * n2;
    for (int i = 0; i < n_alpha; ++i) m += int(a_mode[i]) * a_pow[i];
    for (int i = 0; i < n_beta; ++i) m -= int(b_mode[i]) * b_pow[i];
    return m;
  }

  bool diagonal_in_z() const {  // alpha == beta as exponent maps
    if (n_alpha != n_beta) return false;
    for (int i = 0; i < n_alpha; ++i)
      if (a_mode[i] != b_mode[i] || a_pow[i] != b_pow[i]) return false;
    return true;
  }

  // Conjugate-term key: (k,l,alpha,beta) -> (-k,l,beta,alpha).  A series
  // represents a real function iff coefficients pair up conjugately.
  TermKey conjugate() const {
    TermKey c = *this;
    c.k[0] = static_cast<std::int8_t>(-int(k[0]));
    c.k[1] = static_cast<std::int8_t>(-int(k[1]));
    c.n_alpha = n_beta;
    c.n_beta = n_alpha;
    std::memcpy(c.a_mode, b_mode, sizeof(a_mode));
    std::memcpy(c.a_pow, b_pow, sizeof(a_pow));
    std::memcpy(c.b_mode, a_mode, sizeof(b_mode));
    std::memcpy(c.b_pow, a_pow, sizeof(b_pow));
    return c;
  }

  // Canonical total order for serialization and goldens.
  bool operator<(const TermKey& o) const;
};

// Adds one power of mode j into a sorted slot list; returns false when the
// factor capacity would be exceeded.
bool exp_insert(std::int8_t* modes, std::uint8_t* pows, std::uint8_t& n,
                int j, int count);
// Removes one power of mode j (which must be present).
void exp_remove_one(std::int8_t* modes, std::uint8_t* pows, std::uint8_t& n,
                    int j);

struct TermKeyHash {
  std::size_t operator()(const TermKey& t) const {
    // FNV-1a over the raw bytes (layout is fully normalized).
    const unsigned char* p = reinterpret_cast<const unsigned char*>(&t);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < sizeof(TermKey); ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// ------------------------------------------------------------------- caps
struct SeriesCaps {
  int degree_cap = 6;    // max total degree 2|l| + |alpha| + |beta|
  int fourier_cap = 8;   // max |k|_inf
  double prune = 1e-15;  // coefficient magnitude below which terms are dropped

  bool operator==(const SeriesCaps&) const = default;
};

// Overflow bookkeeping: how many child terms an operation dropped at the
// caps and the largest magnitude among them.
struct Overflow {
  std::uint64_t dropped_degree = 0;
  std::uint64_t dropped_fourier = 0;
  std::uint64_t dropped_capacity = 0;
  double max_dropped = 0.0;

  void merge(const Overflow& o) {
    dropped_degree += o.dropped_degree;
    dropped_fourier += o.dropped_fourier;
    dropped_capacity += o.dropped_capacity;
    max_dropped = std::max(max_dropped, o.max_dropped);
  }
  std::uint64_t total() const {
    return dropped_degree + dropped_fourier + dropped_capacity;
  }
};

// ------------------------------------------------------------- phase point
// Evaluation point.  I and theta may be complex (the analyticity domain has
// |Im theta| <= s and complex I); z/zbar are dense over the lattice.
struct PhasePoint {
  std::array<cplx, 2> theta{{0.0, 0.0}};
  std::array<cplx, 2> I{{0.0, 0.0}};
  std::vector<cplx> z, zbar;  // dense, indexed by ModeLattice::dense_index

  explicit PhasePoint(const ModeLattice& lat)
      : z(lat.mode_count(), 0.0), zbar(lat.mode_count(), 0.0) {}
};

struct PointGradients {
  std::array<cplx, 2> d_theta{{0.0, 0.0}};
  std::array<cplx, 2> d_I{{0.0, 0.0}};
  std::vector<cplx> d_z, d_zbar;
};

// ---------------------------------------------------------------- FTSeries
class FTSeries {
 public:
  using Map = std::unordered_map<TermKey, cplx, TermKeyHash>;

  FTSeries(Structure st, ModeLattice lat, SeriesCaps caps)
      : structure_(st), lattice_(lat), caps_(caps) {
    DNLS_CHECK(caps.degree_cap >= 0 && caps.degree_cap <= kMaxFactors,
               "series: degree_cap must be within factor capacity");
    DNLS_CHECK(caps.fourier_cap >= 0 && caps.fourier_cap <= 127,
               "series: fourier_cap out of range");
  }

  Structure structure() const { return structure_; }
  const ModeLattice& lattice() const { return lattice_; }
  const SeriesCaps& caps() const { return caps_; }
  const Map& terms() const { return terms_; }
  Overflow& overflow() { return overflow_; }
  const Overflow& overflow() const { return overflow_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  void reserve(std::size_t n) { terms_.reserve(n); }

  // Accumulate c into the term keyed by t, enforcing caps (overflow-counted)
  // and the structural constraints of the container.
  void add_term(const TermKey& t, cplx c);

  // Compose helpers -------------------------------------------------------
  void add_scaled(const FTSeries& other, cplx scale);
  void scale(cplx s);
  FTSeries conjugated() const;   // the series of the conjugate function
  void prune();                  // drop |c| <= caps.prune
  void prune(double tol);

  // Structure predicates ---------------------------------------------------
  // Every term satisfies momentum(n1,n2) == 0; violating keys returned.
  bool is_compact_form(std::vector<TermKey>* violations = nullptr) const;
  // Every term satisfies gauge() == 0.
  bool is_gauge_invariant(std::vector<TermKey>* violations = nullptr) const;
  // No e^{i<k,theta>} z_n zbar_n with k != 0 and no z_n zbar_m (n != m) with
  // k = 0 among the degree-2, l = 0 terms.  A consequence of the two
  // predicates above; checked directly.
  bool special_form_ok(std::vector<TermKey>* violations = nullptr) const;
  // Contract-checking variant: returns the pattern check; if the pattern
  // holds but the series is not compact or not gauge-invariant, throws a
  // contract error naming the failing predicate.
  bool assert_special_form() const;
  // Max |coeff(term) - conj(coeff(conjugate term))| over the series.
  double reality_defect() const;
  // Max |coeff| (0 for empty).
  double coeff_sup() const;
  // Max |coeff| among terms of the given total degree.
  double coeff_sup_degree(int degree) const;
  int max_degree() const;
  FTSeries part_of_degree(int degree) const;
  // Keep terms with 2|l| + |alpha+beta| <= deg_keep (used by the KAM
  // truncation); constants are dropped.
  FTSeries truncate_low(int deg_keep) const;

  // Calculus ---------------------------------------------------------------
  cplx eval(const PhasePoint& p) const;
  // All first derivatives in one pass.  Requires every coordinate appearing
  // with positive exponent/l to be nonzero at p when log-derivatives are
  // used; handled internally without that restriction (direct product).
  PointGradients eval_gradients(const PhasePoint& p) const;
  FTSeries d_dz(int j, bool bar) const;        // partial derivative series
  FTSeries d_dI(int which) const;
  FTSeries d_dtheta(int which) const;

  // Canonically ordered (key, coeff) list for serialization and diffing.
  std::vector<std::pair<TermKey, cplx>> sorted_terms() const;

  cplx coeff(const TermKey& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? cplx(0.0) : it->second;
  }

 private:
  Structure structure_;
  ModeLattice lattice_;
  SeriesCaps caps_;
  Map terms_;
  Overflow overflow_;
};

// Algebra ------------------------------------------------------------------
FTSeries add(const FTSeries& a, const FTSeries& b);
FTSeries mul(const FTSeries& a, const FTSeries& b);

// Poisson bracket {F, G}.
//   lattice_qqbar:      {F,G} = -i sum_j (F_{q_j} G_{qbar_j} - F_{qbar_j} G_{q_j})
//   mixed_angle_action: {F,G} = sum_{i=1,2} (F_{I_i} G_{theta_i} - F_{theta_i} G_{I_i})
//                               - i sum_j (F_{z_j} G_{zbar_j} - F_{zbar_j} G_{z_j})
// Results are re-truncated at the tighter of the operand caps.
FTSeries poisson(const FTSeries& a, const FTSeries& b);

// Monomial builders --------------------------------------------------------
TermKey make_qq_key(const std::vector<std::pair<int, int>>& alpha,
                    const std::vector<std::pair<int, int>>& beta);
TermKey make_mixed_key(int k1, int k2, int l1, int l2,
                       const std::vector<std::pair<int, int>>& alpha,
                       const std::vector<std::pair<int, int>>& beta);

// Sequence norm ||w||_{a,p}^2 = sum |w_j|^2 |j|^{2p} e^{2a|j|} over the
// lattice (dense vectors indexed like PhasePoint::z).
double seq_norm_ap(const std::vector<cplx>& w, const ModeLattice& lat,
                   double a, double p);

// Lattice convolution (w*v)_n = sum_m w_{n-m} v_m, keeping only indices m,
// n-m, n that all lie on the lattice.
std::vector<cplx> seq_convolve(const std::vector<cplx>& w,
                               const std::vector<cplx>& v,
                               const ModeLattice& lat);

// Weighted-norm parameter bundle for phase-space estimates.
struct WeightedNorms {
  double a = 0.1;    // analyticity width in the mode index
  double p = 2.0;    // sequence weight for states
  double q = 1.0;    // sequence weight for vector fields (= p - 1)
  double s = 0.4;    // angle strip half-width
  double r = 0.1;    // action/normal-mode radius
  double delta = 1.0;
  double d = 2.0;

  void validate() const {
    DNLS_CHECK(p > 1.5, "norms: p must exceed 3/2");
    DNLS_CHECK(std::abs(q - (p - 1.0)) < 1e-12, "norms: q must equal p - 1");
    DNLS_CHECK(p - q <= delta + 1e-12, "norms: p - q must not exceed delta");
    DNLS_CHECK(std::abs(delta - (d - 1.0)) < 1e-12, "norms: delta must equal d - 1");
    DNLS_CHECK(a > 0 && s > 0 && r > 0, "norms: a, s, r must be positive");
  }
};

// Vector-field components at one phase-space point: X = angle velocities,
// Y = action velocities, U/V = normal-mode velocities (dense).
struct VectorField {
  std::array<cplx, 2> X{{0.0, 0.0}};
  std::array<cplx, 2> Y{{0.0, 0.0}};
  std::vector<cplx> U, V;
};

// ||W||_{r,q} = |X|_sup + |Y|_sup / r^2 + (||U||_{a,q} + ||V||_{a,q}) / r.
double vector_field_norm(const VectorField& W, const ModeLattice& lat,
                         const WeightedNorms& nm);

// Random-series generators (shared by property tests and structural checks).
// `random_series` draws unconstrained mixed-structure terms; the invariant
// sampler solves the two balance equations
//   k1 + k2 = -sum(alpha - beta),  k1 n1 + k2 n2 = -sum j (alpha - beta)
// for (k1, k2), rejecting draws with a non-integer solution, so every term
// is momentum- and gauge-balanced by construction.
FTSeries random_series(Rng& rng, const ModeLattice& lat,
                       const SeriesCaps& caps, int n_terms, int z_degree_max,
                       int k_max);
FTSeries random_invariant_series(Rng& rng, const ModeLattice& lat,
                                 const SeriesCaps& caps, int n_terms,
                                 int z_degree_max);

}  // namespace dnls
