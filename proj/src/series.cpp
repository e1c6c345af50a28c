#include "dnls/series.hpp"

#include <algorithm>
#include <cmath>

namespace dnls {

// ----------------------------------------------------------------- TermKey
bool TermKey::operator<(const TermKey& o) const {
  for (int i = 0; i < 2; ++i) {
    if (k[i] != o.k[i]) return k[i] < o.k[i];
  }
  for (int i = 0; i < 2; ++i) {
    if (l[i] != o.l[i]) return l[i] < o.l[i];
  }
  const int na = n_alpha, ona = o.n_alpha;
  for (int i = 0; i < std::min(na, ona); ++i) {
    if (a_mode[i] != o.a_mode[i]) return a_mode[i] < o.a_mode[i];
    if (a_pow[i] != o.a_pow[i]) return a_pow[i] < o.a_pow[i];
  }
  if (na != ona) return na < ona;
  const int nb = n_beta, onb = o.n_beta;
  for (int i = 0; i < std::min(nb, onb); ++i) {
    if (b_mode[i] != o.b_mode[i]) return b_mode[i] < o.b_mode[i];
    if (b_pow[i] != o.b_pow[i]) return b_pow[i] < o.b_pow[i];
  }
  return nb < onb;
}

bool exp_insert(std::int8_t* modes, std::uint8_t* pows, std::uint8_t& n,
                int j, int count) {
  DNLS_CHECK(j != 0 && j >= -127 && j <= 127, "exp_insert: bad mode");
  DNLS_CHECK(count > 0, "exp_insert: count must be positive");
  int pos = 0;
  while (pos < n && modes[pos] < j) ++pos;
  if (pos < n && modes[pos] == j) {
    int p = int(pows[pos]) + count;
    DNLS_CHECK(p <= 255, "exp_insert: power overflow");
    pows[pos] = static_cast<std::uint8_t>(p);
    return true;
  }
  if (n >= kMaxFactors) return false;
  for (int i = n; i > pos; --i) {
    modes[i] = modes[i - 1];
    pows[i] = pows[i - 1];
  }
  modes[pos] = static_cast<std::int8_t>(j);
  pows[pos] = static_cast<std::uint8_t>(count);
  ++n;
  return true;
}

void exp_remove_one(std::int8_t* modes, std::uint8_t* pows, std::uint8_t& n,
                    int j) {
  for (int i = 0; i < n; ++i) {
    if (modes[i] == j) {
      if (pows[i] > 1) {
        --pows[i];
        return;
      }
      for (int t = i; t + 1 < n; ++t) {
        modes[t] = modes[t + 1];
        pows[t] = pows[t + 1];
      }
      --n;
      modes[n] = 0;
      pows[n] = 0;
      return;
    }
  }
  DNLS_CHECK(false, "exp_remove_one: mode not present");
}

namespace {

TermKey build_key(int k1, int k2, int l1, int l2,
                  const std::vector<std::pair<int, int>>& alpha,
                  const std::vector<std::pair<int, int>>& beta) {
  DNLS_CHECK(std::abs(k1) <= 127 && std::abs(k2) <= 127,
             "term: Fourier index out of range");
  DNLS_CHECK(l1 >= 0 && l1 <= 255 && l2 >= 0 && l2 <= 255,
             "term: action power out of range");
  TermKey t;
  t.k[0] = static_cast<std::int8_t>(k1);
  t.k[1] = static_cast<std::int8_t>(k2);
  t.l[0] = static_cast<std::uint8_t>(l1);
  t.l[1] = static_cast<std::uint8_t>(l2);
  for (auto [j, p] : alpha)
    DNLS_CHECK(exp_insert(t.a_mode, t.a_pow, t.n_alpha, j, p),
               "term: too many distinct alpha modes");
  for (auto [j, p] : beta)
    DNLS_CHECK(exp_insert(t.b_mode, t.b_pow, t.n_beta, j, p),
               "term: too many distinct beta modes");
  return t;
}

}  // namespace

TermKey make_qq_key(const std::vector<std::pair<int, int>>& alpha,
                    const std::vector<std::pair<int, int>>& beta) {
  return build_key(0, 0, 0, 0, alpha, beta);
}

TermKey make_mixed_key(int k1, int k2, int l1, int l2,
                       const std::vector<std::pair<int, int>>& alpha,
                       const std::vector<std::pair<int, int>>& beta) {
  return build_key(k1, k2, l1, l2, alpha, beta);
}

// ---------------------------------------------------------------- FTSeries
void FTSeries::add_term(const TermKey& t, cplx c) {
  if (c == cplx(0.0)) return;
  if (structure_ == Structure::lattice_qqbar) {
    DNLS_CHECK(t.k[0] == 0 && t.k[1] == 0 && t.l[0] == 0 && t.l[1] == 0,
               "series: qqbar terms cannot carry theta/I factors");
  }
  for (int i = 0; i < t.n_alpha; ++i) {
    DNLS_CHECK(lattice_.in_range(t.a_mode[i]), "series: alpha mode outside lattice");
    if (structure_ == Structure::mixed_angle_action)
      DNLS_CHECK(lattice_.is_normal(t.a_mode[i]),
                 "series: mixed-structure z modes must be normal modes");
  }
  for (int i = 0; i < t.n_beta; ++i) {
    DNLS_CHECK(lattice_.in_range(t.b_mode[i]), "series: beta mode outside lattice");
    if (structure_ == Structure::mixed_angle_action)
      DNLS_CHECK(lattice_.is_normal(t.b_mode[i]),
                 "series: mixed-structure z modes must be normal modes");
  }
  if (t.degree() > caps_.degree_cap) {
    ++overflow_.dropped_degree;
    overflow_.max_dropped = std::max(overflow_.max_dropped, std::abs(c));
    return;
  }
  if (t.k_inf() > caps_.fourier_cap) {
    ++overflow_.dropped_fourier;
    overflow_.max_dropped = std::max(overflow_.max_dropped, std::abs(c));
    return;
  }
  auto [it, inserted] = terms_.try_emplace(t, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

void FTSeries::add_scaled(const FTSeries& other, cplx scale) {
  DNLS_CHECK(structure_ == other.structure_, "series: structure mismatch");
  DNLS_CHECK(lattice_ == other.lattice_, "series: lattice mismatch");
  for (const auto& [t, c] : other.terms_) add_term(t, scale * c);
}

void FTSeries::scale(cplx s) {
  if (s == cplx(0.0)) {
    terms_.clear();
    return;
  }
  for (auto& [t, c] : terms_) c *= s;
}

FTSeries FTSeries::conjugated() const {
  FTSeries out(structure_, lattice_, caps_);
  out.reserve(size());
  for (const auto& [t, c] : terms_) out.add_term(t.conjugate(), std::conj(c));
  return out;
}

void FTSeries::prune() { prune(caps_.prune); }

void FTSeries::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

bool FTSeries::is_compact_form(std::vector<TermKey>* violations) const {
  bool ok = true;
  for (const auto& [t, c] : terms_) {
    if (t.momentum(lattice_.n1, lattice_.n2) != 0) {
      ok = false;
      if (violations) violations->push_back(t);
    }
  }
  return ok;
}

bool FTSeries::is_gauge_invariant(std::vector<TermKey>* violations) const {
  bool ok = true;
  for (const auto& [t, c] : terms_) {
    if (t.gauge() != 0) {
      ok = false;
      if (violations) violations->push_back(t);
    }
  }
  return ok;
}

bool FTSeries::special_form_ok(std::vector<TermKey>* violations) const {
  bool ok = true;
  for (const auto& [t, c] : terms_) {
    if (t.l[0] != 0 || t.l[1] != 0) continue;
    if (t.n_alpha != 1 || t.n_beta != 1) continue;
    if (t.a_pow[0] != 1 || t.b_pow[0] != 1) continue;
    const bool k_zero = (t.k[0] == 0 && t.k[1] == 0);
    const bool same_mode = (t.a_mode[0] == t.b_mode[0]);
    // Forbidden: rotating diagonal (k != 0, same mode) and static
    // off-diagonal (k = 0, different modes).
    if ((!k_zero && same_mode) || (k_zero && !same_mode)) {
      ok = false;
      if (violations) violations->push_back(t);
    }
  }
  return ok;
}

bool FTSeries::assert_special_form() const {
  if (!special_form_ok()) return false;
  DNLS_CHECK(is_compact_form(), "assert_special_form: series is not compact");
  DNLS_CHECK(is_gauge_invariant(),
             "assert_special_form: series is not gauge invariant");
  return true;
}

double FTSeries::reality_defect() const {
  double worst = 0.0;
  for (const auto& [t, c] : terms_) {
    const cplx other = coeff(t.conjugate());
    worst = std::max(worst, std::abs(c - std::conj(other)));
  }
  return worst;
}

double FTSeries::coeff_sup() const {
  double m = 0.0;
  for (const auto& [t, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double FTSeries::coeff_sup_degree(int degree) const {
  double m = 0.0;
  for (const auto& [t, c] : terms_)
    if (t.degree() == degree) m = std::max(m, std::abs(c));
  return m;
}

int FTSeries::max_degree() const {
  int d = 0;
  for (const auto& [t, c] : terms_) d = std::max(d, t.degree());
  return d;
}

FTSeries FTSeries::part_of_degree(int degree) const {
  FTSeries out(structure_, lattice_, caps_);
  for (const auto& [t, c] : terms_)
    if (t.degree() == degree) out.add_term(t, c);
  return out;
}

FTSeries FTSeries::truncate_low(int deg_keep) const {
  FTSeries out(structure_, lattice_, caps_);
  for (const auto& [t, c] : terms_) {
    // Drop only true constants (no angle dependence either): they are
    // immaterial to the flow.  e^{i<k,theta>} terms of degree 0 stay.
    if (t.degree() == 0 && t.k[0] == 0 && t.k[1] == 0) continue;
    if (t.degree() <= deg_keep) out.add_term(t, c);
  }
  return out;
}

cplx FTSeries::eval(const PhasePoint& p) const {
  cplx total = 0.0;
  for (const auto& [t, c] : terms_) {
    cplx v = c;
    for (int i = 0; i < 2; ++i) {
      if (t.k[i] != 0) v *= std::exp(iu * (double(t.k[i]) * p.theta[i]));
      for (int m = 0; m < int(t.l[i]); ++m) v *= p.I[i];
    }
    for (int i = 0; i < t.n_alpha; ++i) {
      const cplx z = p.z[lattice_.dense_index(t.a_mode[i])];
      for (int m = 0; m < int(t.a_pow[i]); ++m) v *= z;
    }
    for (int i = 0; i < t.n_beta; ++i) {
      const cplx z = p.zbar[lattice_.dense_index(t.b_mode[i])];
      for (int m = 0; m < int(t.b_pow[i]); ++m) v *= z;
    }
    total += v;
  }
  return total;
}

PointGradients FTSeries::eval_gradients(const PhasePoint& p) const {
  PointGradients g;
  g.d_z.assign(p.z.size(), 0.0);
  g.d_zbar.assign(p.zbar.size(), 0.0);
  for (const auto& [t, c] : terms_) {
    // Term value and, for each variable with positive exponent, the value
    // with one factor removed (computed directly; safe at zeros).
    cplx base = c;
    for (int i = 0; i < 2; ++i)
      if (t.k[i] != 0) base *= std::exp(iu * (double(t.k[i]) * p.theta[i]));

    auto pow_c = [](cplx x, int n) {
      cplx r = 1.0;
      for (int m = 0; m < n; ++m) r *= x;
      return r;
    };

    const cplx I_part = pow_c(p.I[0], t.l[0]) * pow_c(p.I[1], t.l[1]);
    cplx z_part = 1.0;
    for (int i = 0; i < t.n_alpha; ++i)
      z_part *= pow_c(p.z[lattice_.dense_index(t.a_mode[i])], t.a_pow[i]);
    for (int i = 0; i < t.n_beta; ++i)
      z_part *= pow_c(p.zbar[lattice_.dense_index(t.b_mode[i])], t.b_pow[i]);

    const cplx full = base * I_part * z_part;

    for (int i = 0; i < 2; ++i) {
      if (t.k[i] != 0) g.d_theta[i] += iu * double(t.k[i]) * full;
      if (t.l[i] > 0) {
        cplx v = base * z_part * double(t.l[i]);
        v *= pow_c(p.I[i], int(t.l[i]) - 1);
        v *= pow_c(p.I[1 - i], t.l[1 - i]);
        g.d_I[i] += v;
      }
    }
    for (int i = 0; i < t.n_alpha; ++i) {
      const int idx = lattice_.dense_index(t.a_mode[i]);
      cplx v = base * I_part * double(t.a_pow[i]);
      v *= pow_c(p.z[idx], int(t.a_pow[i]) - 1);
      for (int m = 0; m < t.n_alpha; ++m)
        if (m != i) v *= pow_c(p.z[lattice_.dense_index(t.a_mode[m])], t.a_pow[m]);
      for (int m = 0; m < t.n_beta; ++m)
        v *= pow_c(p.zbar[lattice_.dense_index(t.b_mode[m])], t.b_pow[m]);
      g.d_z[idx] += v;
    }
    for (int i = 0; i < t.n_beta; ++i) {
      const int idx = lattice_.dense_index(t.b_mode[i]);
      cplx v = base * I_part * double(t.b_pow[i]);
      v *= pow_c(p.zbar[idx], int(t.b_pow[i]) - 1);
      for (int m = 0; m < t.n_alpha; ++m)
        v *= pow_c(p.z[lattice_.dense_index(t.a_mode[m])], t.a_pow[m]);
      for (int m = 0; m < t.n_beta; ++m)
        if (m != i) v *= pow_c(p.zbar[lattice_.dense_index(t.b_mode[m])], t.b_pow[m]);
      g.d_zbar[idx] += v;
    }
  }
  return g;
}

FTSeries FTSeries::d_dz(int j, bool bar) const {
  FTSeries out(structure_, lattice_, caps_);
  for (const auto& [t, c] : terms_) {
    const int p = bar ? t.beta(j) : t.alpha(j);
    if (p == 0) continue;
    TermKey child = t;
    if (bar)
      exp_remove_one(child.b_mode, child.b_pow, child.n_beta, j);
    else
      exp_remove_one(child.a_mode, child.a_pow, child.n_alpha, j);
    out.add_term(child, c * double(p));
  }
  return out;
}

FTSeries FTSeries::d_dI(int which) const {
  FTSeries out(structure_, lattice_, caps_);
  for (const auto& [t, c] : terms_) {
    const int p = t.l[which];
    if (p == 0) continue;
    TermKey child = t;
    child.l[which] = static_cast<std::uint8_t>(p - 1);
    out.add_term(child, c * double(p));
  }
  return out;
}

FTSeries FTSeries::d_dtheta(int which) const {
  FTSeries out(structure_, lattice_, caps_);
  for (const auto& [t, c] : terms_) {
    if (t.k[which] == 0) continue;
    out.add_term(t, c * iu * double(t.k[which]));
  }
  return out;
}

std::vector<std::pair<TermKey, cplx>> FTSeries::sorted_terms() const {
  std::vector<std::pair<TermKey, cplx>> v(terms_.begin(), terms_.end());
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return v;
}

// ----------------------------------------------------------------- algebra
FTSeries add(const FTSeries& a, const FTSeries& b) {
  FTSeries out = a;
  out.add_scaled(b, 1.0);
  return out;
}

namespace {

SeriesCaps tighter(const SeriesCaps& a, const SeriesCaps& b) {
  SeriesCaps c;
  c.degree_cap = std::min(a.degree_cap, b.degree_cap);
  c.fourier_cap = std::min(a.fourier_cap, b.fourier_cap);
  c.prune = std::max(a.prune, b.prune);
  return c;
}

// Merge the multi-indices of two terms into `out` (k/l add; alpha/beta slot
// lists merge).  Returns false if the factor capacity overflows.
bool merge_keys(const TermKey& x, const TermKey& y, TermKey& out) {
  out = x;
  out.k[0] = static_cast<std::int8_t>(int(x.k[0]) + int(y.k[0]));
  out.k[1] = static_cast<std::int8_t>(int(x.k[1]) + int(y.k[1]));
  out.l[0] = static_cast<std::uint8_t>(int(x.l[0]) + int(y.l[0]));
  out.l[1] = static_cast<std::uint8_t>(int(x.l[1]) + int(y.l[1]));
  for (int i = 0; i < y.n_alpha; ++i)
    if (!exp_insert(out.a_mode, out.a_pow, out.n_alpha, y.a_mode[i], y.a_pow[i]))
      return false;
  for (int i = 0; i < y.n_beta; ++i)
    if (!exp_insert(out.b_mode, out.b_pow, out.n_beta, y.b_mode[i], y.b_pow[i]))
      return false;
  return true;
}

}  // namespace

FTSeries mul(const FTSeries& a, const FTSeries& b) {
  DNLS_CHECK(a.structure() == b.structure(), "mul: structure mismatch");
  DNLS_CHECK(a.lattice() == b.lattice(), "mul: lattice mismatch");
  FTSeries out(a.structure(), a.lattice(), tighter(a.caps(), b.caps()));
  out.reserve(a.size() + b.size());
  for (const auto& [ta, ca] : a.terms()) {
    for (const auto& [tb, cb] : b.terms()) {
      TermKey child;
      if (!merge_keys(ta, tb, child)) {
        ++out.overflow().dropped_capacity;
        out.overflow().max_dropped =
            std::max(out.overflow().max_dropped, std::abs(ca * cb));
        continue;
      }
      out.add_term(child, ca * cb);
    }
  }
  out.prune();
  return out;
}

double seq_norm_ap(const std::vector<cplx>& w, const ModeLattice& lat,
                   double a, double p) {
  DNLS_CHECK(int(w.size()) == lat.mode_count(), "seq_norm_ap: size mismatch");
  double s = 0.0;
  for (int j : lat.all_modes()) {
    const double aj = std::abs(w[lat.dense_index(j)]);
    if (aj == 0.0) continue;
    const double wj = std::pow(std::abs(double(j)), p) * std::exp(a * std::abs(double(j)));
    s += aj * aj * wj * wj;
  }
  return std::sqrt(s);
}

std::vector<cplx> seq_convolve(const std::vector<cplx>& w,
                               const std::vector<cplx>& v,
                               const ModeLattice& lat) {
  DNLS_CHECK(int(w.size()) == lat.mode_count() &&
                 int(v.size()) == lat.mode_count(),
             "seq_convolve: size mismatch");
  std::vector<cplx> out(lat.mode_count(), 0.0);
  for (int n : lat.all_modes()) {
    cplx s = 0.0;
    for (int m : lat.all_modes()) {
      const int d = n - m;
      if (!lat.in_range(d)) continue;
      s += w[lat.dense_index(d)] * v[lat.dense_index(m)];
    }
    out[lat.dense_index(n)] = s;
  }
  return out;
}

double vector_field_norm(const VectorField& W, const ModeLattice& lat,
                         const WeightedNorms& nm) {
  nm.validate();
  const double X = std::max(std::abs(W.X[0]), std::abs(W.X[1]));
  const double Y = std::max(std::abs(W.Y[0]), std::abs(W.Y[1]));
  double n = X + Y / (nm.r * nm.r);
  if (!W.U.empty()) n += seq_norm_ap(W.U, lat, nm.a, nm.q) / nm.r;
  if (!W.V.empty()) n += seq_norm_ap(W.V, lat, nm.a, nm.q) / nm.r;
  return n;
}

FTSeries random_series(Rng& rng, const ModeLattice& lat,
                       const SeriesCaps& caps, int n_terms, int z_degree_max,
                       int k_max) {
  FTSeries out(Structure::mixed_angle_action, lat, caps);
  const auto normal = lat.normal_modes();
  while (int(out.size()) < n_terms) {
    const int k1 = int(rng.below(2 * k_max + 1)) - k_max;
    const int k2 = int(rng.below(2 * k_max + 1)) - k_max;
    const int l1 = int(rng.below(2));
    const int l2 = int(rng.below(2));
    std::vector<std::pair<int, int>> alpha, beta;
    const int nz = int(rng.below(z_degree_max + 1));
    TermKey t;
    t.k[0] = static_cast<std::int8_t>(k1);
    t.k[1] = static_cast<std::int8_t>(k2);
    t.l[0] = static_cast<std::uint8_t>(l1);
    t.l[1] = static_cast<std::uint8_t>(l2);
    bool ok = true;
    for (int i = 0; i < nz && ok; ++i) {
      const int j = normal[rng.below(normal.size())];
      if (rng.below(2) == 0)
        ok = exp_insert(t.a_mode, t.a_pow, t.n_alpha, j, 1);
      else
        ok = exp_insert(t.b_mode, t.b_pow, t.n_beta, j, 1);
    }
    if (!ok || t.degree() > caps.degree_cap || t.k_inf() > caps.fourier_cap)
      continue;
    out.add_term(t, cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
  }
  return out;
}

FTSeries random_invariant_series(Rng& rng, const ModeLattice& lat,
                                 const SeriesCaps& caps, int n_terms,
                                 int z_degree_max) {
  FTSeries out(Structure::mixed_angle_action, lat, caps);
  const auto normal = lat.normal_modes();
  const int gap = lat.n2 - lat.n1;
  while (int(out.size()) < n_terms) {
    TermKey t;
    t.l[0] = static_cast<std::uint8_t>(rng.below(2));
    t.l[1] = static_cast<std::uint8_t>(rng.below(2));
    int g = 0, mom = 0;
    bool ok = true;
    const int nz = int(rng.below(z_degree_max + 1));
    for (int i = 0; i < nz && ok; ++i) {
      const int j = normal[rng.below(normal.size())];
      if (rng.below(2) == 0) {
        ok = exp_insert(t.a_mode, t.a_pow, t.n_alpha, j, 1);
        g += 1;
        mom += j;
      } else {
        ok = exp_insert(t.b_mode, t.b_pow, t.n_beta, j, 1);
        g -= 1;
        mom -= j;
      }
    }
    if (!ok) continue;
    // Solve k1 + k2 = -g, k1 n1 + k2 n2 = -mom.
    const int num = lat.n1 * g - mom;  // k2 * gap
    if (num % gap != 0) continue;
    const int k2 = num / gap;
    const int k1 = -g - k2;
    if (std::max(std::abs(k1), std::abs(k2)) > caps.fourier_cap) continue;
    t.k[0] = static_cast<std::int8_t>(k1);
    t.k[1] = static_cast<std::int8_t>(k2);
    if (t.degree() > caps.degree_cap) continue;
    DNLS_CHECK(t.gauge() == 0 && t.momentum(lat.n1, lat.n2) == 0,
               "random_invariant_series: balance equations violated");
    out.add_term(t, cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
  }
  return out;
}

}  // namespace dnls
