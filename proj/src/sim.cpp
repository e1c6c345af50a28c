#include "dnls/sim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dnls/model.hpp"
#include "dnls/normal_form.hpp"
#include "dnls/util.hpp"

namespace dnls {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Frequency carried by transform slot m on an n_grid mesh.
int slot_freq(int m, int n_grid) { return m < n_grid / 2 ? m : m - n_grid; }

// 2/3-rule survivor: the mean mode and the top third are dropped.
bool kept(int n, int n_grid) { return n != 0 && 3 * std::abs(n) <= n_grid; }

}  // namespace

// ------------------------------------------------------------------ field
SpectralField::SpectralField(int n)
    : n_grid(n), coeffs(std::max(n, 0), cplx(0.0)) {
  DNLS_CHECK(power_of_two(n) && n >= 8,
             "spectral field: grid size must be a power of two >= 8");
}

int SpectralField::index_of(int n) const {
  DNLS_CHECK(2 * std::abs(n) < n_grid,
             "spectral field: mode outside the resolved band");
  return n >= 0 ? n : n + n_grid;
}

void SpectralField::set_mode(int n, cplx v) {
  DNLS_CHECK(n != 0, "spectral field: the mean mode is pinned to zero");
  coeffs[index_of(n)] = v;
}

double SpectralField::mass() const {
  double s = 0.0;
  for (const cplx& c : coeffs) s += std::norm(c);
  return kTwoPi * s;
}

double SpectralField::momentum() const {
  double s = 0.0;
  for (int m = 0; m < n_grid; ++m)
    s += double(slot_freq(m, n_grid)) * std::norm(coeffs[m]);
  return s;
}

SpectralField plane_wave(int n, cplx A, int n_grid) {
  SpectralField u(n_grid);
  u.set_mode(n, A);
  return u;
}

double plane_wave_frequency(int n, double A) {
  DNLS_CHECK(n != 0, "plane wave: the mean mode is outside the phase space");
  return double(n) * n + double(n) * A * A;
}

// -------------------------------------------------------------- transform
namespace {

// Fixed-size transform workspace: three plans over persistent buffers.
// All plans use FFTW_ESTIMATE (deterministic planning, no wisdom state).
struct Workspace {
  int n = 0;
  std::vector<cplx> hat;  // spectral scratch
  std::vector<cplx> gu;   // grid values of u, later |u|^2 u_x
  std::vector<cplx> gux;  // grid values of u_x
  fftw_plan to_grid_u = nullptr;
  fftw_plan to_grid_ux = nullptr;
  fftw_plan to_hat = nullptr;

  explicit Workspace(int n_grid)
      : n(n_grid), hat(n_grid), gu(n_grid), gux(n_grid) {
    auto c = [](std::vector<cplx>& v) {
      return reinterpret_cast<fftw_complex*>(v.data());
    };
    to_grid_u =
        fftw_plan_dft_1d(n, c(hat), c(gu), FFTW_BACKWARD, FFTW_ESTIMATE);
    to_grid_ux =
        fftw_plan_dft_1d(n, c(hat), c(gux), FFTW_BACKWARD, FFTW_ESTIMATE);
    to_hat = fftw_plan_dft_1d(n, c(gu), c(hat), FFTW_FORWARD, FFTW_ESTIMATE);
    DNLS_CHECK(to_grid_u && to_grid_ux && to_hat,
               "spectral transform planning failed");
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  ~Workspace() {
    fftw_destroy_plan(to_grid_u);
    fftw_destroy_plan(to_grid_ux);
    fftw_destroy_plan(to_hat);
  }

  // out = -FFT[|u|^2 u_x] / n, dealiased, from the spectral state uhat;
  // when tw is non-null the state is tw-twisted: uhat = tw * vin, and the
  // result is untwisted by conj(tw) (exact integrating factor).
  void nonlinear(const std::vector<cplx>& vin, const cplx* tw,
                 std::vector<cplx>* out) {
    for (int m = 0; m < n; ++m) hat[m] = tw ? tw[m] * vin[m] : vin[m];
    fftw_execute(to_grid_u);
    for (int m = 0; m < n; ++m)
      hat[m] *= kI * double(slot_freq(m, n));
    fftw_execute(to_grid_ux);
    for (int m = 0; m < n; ++m) gu[m] = std::norm(gu[m]) * gux[m];
    fftw_execute(to_hat);
    const double inv = 1.0 / n;
    for (int m = 0; m < n; ++m) {
      if (!kept(slot_freq(m, n), n)) {
        (*out)[m] = 0.0;
        continue;
      }
      const cplx v = -inv * hat[m];
      (*out)[m] = tw ? std::conj(tw[m]) * v : v;
    }
  }
};

void fill_linear_phase(double t, int n, std::vector<cplx>* tw) {
  for (int m = 0; m < n; ++m) {
    const double f = slot_freq(m, n);
    (*tw)[m] = std::polar(1.0, -f * f * t);
  }
}

double l1(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& c : v) s += std::abs(c);
  return s;
}

}  // namespace

double stability_gate(const SpectralField& u0) {
  // Advective bound: the nonlinearity contributes eigenvalues up to
  // i k_cut sup|u|^2 <= i k_cut (sum |uhat|)^2, and the stepper's imaginary
  // stability interval is 2 sqrt(2).
  const double amp2 = l1(u0.coeffs) * l1(u0.coeffs);
  const double k_cut = std::max(1.0, std::floor(u0.n_grid / 3.0));
  // A zero state has no advective scale; a non-finite or overflowing bound
  // is not a step-size question at all — integration will detect the
  // blow-up on its own.
  if (amp2 <= 0.0 || !std::isfinite(amp2)) return 1e30;
  return 2.0 * std::numbers::sqrt2 / (k_cut * amp2);
}

Trajectory integrate(const SpectralField& u0, double dt, double T,
                     const IntegrateOptions& opts) {
  DNLS_CHECK(dt > 0.0 && T > 0.0, "integrate: dt and T must be positive");
  const long long n_steps = std::llround(T / dt);
  DNLS_CHECK(n_steps >= 1 &&
                 std::abs(double(n_steps) * dt - T) <= 1e-9 * std::max(1.0, T),
             "integrate: T must be an integer number of steps");
  DNLS_CHECK(dt <= stability_gate(u0),
             "integrate: dt exceeds the stability gate for this state");
  DNLS_CHECK(opts.sample_stride >= 1 && opts.blowup_check_stride >= 1,
             "integrate: strides must be >= 1");

  const int n = u0.n_grid;
  const double t0 = u0.time;
  Workspace ws(n);

  // State: spectral coefficients, dealiased and mean-pinned on entry.  The
  // integrating-factor scheme stores the twisted variable v = conj(tw) uhat.
  std::vector<cplx> v(n);
  for (int m = 0; m < n; ++m)
    v[m] = kept(slot_freq(m, n), n) ? u0.coeffs[m] : cplx(0.0);

  const bool ifrk = opts.scheme == Scheme::integrating_factor_rk4;

  // Linear propagator bookkeeping.  tw(t) = e^{-i n^2 (t - t0)} advances by
  // the constant half-step factor and is recomputed exactly every
  // kRefresh steps to stop round-off drift.
  constexpr long long kRefresh = 512;
  std::vector<cplx> tw(n, cplx(1.0)), half(n), tw_mid(n), tw_end(n);
  for (int m = 0; m < n; ++m) {
    const double f = slot_freq(m, n);
    half[m] = std::polar(1.0, -f * f * dt / 2.0);
  }

  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), vt(n);

  Trajectory traj{{}, opts.watch, {}, {}, SpectralField(n)};
  traj.series.resize(opts.watch.size());
  std::vector<int> widx(opts.watch.size());
  for (std::size_t i = 0; i < opts.watch.size(); ++i)
    widx[i] = u0.index_of(opts.watch[i]);

  auto record = [&](long long step, const std::vector<cplx>& uhat) {
    traj.t.push_back(t0 + double(step) * dt);
    double msum = 0.0;
    for (const cplx& c : uhat) msum += std::norm(c);
    traj.mass.push_back(kTwoPi * msum);
    for (std::size_t i = 0; i < widx.size(); ++i)
      traj.series[i].push_back(uhat[widx[i]]);
  };

  // Collapse the working variable to plain spectral coefficients.
  std::vector<cplx> uhat(n);
  auto collapsed = [&]() -> const std::vector<cplx>& {
    if (!ifrk) return v;
    for (int m = 0; m < n; ++m) uhat[m] = tw[m] * v[m];
    return uhat;
  };

  record(0, collapsed());
  double last_valid = t0;

  for (long long step = 0; step < n_steps; ++step) {
    if (ifrk) {
      for (int m = 0; m < n; ++m) {
        tw_mid[m] = tw[m] * half[m];
        tw_end[m] = tw_mid[m] * half[m];
      }
      ws.nonlinear(v, tw.data(), &k1);
      for (int m = 0; m < n; ++m) vt[m] = v[m] + 0.5 * dt * k1[m];
      ws.nonlinear(vt, tw_mid.data(), &k2);
      for (int m = 0; m < n; ++m) vt[m] = v[m] + 0.5 * dt * k2[m];
      ws.nonlinear(vt, tw_mid.data(), &k3);
      for (int m = 0; m < n; ++m) vt[m] = v[m] + dt * k3[m];
      ws.nonlinear(vt, tw_end.data(), &k4);
      const double w = dt / 6.0;
      for (int m = 0; m < n; ++m)
        v[m] += w * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
      if ((step + 1) % kRefresh == 0)
        fill_linear_phase(double(step + 1) * dt, n, &tw);
      else
        tw.swap(tw_end);
    } else {
      // Strang: exact linear half-step, full nonlinear step, linear half.
      for (int m = 0; m < n; ++m) v[m] *= half[m];
      ws.nonlinear(v, nullptr, &k1);
      for (int m = 0; m < n; ++m) vt[m] = v[m] + 0.5 * dt * k1[m];
      ws.nonlinear(vt, nullptr, &k2);
      for (int m = 0; m < n; ++m) vt[m] = v[m] + 0.5 * dt * k2[m];
      ws.nonlinear(vt, nullptr, &k3);
      for (int m = 0; m < n; ++m) vt[m] = v[m] + dt * k3[m];
      ws.nonlinear(vt, nullptr, &k4);
      const double w = dt / 6.0;
      for (int m = 0; m < n; ++m) {
        v[m] += w * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        v[m] *= half[m];
      }
    }

    const bool last = step + 1 == n_steps;
    if ((step + 1) % opts.blowup_check_stride == 0 || last) {
      double acc = 0.0;
      for (const cplx& c : v) acc += std::abs(c.real()) + std::abs(c.imag());
      if (!std::isfinite(acc))
        throw BlowUpError("integrate: state blew up (non-finite spectrum)",
                          last_valid);
      last_valid = t0 + double(step + 1) * dt;
    }
    if ((step + 1) % opts.sample_stride == 0 || last)
      record(step + 1, collapsed());
  }

  traj.final_state.coeffs = collapsed();
  traj.final_state.time = t0 + double(n_steps) * dt;
  return traj;
}

double Trajectory::mass_drift() const {
  if (mass.empty()) return 0.0;
  const double m0 = mass.front();
  const double denom = m0 > 0.0 ? m0 : 1.0;
  double worst = 0.0;
  for (double m : mass) worst = std::max(worst, std::abs(m - m0) / denom);
  return worst;
}

const std::vector<cplx>& Trajectory::mode_series(int n) const {
  for (std::size_t i = 0; i < watch.size(); ++i)
    if (watch[i] == n) return series[i];
  throw std::runtime_error("trajectory: mode " + std::to_string(n) +
                           " is not on the watch list");
}

// ----------------------------------------------------------- initial data
SpectralField build_initial_data(const ModeLattice& lat,
                                 const std::array<double, 2>& xi,
                                 int correction_order, int n_grid,
                                 const SeriesCaps& caps, double xi_gate,
                                 int flow_steps) {
  DNLS_CHECK(xi[0] >= 0.0 && xi[1] >= 0.0 &&
                 std::max(xi[0], xi[1]) <= xi_gate,
             "initial data: torus actions outside the smallness gate");
  DNLS_CHECK(correction_order == 0 || correction_order == 1,
             "initial data: correction order must be 0 or 1");
  DNLS_CHECK(2 * lat.j_max < n_grid,
             "initial data: grid does not resolve the mode lattice");

  SpectralField u(n_grid);
  const double inv_s2pi = 1.0 / std::sqrt(kTwoPi);

  if (correction_order == 0) {
    if (xi[0] > 0.0) u.set_mode(lat.n1, std::sqrt(xi[0]) * inv_s2pi);
    if (xi[1] > 0.0) u.set_mode(lat.n2, std::sqrt(xi[1]) * inv_s2pi);
    return u;
  }

  // Order 1: push the torus point through the time-1 flow of the quartic
  // normalizing generator,  q' = -i dF/dqbar,  integrated by the classic
  // fourth-order stepper in the lattice variables q = sqrt(2 pi) uhat.
  DNLS_CHECK(flow_steps >= 1, "initial data: flow steps must be >= 1");
  const BirkhoffResult nf = normal_form_4(build_hamiltonian(lat, caps));

  std::vector<cplx> q(lat.mode_count(), cplx(0.0));
  q[lat.dense_index(lat.n1)] = std::sqrt(xi[0]);
  q[lat.dense_index(lat.n2)] = std::sqrt(xi[1]);

  const double h = 1.0 / flow_steps;
  std::vector<cplx> qt(q.size());
  auto rhs = [&](const std::vector<cplx>& state) {
    std::vector<cplx> g = gradient_qbar(nf.F, lat, state);
    for (cplx& c : g) c *= -kI;
    return g;
  };
  for (int s = 0; s < flow_steps; ++s) {
    const std::vector<cplx> f1 = rhs(q);
    for (std::size_t i = 0; i < q.size(); ++i) qt[i] = q[i] + 0.5 * h * f1[i];
    const std::vector<cplx> f2 = rhs(qt);
    for (std::size_t i = 0; i < q.size(); ++i) qt[i] = q[i] + 0.5 * h * f2[i];
    const std::vector<cplx> f3 = rhs(qt);
    for (std::size_t i = 0; i < q.size(); ++i) qt[i] = q[i] + h * f3[i];
    const std::vector<cplx> f4 = rhs(qt);
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] += h / 6.0 * (f1[i] + 2.0 * f2[i] + 2.0 * f3[i] + f4[i]);
  }

  for (int j : lat.all_modes()) {
    const cplx qj = q[lat.dense_index(j)];
    if (qj != cplx(0.0)) u.set_mode(j, qj * inv_s2pi);
  }
  return u;
}

}  // namespace dnls
