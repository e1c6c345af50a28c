// Pseudo-spectral integrator for  i u_t + u_xx + i |u|^2 u_x = 0  on the
// circle with zero mean, plus builders for two-mode torus initial data.
//
// Conventions.  u(x) = sum_n uhat_n e^{inx} with uhat_0 = 0; the lattice
// variables are q_n = sqrt(2 pi) uhat_n, so the mass integral
// int |u|^2 dx = 2 pi sum |uhat_n|^2 = sum |q_n|^2.  The equation of motion
// is u_t = i u_xx - |u|^2 u_x; a plane wave A e^{inx} rotates as e^{-i w t}
// with w = n^2 + n |A|^2.
#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/series.hpp"

namespace dnls {

// ------------------------------------------------------------------ field
// Spectral state at one instant.  Coefficients are stored in transform
// order: index m holds frequency n = m for m < n_grid/2 and n = m - n_grid
// otherwise.  The mean mode is pinned to zero.
struct SpectralField {
  int n_grid = 0;
  std::vector<cplx> coeffs;
  double time = 0.0;

  explicit SpectralField(int n_grid);

  // Transform-order index of frequency n; requires |n| < n_grid/2.
  int index_of(int n) const;
  cplx mode(int n) const { return coeffs[index_of(n)]; }
  // n = 0 is rejected: the phase space is zero-mean.
  void set_mode(int n, cplx v);

  // int |u|^2 dx = 2 pi sum |uhat_n|^2.
  double mass() const;
  // int -i ubar u_x dx / (2 pi) = sum n |uhat_n|^2 (momentum density).
  double momentum() const;
};

// Single-mode state A e^{inx}.
SpectralField plane_wave(int n, cplx A, int n_grid);

// Exact rotation frequency of the plane wave A e^{inx}: n^2 + n |A|^2.
double plane_wave_frequency(int n, double A);

// -------------------------------------------------------------- integrate
enum class Scheme { integrating_factor_rk4, strang_split };

struct IntegrateOptions {
  Scheme scheme = Scheme::integrating_factor_rk4;
  // Modes whose complex time series are recorded.
  std::vector<int> watch;
  // Record every sample_stride-th step (plus t = 0).
  int sample_stride = 1;
  // Steps between finiteness checks.
  int blowup_check_stride = 32;
};

// Thrown when the state stops being finite; carries the last time at which
// it was known finite.
struct BlowUpError : std::runtime_error {
  double last_valid_time;
  BlowUpError(const std::string& what, double t)
      : std::runtime_error(what), last_valid_time(t) {}
};

struct Trajectory {
  std::vector<double> t;
  std::vector<int> watch;
  // series[i][k]: coefficient of mode watch[i] at time t[k].
  std::vector<std::vector<cplx>> series;
  // Mass integral at each sample.
  std::vector<double> mass;
  SpectralField final_state;

  // max_k |mass_k - mass_0| / mass_0 (0 for the zero solution).
  double mass_drift() const;
  const std::vector<cplx>& mode_series(int n) const;
};

// Largest dt the scheme accepts for this state: the derivative nonlinearity
// contributes advective eigenvalues up to i k_max sup|u|^2, and the classic
// fourth-order stepper covers the imaginary axis up to 2*sqrt(2).  The exact
// integrating factor removes the linear n^2 phases entirely, so the same
// gate applies to both schemes.
double stability_gate(const SpectralField& u0);

// Integrate over [u0.time, u0.time + n dt] with n = round(T / dt); requires
// n dt to match T to 1e-9 relative.  The top third of the spectrum is
// zeroed after every nonlinear product and the mean mode stays pinned.
Trajectory integrate(const SpectralField& u0, double dt, double T,
                     const IntegrateOptions& opts = {});

// ----------------------------------------------------------- initial data
// Two-mode torus data.  Order 0 excites the tangential pair alone with
// amplitudes sqrt(xi_j / 2 pi).  Order 1 additionally pushes the point
// through the time-1 flow of the quartic normalizing generator (by a
// fourth-order step loop on q' = -i dF/dqbar), which seeds the
// O(|xi|^{3/2}) sideband content carried by the true torus.
SpectralField build_initial_data(const ModeLattice& lat,
                                 const std::array<double, 2>& xi,
                                 int correction_order, int n_grid,
                                 const SeriesCaps& caps = SeriesCaps{},
                                 double xi_gate = 0.05, int flow_steps = 64);

}  // namespace dnls
