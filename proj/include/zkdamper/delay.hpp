#pragma once

#include <span>
#include <vector>

#include "zkdamper/field.hpp"

namespace zkdamper {

enum class DelayTransport {
  // Trapezoidal-in-time upwind transport on n_rho cells; consistent with the
  // assembled generator and dissipative in the delay energy for any dt.
  kCrankNicolson,
  // Explicit upwind push. When dt * m = h / n_rho for an integer m the line
  // keeps n_rho * m cells and every push is an exact rotation.
  kCharacteristic,
};

enum class Taper { kNone, kLinear };

// History z(x,y,rho,t) = zeta(x,y,t - rho h) stored on rho-nodes
// rho_k = k / cell_count(), k = 0..cell_count(). Node 0 is the current state;
// node k > 0 is the donor value of cell ((k-1)/n, k/n].
class DelayLine {
 public:
  DelayLine() = default;

  // z0(., ., -rho h) = zeta0 for every rho.
  static DelayLine frozen(const ScalarField& zeta0, double h, int n_rho, double dt,
                          DelayTransport transport);
  // Snapshots of the past, oldest first, at rho = 1, 1 - 1/K, ..., 1/K.
  // Resampled linearly in rho onto the line's nodes.
  static DelayLine from_snapshots(const ScalarField& zeta0,
                                  std::span<const ScalarField> oldest_first, double h, int n_rho,
                                  double dt, DelayTransport transport);

  bool initialized() const { return !ring_.empty(); }
  int n_rho() const { return n_rho_; }
  int cell_count() const { return cells_; }
  double h() const { return h_; }
  double dt() const { return dt_; }
  double stamp() const { return stamp_; }
  DelayTransport transport() const { return transport_; }
  // True when pushes are exact rotations of the ring.
  bool exact_shift() const { return rotate_; }
  const Grid2D& grid() const;

  const ScalarField& node(int k) const;
  const ScalarField& current() const { return node(0); }
  const ScalarField& delayed() const { return node(cells_); }

  // Value at rho in [0,1]: the stored node when rho hits one, linear
  // interpolation between neighbours otherwise.
  ScalarField sample(double rho) const;

  // After the next push with state zeta_new, delayed() == gain * zeta_new + offset.
  struct EndResponse {
    double gain;
    ScalarField offset;
  };
  EndResponse end_response() const;
  double end_gain() const;

  // Advances the history by dt with inflow value zeta_new.
  void push(const ScalarField& zeta_new);

  // max |h (z_new - z_old)/dt + D_rho z_new| over the cells, D_rho the
  // upwind difference on the new level. Needs at least one push.
  double transport_residual() const;

 private:
  std::size_t slot(int k) const;
  const ScalarField& previous_node(int k) const;
  double courant() const { return dt_ * cells_ / h_; }

  std::vector<ScalarField> ring_;
  std::vector<ScalarField> previous_;
  std::vector<ScalarField> dropped_;
  std::size_t head_ = 0;
  int n_rho_ = 0;
  int cells_ = 0;
  double h_ = 0.0;
  double dt_ = 0.0;
  double stamp_ = 0.0;
  bool rotate_ = false;
  bool pushed_ = false;
  DelayTransport transport_ = DelayTransport::kCrankNicolson;
};

// Pushes zeta_now and returns the history at rho.
ScalarField push_and_sample(DelayLine& line, const ScalarField& zeta_now, double rho);

// factor * sum_k |cell_k| taper(rho_{k-1/2}) * integral(weight z_k^2).
double delay_energy(const DelayLine& line, const ScalarField& weight, double factor,
                    Taper taper = Taper::kNone);

}  // namespace zkdamper
