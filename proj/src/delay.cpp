#include "zkdamper/delay.hpp"

#include <algorithm>
#include <cmath>

#include "zkdamper/error.hpp"

namespace zkdamper {

namespace {

constexpr double kShiftTolerance = 1e-9;
constexpr std::size_t kMaxStoredValues = 400'000'000;

struct Layout {
  int cells;
  bool rotate;
};

Layout choose_layout(const Grid2D& grid, double h, int n_rho, double dt,
                     DelayTransport transport) {
  if (!(h > 0.0)) throw ConfigError("delay h must be positive");
  if (n_rho < 1) throw ConfigError("n_rho must be positive");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (transport == DelayTransport::kCrankNicolson) return {n_rho, false};

  const double ratio = h / (n_rho * dt);
  const double m = std::round(ratio);
  if (m >= 1.0 && std::abs(ratio - m) <= kShiftTolerance * ratio) {
    const double stored = (n_rho * m + 1.0) * static_cast<double>(grid.node_count());
    if (stored > static_cast<double>(kMaxStoredValues))
      throw ConfigError("exact-shift history would exceed the memory cap; use cn transport");
    return {n_rho * static_cast<int>(m), true};
  }
  if (dt * n_rho / h > 1.0)
    throw ConfigError("explicit upwind delay transport needs dt * n_rho / h <= 1");
  return {n_rho, false};
}

}  // namespace

DelayLine DelayLine::frozen(const ScalarField& zeta0, double h, int n_rho, double dt,
                            DelayTransport transport) {
  return from_snapshots(zeta0, std::span<const ScalarField>(&zeta0, 1), h, n_rho, dt, transport);
}

DelayLine DelayLine::from_snapshots(const ScalarField& zeta0,
                                    std::span<const ScalarField> oldest_first, double h,
                                    int n_rho, double dt, DelayTransport transport) {
  if (oldest_first.empty()) throw ConfigError("history needs at least one snapshot");
  for (const auto& s : oldest_first) require_same_grid(zeta0, s);

  const Layout layout = choose_layout(zeta0.grid(), h, n_rho, dt, transport);
  DelayLine line;
  line.n_rho_ = n_rho;
  line.cells_ = layout.cells;
  line.rotate_ = layout.rotate;
  line.h_ = h;
  line.dt_ = dt;
  line.transport_ = transport;

  // Source knots at rho = i/K, i = 0..K; knot 0 is zeta0.
  const auto K = static_cast<long long>(oldest_first.size());
  auto source = [&](long long i) -> const ScalarField& {
    return i == 0 ? zeta0 : oldest_first[static_cast<std::size_t>(K - i)];
  };
  line.ring_.reserve(static_cast<std::size_t>(line.cells_) + 1);
  for (long long k = 0; k <= line.cells_; ++k) {
    const long long num = k * K;
    const long long q = num / line.cells_;
    const long long rem = num % line.cells_;
    if (rem == 0 || &source(q) == &source(q + 1)) {
      line.ring_.push_back(source(q));
    } else {
      const double frac = static_cast<double>(rem) / line.cells_;
      ScalarField v = (1.0 - frac) * ScalarField(source(q));
      v.axpy(frac, source(q + 1));
      line.ring_.push_back(std::move(v));
    }
  }
  return line;
}

const Grid2D& DelayLine::grid() const {
  if (!initialized()) throw ConfigError("delay line has no history");
  return ring_.front().grid();
}

std::size_t DelayLine::slot(int k) const {
  return (head_ + static_cast<std::size_t>(k)) % ring_.size();
}

const ScalarField& DelayLine::node(int k) const {
  if (!initialized()) throw ConfigError("sampling a delay line before its history is set");
  if (k < 0 || k > cells_) throw ConfigError("delay node index out of range");
  return ring_[slot(k)];
}

ScalarField DelayLine::sample(double rho) const {
  if (!initialized()) throw ConfigError("sampling a delay line before its history is set");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0,1]");
  const double pos = rho * cells_;
  const double base = std::floor(pos);
  const int k = std::min(static_cast<int>(base), cells_);
  const double frac = pos - base;
  if (frac == 0.0 || k == cells_) return node(k);
  ScalarField v = (1.0 - frac) * ScalarField(node(k));
  v.axpy(frac, node(k + 1));
  return v;
}

double DelayLine::end_gain() const {
  if (transport_ != DelayTransport::kCrankNicolson) return 0.0;
  const double c = courant();
  return std::pow(0.5 * c / (1.0 + 0.5 * c), cells_);
}

DelayLine::EndResponse DelayLine::end_response() const {
  if (!initialized()) throw ConfigError("delay line has no history");
  if (rotate_) return {0.0, node(cells_ - 1)};
  const double c = courant();
  if (transport_ == DelayTransport::kCharacteristic) {
    ScalarField v = (1.0 - c) * ScalarField(node(cells_));
    v.axpy(c, node(cells_ - 1));
    return {0.0, std::move(v)};
  }
  // Trapezoidal upwind with zero inflow gives the offset; the inflow enters
  // with gain (c/2 / (1 + c/2))^k at node k.
  const double denom = 1.0 + 0.5 * c;
  ScalarField q(grid());
  for (int k = 1; k <= cells_; ++k) {
    ScalarField next = (1.0 - 0.5 * c) * ScalarField(node(k));
    next.axpy(0.5 * c, node(k - 1));
    next.axpy(0.5 * c, q);
    next *= 1.0 / denom;
    q = std::move(next);
  }
  return {end_gain(), std::move(q)};
}

void DelayLine::push(const ScalarField& zeta_new) {
  if (!initialized()) throw ConfigError("pushing onto a delay line without history");
  require_same_grid(ring_.front(), zeta_new);
  if (rotate_) {
    head_ = (head_ + ring_.size() - 1) % ring_.size();
    dropped_.assign(1, std::move(ring_[head_]));
    ring_[head_] = zeta_new;
  } else {
    previous_.clear();
    previous_.reserve(ring_.size());
    for (int k = 0; k <= cells_; ++k) previous_.push_back(node(k));
    const double c = courant();
    if (transport_ == DelayTransport::kCharacteristic) {
      for (int k = cells_; k >= 1; --k) {
        ScalarField& zk = ring_[slot(k)];
        zk *= (1.0 - c);
        zk.axpy(c, previous_[static_cast<std::size_t>(k - 1)]);
      }
      ring_[slot(0)] = zeta_new;
    } else {
      ring_[slot(0)] = zeta_new;
      const double denom = 1.0 + 0.5 * c;
      for (int k = 1; k <= cells_; ++k) {
        ScalarField& zk = ring_[slot(k)];
        zk *= (1.0 - 0.5 * c);
        zk.axpy(0.5 * c, previous_[static_cast<std::size_t>(k - 1)]);
        zk.axpy(0.5 * c, ring_[slot(k - 1)]);
        zk *= 1.0 / denom;
      }
    }
  }
  stamp_ += dt_;
  pushed_ = true;
}

const ScalarField& DelayLine::previous_node(int k) const {
  if (rotate_) return k < cells_ ? node(k + 1) : dropped_.front();
  return previous_[static_cast<std::size_t>(k)];
}

double DelayLine::transport_residual() const {
  if (!pushed_) throw ConfigError("transport residual needs two consecutive history states");
  double worst = 0.0;
  const double inv_drho = static_cast<double>(cells_);
  for (int k = 1; k <= cells_; ++k) {
    const auto now = node(k).values();
    const auto before = previous_node(k).values();
    const auto upstream = node(k - 1).values();
    for (std::size_t p = 0; p < now.size(); ++p) {
      const double r = h_ * (now[p] - before[p]) / dt_ + (now[p] - upstream[p]) * inv_drho;
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

ScalarField push_and_sample(DelayLine& line, const ScalarField& zeta_now, double rho) {
  line.push(zeta_now);
  return line.sample(rho);
}

double delay_energy(const DelayLine& line, const ScalarField& weight, double factor,
                    Taper taper) {
  const int n = line.cell_count();
  double total = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double mid = (k - 0.5) / n;
    const double t = taper == Taper::kLinear ? 1.0 - mid : 1.0;
    total += t * integrate_weighted(weight, line.node(k), 2);
  }
  return factor * total / n;
}

}  // namespace zkdamper
