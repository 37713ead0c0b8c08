#pragma once

#include <cstddef>
#include <vector>

#include "zerohit/brownian_path.hpp"
#include "zerohit/flow.hpp"

namespace zerohit {

enum class Side { plus, minus };

enum class MatchMode { zero, hit_time, endpoint };

const char* to_string(MatchMode mode) noexcept;

struct WeldConfig {
  FlowConfig flow;
  /// Bisection stops once the root interval is no wider than this, rounded
  /// down to a power of two.
  double psi_tolerance = 1e-7;
  /// Limit on geometric growth steps of the initial root interval.
  int max_growth = 60;
};

/// Value of the extended boundary map at time 1.
struct BoundaryValue {
  double value = 0.0;
  double error = 0.0;
  /// The flow from x hit zero by time 1.
  bool hit = false;
  Bracket hit_bracket;
  bool resolution_limited = false;
};

/// Extended boundary map at time 1: on the plus side T - 1 when the flow from
/// x hits zero at T <= 1, else h(0, 1, x); on the minus side 1 - T, else
/// h(0, 1, x). Requires x >= 0 for plus and x <= 0 for minus. The error bar is
/// the bracket half-width after a hit, and otherwise the change under a
/// doubled step size.
BoundaryValue h_tilde(const BrownianPath& path, double kappa, Side side,
                      double x, const WeldConfig& cfg = {});

struct PsiResult {
  double x = 0.0;
  double value = 0.0;
  double error = 0.0;
  MatchMode mode = MatchMode::zero;
  /// -h_tilde(+, x), the level the minus-side map is solved against.
  double target = 0.0;
  /// h_tilde(-, -psi) - target at the returned psi.
  double residual = 0.0;
  /// Minus-side map drop across the final root interval.
  double solver_span = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  BoundaryValue at_x;
  BoundaryValue at_psi;
  std::size_t evaluations = 0;
};

/// Solves h_tilde(-, -psi) = -h_tilde(+, x) by bisection. psi(kappa, 0) = 0.
/// Throws std::runtime_error if the root interval cannot be grown.
PsiResult psi(const BrownianPath& path, double kappa, double x,
              const WeldConfig& cfg = {});

struct MatchCheck {
  double discrepancy = 0.0;
  double allowed = 0.0;
  bool pass = false;
};

/// Checks the defining equation at the returned psi. When the flow from x
/// hits by time 1 the residual is T(x) - T(-psi), allowed the solver span
/// plus both bracket half-widths; otherwise it is h(0,1,-psi) + h(0,1,x),
/// allowed the solver span alone.
MatchCheck check_matching(const PsiResult& r);

struct WeldingTable {
  std::vector<double> kappas;
  std::vector<double> xs;
  /// Row-major: entries[i * xs.size() + j] is psi(kappas[i], xs[j]).
  std::vector<PsiResult> entries;
  /// Count of adjacent pairs with psi not strictly increasing, per row.
  std::vector<std::size_t> row_violations;
  bool rows_start_at_zero = true;
  /// max |psi(kappa_{i+1}, x) - psi(kappa_i, x)|.
  double max_kappa_increment = 0.0;
  /// max |psi(kappa, x_{j+1}) - psi(kappa, x_j)|.
  double max_x_increment = 0.0;

  const PsiResult& at(std::size_t i, std::size_t j) const {
    return entries[i * xs.size() + j];
  }
  std::size_t total_row_violations() const noexcept;
};

/// Fills the table on `threads` workers; the result does not depend on the
/// thread count. Grids must be sorted, kappas in [0, 4], xs >= 0.
WeldingTable weld_field(const BrownianPath& path,
                        const std::vector<double>& kappas,
                        const std::vector<double>& xs,
                        const WeldConfig& cfg = {}, unsigned threads = 1);

}  // namespace zerohit
