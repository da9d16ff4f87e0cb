#pragma once

// Stepsize coefficient M_k and momentum weight gamma_k per iteration.

#include <cstddef>
#include <optional>
#include <string_view>

namespace spgm {

enum class ScheduleVariant {
  kConstantThm51,        // M = 4L + (3^1.5/2) sqrt(K L s2 / Phi0), gamma = 3L/(M-L)
  kConstantVrThm52,      // M = (1+3 sqrt2)L + (3^1.5/2^0.75) sqrt(...), gamma = 3 sqrt2 L/(M-L)
  kConstantInexactThm61, // inexact prox; constants per InexactConstants
  kTimeVaryingCor52,     // M_k = max(sqrt((k+1) L s2 / Phi0), 4L), gamma_k = 3L/(M_k-L)
  kManual,
};

// The inexact-prox constants exist in two mutually inconsistent versions.
// kProofDerived: gamma = sqrt(152/17) L/(M-L), M = 7L + sqrt(8KL s2/Phi0),
//                a = sqrt(19/136)/L, floor 7L.
// kAsStated:     gamma = sqrt(456/17) L/(M-L), M = 4L + sqrt(8KL s2/Phi0),
//                a = sqrt(19/408)/L, floor 4L.
enum class InexactConstants { kProofDerived, kAsStated };

inline constexpr double kDefaultBoundaryEpsilon = 1e-3;

struct ScheduleParams {
  double M = 0.0;
  double gamma = 1.0;
};

struct VariantConstants {
  double floor_factor = 0.0;  // M must exceed floor_factor * L
  double gamma_factor = 0.0;  // gamma = gamma_factor * L / (M - L)
  double lyapunov_aL = 0.0;   // a = lyapunov_aL / L
};

VariantConstants variant_constants(ScheduleVariant variant,
                                   InexactConstants inexact = InexactConstants::kProofDerived);

std::string_view variant_name(ScheduleVariant variant);
// Accepts the names produced by variant_name; throws InvalidInput otherwise.
ScheduleVariant parse_variant(std::string_view name);

// gamma = gamma_factor * L / (M - L) for the variant's rule. Manual uses the
// constant-schedule rule 3L/(M-L).
double gamma_rule(ScheduleVariant variant, double L, double M,
                  InexactConstants inexact = InexactConstants::kProofDerived);

double lyapunov_a(ScheduleVariant variant, double L,
                  InexactConstants inexact = InexactConstants::kProofDerived);

// Constant variants only. Throws InvalidParameter for Phi0 <= 0, K = 0, L <= 0
// or sigma2 < 0. When the formula lands on or below the floor (or gamma >= 1)
// M is lifted to max(floor, (1 + gamma_factor) L) * (1 + eps).
ScheduleParams schedule_constant(ScheduleVariant variant, double L, double sigma2,
                                 double Phi0, std::size_t K,
                                 InexactConstants inexact = InexactConstants::kProofDerived,
                                 double eps = kDefaultBoundaryEpsilon);

ScheduleParams schedule_timevarying(std::size_t k, double L, double sigma2, double Phi0,
                                    double eps = kDefaultBoundaryEpsilon);

// A variant bound to its inputs; at(k) gives (M_k, gamma_k).
class Schedule {
 public:
  static Schedule constant(ScheduleVariant variant, double L, double sigma2, double Phi0,
                           std::size_t K,
                           InexactConstants inexact = InexactConstants::kProofDerived,
                           double eps = kDefaultBoundaryEpsilon);
  static Schedule timevarying(double L, double sigma2, double Phi0,
                              double eps = kDefaultBoundaryEpsilon);
  // gamma in (0, 1], M > 0. No floor is enforced.
  static Schedule manual(double M, double gamma, double L);

  ScheduleParams at(std::size_t k) const;

  ScheduleVariant variant() const { return variant_; }
  bool is_constant() const { return variant_ != ScheduleVariant::kTimeVaryingCor52; }
  // floor_factor * L; zero for manual schedules.
  double floor() const;
  double lyapunov_a() const;
  double L() const { return L_; }

 private:
  Schedule() = default;

  ScheduleVariant variant_ = ScheduleVariant::kManual;
  InexactConstants inexact_ = InexactConstants::kProofDerived;
  double L_ = 1.0;
  double sigma2_ = 0.0;
  double Phi0_ = 1.0;
  double eps_ = kDefaultBoundaryEpsilon;
  ScheduleParams fixed_;
};

}  // namespace spgm
