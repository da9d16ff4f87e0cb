#include "spgm/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spgm/error.hpp"

namespace spgm {

namespace {

void check_common(double L, double sigma2, double Phi0) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidParameter("L must be finite and > 0");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw InvalidParameter("sigma2 must be finite and >= 0");
  }
  if (!(Phi0 > 0.0) || !std::isfinite(Phi0)) {
    throw InvalidParameter("Phi0 must be finite and > 0");
  }
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("boundary epsilon must be > 0");
}

// Keeps M strictly above the floor with gamma < 1.
ScheduleParams finalize(double M, double L, const VariantConstants& c, double eps) {
  double gamma = c.gamma_factor * L / (M - L);
  if (M <= c.floor_factor * L || !(gamma < 1.0) || !(gamma > 0.0)) {
    M = std::max(c.floor_factor, 1.0 + c.gamma_factor) * L * (1.0 + eps);
    gamma = c.gamma_factor * L / (M - L);
  }
  return {M, gamma};
}

}  // namespace

VariantConstants variant_constants(ScheduleVariant variant, InexactConstants inexact) {
  const double sqrt2 = std::sqrt(2.0);
  switch (variant) {
    case ScheduleVariant::kConstantThm51:
    case ScheduleVariant::kTimeVaryingCor52:
    case ScheduleVariant::kManual:
      return {4.0, 3.0, 3.0 / 8.0};
    case ScheduleVariant::kConstantVrThm52:
      return {1.0 + 3.0 * sqrt2, 3.0 * sqrt2, sqrt2 / 8.0};
    case ScheduleVariant::kConstantInexactThm61:
      if (inexact == InexactConstants::kProofDerived) {
        return {7.0, std::sqrt(152.0 / 17.0), std::sqrt(19.0 / 136.0)};
      }
      return {4.0, std::sqrt(456.0 / 17.0), std::sqrt(19.0 / 408.0)};
  }
  throw InvalidParameter("unknown schedule variant");
}

std::string_view variant_name(ScheduleVariant variant) {
  switch (variant) {
    case ScheduleVariant::kConstantThm51: return "constant_thm51";
    case ScheduleVariant::kConstantVrThm52: return "constant_vr_thm52";
    case ScheduleVariant::kConstantInexactThm61: return "constant_inexact_thm61";
    case ScheduleVariant::kTimeVaryingCor52: return "timevarying_cor52";
    case ScheduleVariant::kManual: return "manual";
  }
  return "unknown";
}

ScheduleVariant parse_variant(std::string_view name) {
  for (auto v : {ScheduleVariant::kConstantThm51, ScheduleVariant::kConstantVrThm52,
                 ScheduleVariant::kConstantInexactThm61, ScheduleVariant::kTimeVaryingCor52,
                 ScheduleVariant::kManual}) {
    if (variant_name(v) == name) return v;
  }
  throw InvalidInput("unknown schedule variant '" + std::string(name) + "'");
}

double gamma_rule(ScheduleVariant variant, double L, double M, InexactConstants inexact) {
  if (!(M > L)) throw InvalidParameter("gamma rule needs M > L");
  return variant_constants(variant, inexact).gamma_factor * L / (M - L);
}

double lyapunov_a(ScheduleVariant variant, double L, InexactConstants inexact) {
  if (!(L > 0.0)) throw InvalidParameter("L must be > 0");
  return variant_constants(variant, inexact).lyapunov_aL / L;
}

ScheduleParams schedule_constant(ScheduleVariant variant, double L, double sigma2,
                                 double Phi0, std::size_t K, InexactConstants inexact,
                                 double eps) {
  check_common(L, sigma2, Phi0);
  check_eps(eps);
  if (K == 0) throw InvalidParameter("K must be >= 1");
  const double root = std::sqrt(static_cast<double>(K) * L * sigma2 / Phi0);
  double M = 0.0;
  switch (variant) {
    case ScheduleVariant::kConstantThm51:
      M = 4.0 * L + std::pow(3.0, 1.5) / 2.0 * root;
      break;
    case ScheduleVariant::kConstantVrThm52:
      M = (1.0 + 3.0 * std::sqrt(2.0)) * L + std::pow(3.0, 1.5) / std::pow(2.0, 0.75) * root;
      break;
    case ScheduleVariant::kConstantInexactThm61: {
      const double base = inexact == InexactConstants::kProofDerived ? 7.0 : 4.0;
      M = base * L + std::sqrt(8.0) * root;
      break;
    }
    default:
      throw InvalidParameter("schedule_constant needs a constant variant");
  }
  return finalize(M, L, variant_constants(variant, inexact), eps);
}

ScheduleParams schedule_timevarying(std::size_t k, double L, double sigma2, double Phi0,
                                    double eps) {
  check_common(L, sigma2, Phi0);
  check_eps(eps);
  const double M =
      std::max(std::sqrt(static_cast<double>(k + 1) * L * sigma2 / Phi0), 4.0 * L);
  return finalize(M, L, variant_constants(ScheduleVariant::kTimeVaryingCor52), eps);
}

Schedule Schedule::constant(ScheduleVariant variant, double L, double sigma2, double Phi0,
                            std::size_t K, InexactConstants inexact, double eps) {
  Schedule s;
  s.variant_ = variant;
  s.inexact_ = inexact;
  s.L_ = L;
  s.sigma2_ = sigma2;
  s.Phi0_ = Phi0;
  s.eps_ = eps;
  s.fixed_ = schedule_constant(variant, L, sigma2, Phi0, K, inexact, eps);
  return s;
}

Schedule Schedule::timevarying(double L, double sigma2, double Phi0, double eps) {
  check_common(L, sigma2, Phi0);
  check_eps(eps);
  Schedule s;
  s.variant_ = ScheduleVariant::kTimeVaryingCor52;
  s.L_ = L;
  s.sigma2_ = sigma2;
  s.Phi0_ = Phi0;
  s.eps_ = eps;
  return s;
}

Schedule Schedule::manual(double M, double gamma, double L) {
  if (!(M > 0.0) || !std::isfinite(M)) throw InvalidParameter("manual M must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InvalidParameter("manual gamma must lie in (0, 1]");
  }
  if (!(L > 0.0)) throw InvalidParameter("L must be > 0");
  Schedule s;
  s.variant_ = ScheduleVariant::kManual;
  s.L_ = L;
  s.fixed_ = {M, gamma};
  return s;
}

ScheduleParams Schedule::at(std::size_t k) const {
  if (variant_ == ScheduleVariant::kTimeVaryingCor52) {
    return schedule_timevarying(k, L_, sigma2_, Phi0_, eps_);
  }
  return fixed_;
}

double Schedule::floor() const {
  if (variant_ == ScheduleVariant::kManual) return 0.0;
  return variant_constants(variant_, inexact_).floor_factor * L_;
}

double Schedule::lyapunov_a() const { return spgm::lyapunov_a(variant_, L_, inexact_); }

}  // namespace spgm
