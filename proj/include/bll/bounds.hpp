#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "bll/rational.hpp"

namespace bll::bounds {

// Closed-form thresholds on the white-noise weight beta. "loc" bounds certify
// full Bell locality (nonviolation of every general Bell inequality under
// generalized measurements); "sep" bounds are the known full-separability
// thresholds used for comparison. All values are exact rationals.

// GHZ state mixed with white noise: fully Bell local for
// beta <= 1 / (1 + 2 d^{N-1} (d-1)^{N-1}).
inline Rational beta_loc_ghz(int d, int n_sites) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("beta_loc_ghz: need d >= 2 and N >= 2");
  }
  const BigInt x = 2 * ipow(d, static_cast<unsigned>(n_sites - 1)) *
                   ipow(d - 1, static_cast<unsigned>(n_sites - 1));
  return Rational(1, 1 + x);
}

// Pure state with largest conditional weight gamma:
// beta <= 1 / (1 + d^N ((2d-1)^{N-1} - 1) gamma), gamma in [d^{-(N-1)}, 1].
inline Rational beta_loc_pure(int d, int n_sites, const Rational& gamma) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("beta_loc_pure: need d >= 2 and N >= 2");
  }
  const Rational gamma_min(1, ipow(d, static_cast<unsigned>(n_sites - 1)));
  if (gamma < gamma_min || gamma > 1) {
    throw std::domain_error("beta_loc_pure: gamma must lie in [d^{-(N-1)}, 1]");
  }
  const BigInt scale = ipow(d, static_cast<unsigned>(n_sites)) *
                       (ipow(2 * d - 1, static_cast<unsigned>(n_sites - 1)) - 1);
  return 1 / (1 + scale * gamma);
}

// Range guaranteed for an arbitrary N-qudit state: the endpoints are
// beta_loc_pure at gamma = 1 and gamma = d^{-(N-1)}.
inline std::pair<Rational, Rational> beta_loc_general_range(int d, int n_sites) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("beta_loc_general_range: need d >= 2 and N >= 2");
  }
  const BigInt pow_n = ipow(2 * d - 1, static_cast<unsigned>(n_sites - 1));
  const BigInt dn = ipow(d, static_cast<unsigned>(n_sites));
  const Rational lo(1, dn * pow_n - dn + 1);
  const Rational hi(1, d * pow_n - d + 1);
  return {lo, hi};
}

enum class SepKind {
  kQubitGeneral,  // arbitrary N-qubit state: 1 / (1 + 2^{2N-1}); d = 2 only
  kGhzQubit,      // N-qubit GHZ (iff): 1 / (1 + 2^{N-1}); d = 2 only
  kGeneral,       // arbitrary N-qudit state: 1 / (1 + d^{2N-1})
  kGhzPrime,      // N-qudit GHZ, prime d (iff): 1 / (1 + d^{N-1})
  kNonsepGhz      // fully nonseparable above 1 / (1 + d^{N-1})
};

inline Rational beta_sep(int d, int n_sites, SepKind kind) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("beta_sep: need d >= 2 and N >= 2");
  }
  switch (kind) {
    case SepKind::kQubitGeneral:
      if (d != 2) throw std::invalid_argument("beta_sep: qubit-general requires d = 2");
      return Rational(1, 1 + ipow(2, static_cast<unsigned>(2 * n_sites - 1)));
    case SepKind::kGhzQubit:
      if (d != 2) throw std::invalid_argument("beta_sep: ghz-qubit requires d = 2");
      return Rational(1, 1 + ipow(2, static_cast<unsigned>(n_sites - 1)));
    case SepKind::kGeneral:
      return Rational(1, 1 + ipow(d, static_cast<unsigned>(2 * n_sites - 1)));
    case SepKind::kGhzPrime:
    case SepKind::kNonsepGhz:
      return Rational(1, 1 + ipow(d, static_cast<unsigned>(n_sites - 1)));
  }
  throw std::invalid_argument("beta_sep: unknown kind");
}

// Two-sided bracket for the GHZ separability threshold at general d.
inline std::pair<Rational, Rational> beta_sep_ghz_range(int d, int n_sites) {
  return {beta_sep(d, n_sites, SepKind::kGeneral),
          beta_sep(d, n_sites, SepKind::kNonsepGhz)};
}

struct GapResult {
  Rational gap;           // upper locality endpoint minus general separability bound
  Rational ratio_to_sep;  // gap / separability bound
};

// Largest possible margin by which the locality range exceeds the known
// general separability threshold.
inline GapResult gap_max(int d, int n_sites) {
  if (d < 2 || n_sites < 3) {
    throw std::invalid_argument("gap_max: need d >= 2 and N >= 3");
  }
  const Rational hi = beta_loc_general_range(d, n_sites).second;
  const Rational sep = beta_sep(d, n_sites, SepKind::kGeneral);
  const Rational gap = hi - sep;
  return {gap, gap / sep};
}

struct DominanceResult {
  bool all_hold = true;
  int failing_d = 0;
  int failing_n = 0;
};

// Strict inequality beta_loc_ghz(d, N) > 1 / (1 + d^{2N-1}) over a grid, in
// exact arithmetic. Returns the first failing cell if any.
inline DominanceResult dominance_check(int d_lo, int d_hi, int n_lo, int n_hi) {
  if (d_lo < 2 || d_hi > 64 || n_lo < 3 || n_hi > 32 || d_lo > d_hi || n_lo > n_hi) {
    throw std::invalid_argument("dominance_check: ranges must lie within d in [2,64], N in [3,32]");
  }
  for (int d = d_lo; d <= d_hi; ++d) {
    for (int n = n_lo; n <= n_hi; ++n) {
      const Rational lhs = beta_loc_ghz(d, n);
      const Rational rhs(1, 1 + ipow(d, static_cast<unsigned>(2 * n - 1)));
      if (!(lhs > rhs)) return {false, d, n};
    }
  }
  return {};
}

enum class AsymptoticKind {
  kGhzLargeN,      // beta_loc_ghz * 2 d^{N-1} (d-1)^{N-1}
  kGhzLargeD,      // beta_loc_ghz * 2 d^{2N-2}
  kGeneralLargeN,  // endpoints * (d^N (2d-1)^{N-1}, d (2d-1)^{N-1})
  kGeneralLargeD   // endpoints * (2^{N-1} d^{2N-1}, 2^{N-1} d^N)
};

struct AsymptoticRatio {
  double lo = 0.0;
  double hi = 0.0;  // equals lo for the ghz kinds
};

// Bound value times its claimed asymptotic denominator; approaches 1 as the
// growing variable (N or d, by kind) increases.
inline AsymptoticRatio asymptotic_ratio(AsymptoticKind kind, int d, int n_sites) {
  if (d < 2 || n_sites < 2) {
    throw std::invalid_argument("asymptotic_ratio: need d >= 2 and N >= 2");
  }
  const bool grows_n = kind == AsymptoticKind::kGhzLargeN || kind == AsymptoticKind::kGeneralLargeN;
  if ((grows_n ? n_sites : d) < 3) {
    throw std::domain_error("asymptotic_ratio: the growing variable must be >= 3");
  }
  const unsigned nm1 = static_cast<unsigned>(n_sites - 1);
  switch (kind) {
    case AsymptoticKind::kGhzLargeN: {
      const Rational r = beta_loc_ghz(d, n_sites) * Rational(2 * ipow(d, nm1) * ipow(d - 1, nm1));
      return {to_double(r), to_double(r)};
    }
    case AsymptoticKind::kGhzLargeD: {
      const Rational r =
          beta_loc_ghz(d, n_sites) * Rational(2 * ipow(d, static_cast<unsigned>(2 * n_sites - 2)));
      return {to_double(r), to_double(r)};
    }
    case AsymptoticKind::kGeneralLargeN: {
      const auto [lo, hi] = beta_loc_general_range(d, n_sites);
      const BigInt pow_n = ipow(2 * d - 1, nm1);
      return {to_double(lo * Rational(ipow(d, static_cast<unsigned>(n_sites)) * pow_n)),
              to_double(hi * Rational(d * pow_n))};
    }
    case AsymptoticKind::kGeneralLargeD: {
      const auto [lo, hi] = beta_loc_general_range(d, n_sites);
      const BigInt two_pow = ipow(2, nm1);
      return {to_double(lo * Rational(two_pow * ipow(d, static_cast<unsigned>(2 * n_sites - 1)))),
              to_double(hi * Rational(two_pow * ipow(d, static_cast<unsigned>(n_sites))))};
    }
  }
  throw std::invalid_argument("asymptotic_ratio: unknown kind");
}

// Every threshold for one (d, N) cell. Qubit-only separability bounds are
// present only at d = 2; the pure-state locality bound is present when a
// gamma is supplied; the gap columns require N >= 3.
struct BoundReport {
  int d = 0;
  int n_sites = 0;
  Rational beta_loc_ghz;
  std::optional<Rational> beta_loc_pure;
  Rational beta_loc_general_lo;
  Rational beta_loc_general_hi;
  std::optional<Rational> beta_sep_qubit_general;
  std::optional<Rational> beta_sep_ghz_qubit;
  Rational beta_sep_general;
  Rational beta_sep_ghz_lo;
  Rational beta_sep_ghz_hi;
  Rational beta_nonsep_ghz;
  std::optional<Rational> gap_max_value;
  std::optional<Rational> gap_ratio;

  static BoundReport compute(int d, int n_sites,
                             const std::optional<Rational>& gamma = std::nullopt) {
    BoundReport r;
    r.d = d;
    r.n_sites = n_sites;
    r.beta_loc_ghz = bounds::beta_loc_ghz(d, n_sites);
    if (gamma.has_value()) r.beta_loc_pure = beta_loc_pure(d, n_sites, *gamma);
    std::tie(r.beta_loc_general_lo, r.beta_loc_general_hi) = beta_loc_general_range(d, n_sites);
    if (d == 2) {
      r.beta_sep_qubit_general = beta_sep(d, n_sites, SepKind::kQubitGeneral);
      r.beta_sep_ghz_qubit = beta_sep(d, n_sites, SepKind::kGhzQubit);
    }
    r.beta_sep_general = beta_sep(d, n_sites, SepKind::kGeneral);
    std::tie(r.beta_sep_ghz_lo, r.beta_sep_ghz_hi) = beta_sep_ghz_range(d, n_sites);
    r.beta_nonsep_ghz = beta_sep(d, n_sites, SepKind::kNonsepGhz);
    if (n_sites >= 3) {
      const GapResult g = bounds::gap_max(d, n_sites);
      r.gap_max_value = g.gap;
      r.gap_ratio = g.ratio_to_sep;
    }
    return r;
  }
};

}  // namespace bll::bounds
