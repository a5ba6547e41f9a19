#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "procrastinate/model.hpp"
#include "procrastinate/offline.hpp"
#include "procrastinate/online.hpp"
#include "procrastinate/precision.hpp"

namespace procrastinate {

/// Rounds x to a multiple of 10^exponent, upward or downward. The result is
/// the correctly rounded binary value of that decimal, so it prints back as
/// the same short decimal string.
Real round_decimal(const Real& x, long exponent, bool up);

/// round_decimal with a quantum of about `delta * |x|` (a power of ten).
Real rationalize(const Real& x, const Real& delta, bool up);

/// Largest-stretch-so-far lower-bound family. Jobs 2..n have no slack, job
/// j >= 3 is released at d_{j-1}, d_3 = C_2, and for j >= 4 the due date makes
/// job j's stretch at C_{j-1} equal to s_{j-1}; completions come from an LSSF
/// co-simulation. Job 1 is (0, 4, w = 1) and job 2 is (1, 2, w = 1/2).
/// Interval lengths are rounded up and works down by the relative `delta`
/// (default 1e-12), so LSSF reaches stretch sqrt(n - 1) up to O(n delta).
/// Throws ParameterError for n < 3.
Instance gen_lssf(unsigned n, const PrecisionContext& ctx, const std::optional<Real>& delta = std::nullopt);

/// n jobs released at 0: job 1 (d = 2, w = 1), jobs 2..n (d = sqrt(n) + 2
/// rounded up to 1e-6, w = 1/2). Throws ParameterError for n < 2.
Instance gen_srpt(unsigned n, const PrecisionContext& ctx);

/// Two nested jobs (0, 2, w = 1) and (1, 1 + eps, w = eps^2/4), eps halved
/// until FIFO's max stretch reaches `target`. Throws ParameterError for
/// target <= 1 and InfeasibleError when the search budget runs out.
Instance gen_fifo(const Real& target, const PrecisionContext& ctx);

/// (0, 2, w = 1.6), (1, 1.5, w = 0.1) and (2, 2 + eps, w = eps^2/4): EDD
/// finishes job 1 late, delaying job 3. Same search and errors as gen_fifo.
Instance gen_edd(const Real& target, const PrecisionContext& ctx);

/// Sum-of-square-roots query: is sum sqrt(x_i) >= threshold?
struct SsrQuery {
  std::vector<std::uint64_t> xs;
  std::uint64_t threshold = 1;

  /// Throws ParameterError for an empty list, a zero entry or threshold 0.
  void validate() const;
};

/// Lazy unit-slope jobs i = 1..n-1 with back-to-back intervals of length
/// x_i + 2 and work (x_i^2 + 3 x_i + 4)/2, plus nonlazy job n (base speed 1,
/// interval [0, sum of lengths], work = threshold). Each lazy job leaves
/// exactly sqrt(x_i) idle time when pushed right.
Instance reduce_ssr(const SsrQuery& q, const PrecisionContext& ctx);

/// Decides the query by evaluating sum sqrt(x_i) - threshold at working
/// precision. Perfect squares are summed exactly as integers; the verdict is
/// Indeterminate when the irrational remainder is within tolerance of the
/// integer gap. A Feasible verdict carries the fill witness for the reduced
/// instance.
FeasibilityVerdict check_reduction(const SsrQuery& q, const PrecisionContext& ctx);

enum class AdversaryCase { WaitedOnJob2, RanJob2 };

struct AdversaryOutcome {
  Instance instance;
  SimTrace trace;
  bool missed = false;
  std::vector<JobId> late_jobs;
  std::vector<AdversaryCase> cases;  // one per round
};

/// Online adversary that forces a missed due date on a feasible stream.
///
/// Seeds per round: job a (0, 8, w = 10) and job b (2, 4, w = 1), shifted
/// past the previous round. The policy is simulated up to b's release. If it
/// does not run b there, a no-slack job is placed inside b's interval so that
/// b and it need all of [r_b, d_b]; otherwise a no-slack job after d_b makes
/// job a need every instant LRTB gives it. Works are rounded down and due
/// dates of the new job inward by 1e-6 relative so the stream stays
/// feasible.
AdversaryOutcome adaptive_adversary(const PolicySpec& policy, const PrecisionContext& ctx, unsigned rounds = 1);

/// Seeded random lazy instance accepted by LRTB with a positive margin.
/// Releases fall in [0, n], lengths are log-uniform in [0.25, 4], slopes in
/// [0.5, 2]; works are a random fraction of the full ramp area, shrunk after
/// repeated rejections. Throws ParameterError for n = 0 and InfeasibleError
/// when the rejection budget runs out.
Instance gen_random_feasible(unsigned n, std::uint64_t seed, const PrecisionContext& ctx);

}  // namespace procrastinate
