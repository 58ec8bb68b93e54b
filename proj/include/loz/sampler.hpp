// Samplers for uniform GT patterns with fixed top row, plus top-row
// generators (profile quantization, RSK shape of a uniform word).
#pragma once

#include "loz/core.hpp"
#include "loz/prng.hpp"

#include <cstdint>

namespace loz {

// Largest N the sequential exact sampler accepts by default.
inline constexpr int kExactSamplerBudget = 80;

// Exactly uniform pattern via sequential row sampling: each row below is
// drawn with probability proportional to its Vandermonde weight, one
// coordinate at a time by CDF inversion.  Decisions are made in long double
// Chebyshev-basis determinant ratios when a safe error margin certifies
// them, and re-made in exact integer arithmetic otherwise, so the output
// distribution is exactly uniform.  Throws BudgetExceeded for N > budget
// (coupling-from-the-past has no size limit; use sample_cftp there).
GTPattern sample_exact(const Signature& t, SeededStream stream,
                       int budget = kExactSamplerBudget);

// Telemetry from one coupling-from-the-past run.
struct CftpStats {
    std::uint64_t epochs = 0;       // number of doublings tried
    std::uint64_t final_span = 0;   // steps in the last (coalesced) epoch
    std::uint64_t total_steps = 0;  // steps across all epochs
};

// Exactly uniform pattern via monotone coupling-from-the-past over
// corner-flip dynamics.  Terminates with probability one.
GTPattern sample_cftp(const Signature& t, SeededStream stream,
                      CftpStats* stats = nullptr);

// Approximate sampler: `sweeps` full sweeps of corner-flip Glauber dynamics
// from the maximal pattern.  One sweep is N(N-1)/2 attempted flips.
GTPattern sample_glauber(const Signature& t, std::uint64_t sweeps,
                         SeededStream stream);

std::uint64_t default_glauber_sweeps(int n);

// RSK shape of a uniform word in {1..N}^n, returned as the signature
// l_i = lambda_i - i (lambda padded with zeros to length N).
Signature sample_schur_weyl(int N, long long n, SeededStream stream);

// Signature of length N whose empirical measure tracks the target density:
// t_i = floor(N * Finv((N-i)/N)) with Finv the quantile function of f.
// Requires density <= 1 everywhere (strict decrease would fail otherwise).
Signature quantize_profile(const PiecewiseDensityMeasure& f, int N);

namespace detail {

// Route selector exposed for tests: forces every coordinate decision
// through exact integer arithmetic, bypassing the float filter.
GTPattern sample_exact_route_only(const Signature& t, SeededStream stream);

}  // namespace detail

}  // namespace loz
