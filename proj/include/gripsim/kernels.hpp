#pragma once

// Reduction kernels behind the EMG feature extractor. Every kernel has a
// scalar reference in `scalar::`; vector variants live in `avx2::` / `neon::`
// and are picked once at startup from the CPU, overridable with
// GRIPSIM_ISA=scalar|avx2|neon or force_isa().

#include <optional>
#include <span>
#include <string_view>

namespace gripsim::kernels {

struct Moments {
  double sum = 0.0;
  double sum_abs = 0.0;
  double sum_sq = 0.0;
};

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

/// Compiled in and supported by this CPU.
bool isa_available(Isa isa);
Isa active_isa();
/// Throws std::invalid_argument if the ISA is unavailable.
void force_isa(Isa isa);

Moments moments(std::span<const double> x);
/// sum((x - center)^2)
double squared_deviation(std::span<const double> x, double center);

// Explicit variant, bypassing the active selection. Throws
// std::invalid_argument if the ISA is unavailable.
Moments moments(Isa isa, std::span<const double> x);
double squared_deviation(Isa isa, std::span<const double> x, double center);

namespace scalar {
Moments moments(std::span<const double> x);
double squared_deviation(std::span<const double> x, double center);
}  // namespace scalar

namespace avx2 {
Moments moments(std::span<const double> x);
double squared_deviation(std::span<const double> x, double center);
}  // namespace avx2

namespace neon {
Moments moments(std::span<const double> x);
double squared_deviation(std::span<const double> x, double center);
}  // namespace neon

}  // namespace gripsim::kernels
