#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gripsim/kernels.hpp"

namespace gripsim::kernels {

namespace {

struct Table {
  Isa isa;
  Moments (*moments)(std::span<const double>);
  double (*squared_deviation)(std::span<const double>, double);
};

constexpr Table kScalar{Isa::Scalar, &scalar::moments, &scalar::squared_deviation};
#if defined(GRIPSIM_HAVE_AVX2)
constexpr Table kAvx2{Isa::Avx2, &avx2::moments, &avx2::squared_deviation};
#endif
#if defined(GRIPSIM_HAVE_NEON)
constexpr Table kNeon{Isa::Neon, &neon::moments, &neon::squared_deviation};
#endif

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &kScalar;
    case Isa::Avx2:
#if defined(GRIPSIM_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2")) return &kAvx2;
#endif
      return nullptr;
    case Isa::Neon:
#if defined(GRIPSIM_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Table* detect() {
  if (const char* env = std::getenv("GRIPSIM_ISA")) {
    if (auto isa = parse_isa(env)) {
      if (const Table* t = table_for(*isa)) return t;
    }
  }
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (const Table* t = table_for(isa)) return t;
  }
  return &kScalar;
}

std::atomic<const Table*>& active() {
  static std::atomic<const Table*> table{detect()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "neon") return Isa::Neon;
  return std::nullopt;
}

bool isa_available(Isa isa) { return table_for(isa) != nullptr; }

Isa active_isa() { return active().load(std::memory_order_relaxed)->isa; }

namespace {

const Table& require(Isa isa) {
  const Table* t = table_for(isa);
  if (t == nullptr)
    throw std::invalid_argument("ISA not available: " + std::string(to_string(isa)));
  return *t;
}

}  // namespace

void force_isa(Isa isa) { active().store(&require(isa), std::memory_order_relaxed); }

Moments moments(Isa isa, std::span<const double> x) { return require(isa).moments(x); }

double squared_deviation(Isa isa, std::span<const double> x, double center) {
  return require(isa).squared_deviation(x, center);
}

Moments moments(std::span<const double> x) {
  return active().load(std::memory_order_relaxed)->moments(x);
}

double squared_deviation(std::span<const double> x, double center) {
  return active().load(std::memory_order_relaxed)->squared_deviation(x, center);
}

}  // namespace gripsim::kernels
