#include "gripsim/emg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "gripsim/errors.hpp"
#include "gripsim/kernels.hpp"

namespace gripsim::sensors {

std::string_view to_string(Position p) {
  switch (p) {
    case Position::S1: return "S1";
    case Position::S2: return "S2";
    case Position::S3: return "S3";
    case Position::S4: return "S4";
  }
  return "?";
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Relaxed: return "relaxed";
    case Condition::Stressed: return "stressed";
    case Condition::Unknown: return "unknown";
  }
  return "?";
}

std::optional<Position> parse_position(std::string_view s) {
  for (Position p : kPositions)
    if (to_string(p) == s) return p;
  return std::nullopt;
}

std::optional<Condition> parse_condition(std::string_view s) {
  for (Condition c : {Condition::Relaxed, Condition::Stressed, Condition::Unknown})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

EmgProfile EmgProfile::reference() {
  EmgProfile p;
  p.envelopes[0] = {80.0, 30.0};
  p.envelopes[1] = {80.0, 75.0};
  p.envelopes[2] = {80.0, 30.0};
  p.envelopes[3] = {80.0, 80.0};
  return p;
}

std::size_t EmgProfile::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

double EmgProfile::amplitude(Position p, Condition c) const {
  const Envelope& e = envelopes[static_cast<std::size_t>(p)];
  switch (c) {
    case Condition::Relaxed: return e.relaxed_uv;
    case Condition::Stressed: return e.stressed_uv;
    case Condition::Unknown: break;
  }
  throw std::invalid_argument("amplitude: condition must be relaxed or stressed");
}

void EmgProfile::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
    throw std::invalid_argument("sample_rate_hz must be > 0");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s))
    throw std::invalid_argument("duration_s must be > 0");
  for (const Envelope& e : envelopes) {
    if (!(e.relaxed_uv >= 0.0) || !(e.stressed_uv >= 0.0) || !std::isfinite(e.relaxed_uv) ||
        !std::isfinite(e.stressed_uv))
      throw std::invalid_argument("envelope amplitudes must be finite and >= 0");
  }
}

namespace {

// splitmix64 finalizer; decorrelates the per-trace streams.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

EmgFeatures features_of(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const kernels::Moments m = kernels::moments(x);
  EmgFeatures f;
  f.mean_uv = m.sum / n;
  f.mav_uv = m.sum_abs / n;
  f.rms_uv = std::sqrt(m.sum_sq / n);
  f.variance_uv2 = kernels::squared_deviation(x, f.mean_uv) / n;
  return f;
}

}  // namespace

EmgTrace synthesize_emg(const EmgProfile& profile, Position position, Condition condition) {
  profile.validate();
  EmgTrace t;
  t.position = position;
  t.condition = condition;
  t.sample_rate_hz = profile.sample_rate_hz;

  const double amp = profile.amplitude(position, condition);
  const std::size_t n = profile.sample_count();
  t.samples.assign(n, 0.0);
  if (amp == 0.0) return t;

  const std::uint64_t stream = (static_cast<std::uint64_t>(position) << 8) |
                               static_cast<std::uint64_t>(condition);
  std::mt19937_64 rng(mix(profile.seed ^ mix(stream)));
  std::normal_distribution<double> noise(0.0, amp);
  for (double& s : t.samples) s = noise(rng);
  return t;
}

EmgFeatures window_features(const EmgTrace& trace, std::size_t start, std::size_t len) {
  const std::size_t size = trace.samples.size();
  if (len == 0 || start > size || len > size - start) throw WindowOutOfBounds(start, len, size);
  return features_of(std::span<const double>(trace.samples).subspan(start, len));
}

EmgFeatures features(const EmgTrace& trace) {
  return window_features(trace, 0, trace.samples.size());
}

Condition classify_stress(const FeatureSet& features, const FeatureSet& baseline,
                          const ClassifierConfig& cfg) {
  for (Position p : {Position::S1, Position::S3}) {
    if (baseline[static_cast<std::size_t>(p)].rms_uv == 0.0)
      throw DegenerateBaseline(std::string(to_string(p)));
  }
  auto ratio = [&](Position p) {
    const auto i = static_cast<std::size_t>(p);
    return features[i].rms_uv / baseline[i].rms_uv;
  };
  const bool s1_drop = ratio(Position::S1) <= cfg.drop_ratio;
  const bool s3_drop = ratio(Position::S3) <= cfg.drop_ratio;
  // A silent S4 baseline can only match a silent S4 reading.
  const double s4_base = baseline[3].rms_uv;
  const bool s4_same = s4_base == 0.0 ? features[3].rms_uv == 0.0
                                      : std::abs(ratio(Position::S4) - 1.0) <= cfg.tolerance_ratio;
  return (s1_drop && s3_drop && s4_same) ? Condition::Stressed : Condition::Relaxed;
}

std::vector<double> rms_envelope(const EmgTrace& trace, std::size_t window) {
  if (window == 0) throw std::invalid_argument("rms_envelope: window must be >= 1");
  const std::span<const double> x(trace.samples);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t begin = i + 1 >= window ? i + 1 - window : 0;
    const auto w = x.subspan(begin, i + 1 - begin);
    out[i] = std::sqrt(kernels::moments(w).sum_sq / static_cast<double>(w.size()));
  }
  return out;
}

}  // namespace gripsim::sensors
