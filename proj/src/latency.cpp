#include "anarchy/latency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anarchy/error.hpp"

namespace anarchy {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(ErrorCode::invalid_latency, message);
}

}  // namespace

PiecewiseLatency::PiecewiseLatency(std::vector<Segment> segments, double cap)
    : segments_(std::move(segments)), cap_(cap) {}

PiecewiseLatency PiecewiseLatency::affine(const AffineLatency& latency, double cap) {
  return from_segments({Segment{0.0, latency.a, latency.b}}, cap);
}

PiecewiseLatency PiecewiseLatency::from_segments(std::vector<Segment> segments, double cap) {
  require(!segments.empty(), "at least one piece is required");
  require(segments.front().start == 0.0, "the first piece must start at 0");
  require(!std::isnan(cap) && cap >= 0.0, "cap must be non-negative");
  for (std::size_t m = 0; m < segments.size(); ++m) {
    const auto& seg = segments[m];
    require(std::isfinite(seg.start) && std::isfinite(seg.slope) && std::isfinite(seg.offset),
            "piece coefficients must be finite");
    require(seg.slope >= 0.0, "piece slopes must be non-negative");
    if (m > 0) {
      require(seg.start > segments[m - 1].start, "piece starts must increase strictly");
      const double left = segments[m - 1].at(seg.start);
      const double right = seg.at(seg.start);
      require(right >= left - 1e-12 * std::max(1.0, std::abs(left)),
              "latency decreases at x=" + std::to_string(seg.start));
    }
    if (m > 0) require(seg.start < cap, "piece starts must lie below the cap");
  }
  return PiecewiseLatency(std::move(segments), cap);
}

// Index of the piece whose half-open domain (start, next] contains x.
std::size_t PiecewiseLatency::piece_ending_at_or_after(double x) const {
  auto it = std::lower_bound(segments_.begin(), segments_.end(), x,
                             [](const Segment& s, double v) { return s.start < v; });
  const auto index = static_cast<std::size_t>(it - segments_.begin());
  return index == 0 ? 0 : index - 1;
}

// Index of the last piece starting at or before x.
std::size_t PiecewiseLatency::piece_starting_at_or_before(double x) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const Segment& s) { return v < s.start; });
  const auto index = static_cast<std::size_t>(it - segments_.begin());
  return index == 0 ? 0 : index - 1;
}

double PiecewiseLatency::value(double x) const {
  if (x > cap_) return kInfinity;
  return segments_[piece_ending_at_or_after(x)].at(x);
}

double PiecewiseLatency::right_liminf(double x) const {
  if (x >= cap_) return kInfinity;
  return segments_[piece_starting_at_or_before(x)].at(x);
}

double PiecewiseLatency::max_flow_at_level(double level) const {
  if (segments_.front().at(0.0) > level) return 0.0;
  for (std::size_t m = 0; m < segments_.size(); ++m) {
    const Segment& seg = segments_[m];
    const double end = m + 1 < segments_.size() ? segments_[m + 1].start : cap_;
    if (seg.at(seg.start) > level) return seg.start;
    if (std::isinf(end)) {
      if (seg.slope == 0.0) return kInfinity;
      return std::max(seg.start, (level - seg.offset) / seg.slope);
    }
    if (seg.at(end) <= level) continue;
    return std::clamp((level - seg.offset) / seg.slope, seg.start, end);
  }
  return cap_;
}

double PiecewiseLatency::min_flow_at_level(double level) const {
  if (segments_.front().at(0.0) >= level) return 0.0;
  for (std::size_t m = 0; m < segments_.size(); ++m) {
    const Segment& seg = segments_[m];
    const double end = m + 1 < segments_.size() ? segments_[m + 1].start : cap_;
    if (seg.at(seg.start) >= level) return seg.start;
    if (std::isinf(end)) {
      if (seg.slope == 0.0) return kInfinity;
      return std::max(seg.start, (level - seg.offset) / seg.slope);
    }
    if (seg.at(end) < level) continue;
    return std::clamp((level - seg.offset) / seg.slope, seg.start, end);
  }
  return cap_;
}

std::vector<double> PiecewiseLatency::boundaries() const {
  std::vector<double> out;
  for (std::size_t m = 1; m < segments_.size(); ++m) out.push_back(segments_[m].start);
  if (std::isfinite(cap_)) out.push_back(cap_);
  return out;
}

LatencyCheck validate_latency(const PiecewiseLatency& latency, const AffineLatency& original,
                              double upto, std::size_t samples) {
  LatencyCheck check;
  double previous = -kInfinity;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = samples > 1 ? upto * static_cast<double>(s) / static_cast<double>(samples - 1) : 0.0;
    const double v = latency.value(x);
    const double base = original(x);
    if (v < previous) {
      check.monotone = false;
      check.witness = x;
      return check;
    }
    if (v < base - 1e-12 * std::max(1.0, std::abs(base))) {
      check.dominates = false;
      check.witness = x;
      return check;
    }
    previous = v;
  }
  return check;
}

std::vector<PiecewiseLatency> original_latencies(const ParallelNetwork& net) {
  std::vector<PiecewiseLatency> out;
  out.reserve(net.size());
  for (const auto& link : net.links()) out.push_back(PiecewiseLatency::affine(link));
  return out;
}

}  // namespace anarchy
