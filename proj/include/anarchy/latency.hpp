#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "anarchy/network.hpp"
#include "anarchy/numeric.hpp"

namespace anarchy {

// One affine piece slope*x + offset, valid on (start, next start].
struct Segment {
  double start = 0.0;
  double slope = 0.0;
  double offset = 0.0;

  double at(double x) const { return slope * x + offset; }

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Non-decreasing, lower semicontinuous latency built from affine pieces.
//
// Pieces are right-closed: a boundary point takes the value of the piece that
// ends there, so the stored value is always the left limit. The first piece
// also covers x = 0. Beyond an optional cap the latency is +infinity; the cap
// itself is still finite.
class PiecewiseLatency {
 public:
  static PiecewiseLatency affine(const AffineLatency& latency, double cap = kInfinity);

  // Throws DomainError(InvalidLatency) unless the first piece starts at 0,
  // starts increase strictly and stay below the cap, slopes are non-negative,
  // and no boundary jumps downward.
  static PiecewiseLatency from_segments(std::vector<Segment> segments, double cap = kInfinity);

  double value(double x) const;
  // lim inf of value(x + eps) as eps decreases to 0; the right limit.
  double right_liminf(double x) const;

  // sup{x >= 0 : value(x) <= level}; 0 when value(0) > level.
  double max_flow_at_level(double level) const;
  // sup{x >= 0 : value(x) < level}; 0 when value(0) >= level.
  double min_flow_at_level(double level) const;

  std::span<const Segment> segments() const { return segments_; }
  double cap() const { return cap_; }

  // Interior piece starts plus the cap (when finite), ascending.
  std::vector<double> boundaries() const;

  friend bool operator==(const PiecewiseLatency&, const PiecewiseLatency&) = default;

 private:
  PiecewiseLatency(std::vector<Segment> segments, double cap);

  std::size_t piece_ending_at_or_after(double x) const;
  std::size_t piece_starting_at_or_before(double x) const;

  std::vector<Segment> segments_;
  double cap_ = kInfinity;
};

struct LatencyCheck {
  bool monotone = true;
  bool dominates = true;
  double witness = 0.0;  // first failing sample point
};

// Re-checks monotonicity and domination of `original` on `samples` evenly
// spaced points of [0, upto].
LatencyCheck validate_latency(const PiecewiseLatency& latency, const AffineLatency& original,
                              double upto, std::size_t samples = 1000);

std::vector<PiecewiseLatency> original_latencies(const ParallelNetwork& net);

}  // namespace anarchy
