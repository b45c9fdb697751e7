#include "anarchy/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <sstream>

#include <json.hpp>

#include "anarchy/error.hpp"
#include "anarchy/io.hpp"

namespace anarchy {

double default_rmax(const ParallelNetwork& net, const Modification& mod) {
  double reach = 2.0 * net.breakpoint(net.size() - 1);
  if (const auto* p = std::get_if<PlateauParams>(&mod); p && !plateau_is_identity(*p)) {
    reach = std::max(reach, 2.0 * p->r_star2);
  }
  if (const auto* t = std::get_if<ThresholdParams>(&mod)) {
    for (double f : t->freeze_points) reach = std::max(reach, 2.0 * f);
  }
  return reach > 0.0 ? reach : 1.0;
}

CurveArtifact build_curve(const ParallelNetwork& net, const Modification& mod, double rmax, std::size_t samples,
                          double tol) {
  if (samples < 2) throw DomainError(ErrorCode::param_out_of_range, "--samples must be at least 2");
  if (!(rmax > 0.0) || !std::isfinite(rmax)) throw DomainError(ErrorCode::param_out_of_range, "--rmax must be positive");

  CurveArtifact curve;
  curve.rmax = rmax;
  for (double b : structural_breakpoints(net, mod)) {
    if (b <= rmax) curve.breakpoints.push_back(b);
  }

  std::vector<double> rates;
  for (std::size_t i = 0; i < samples; ++i) {
    rates.push_back(rmax * static_cast<double>(i + 1) / static_cast<double>(samples));
  }
  rates.insert(rates.end(), curve.breakpoints.begin(), curve.breakpoints.end());
  std::sort(rates.begin(), rates.end());
  rates.erase(std::unique(rates.begin(), rates.end()), rates.end());

  const auto all_breakpoints = structural_breakpoints(net, mod);
  auto regime_of = [&](double r) {
    return static_cast<std::size_t>(std::lower_bound(all_breakpoints.begin(), all_breakpoints.end(), r) -
                                    all_breakpoints.begin());
  };

  const auto samples_out = ratio_curve(net, mod, rates);
  for (const auto& s : samples_out) curve.rows.push_back(CurveRow{s, "seg" + std::to_string(s.regime), false});

  for (double b : curve.breakpoints) {
    const double right = b * (1.0 + 1e-12);
    auto at = ratio_at(net, mod, b);
    auto after = ratio_at(net, mod, right);
    if (std::abs(after.ratio - at.ratio) > tol * std::max(1.0, std::abs(at.ratio))) {
      after.regime = regime_of(right);
      curve.rows.push_back(CurveRow{after, "seg" + std::to_string(after.regime), true});
    }
  }
  std::stable_sort(curve.rows.begin(), curve.rows.end(),
                   [](const CurveRow& x, const CurveRow& y) { return x.sample.r < y.sample.r; });

  CurveSample tail;
  tail.r = kInfinity;
  tail.cost_num = kInfinity;
  tail.cost_den = kInfinity;
  tail.ratio = tail_limit(net, mod);
  tail.regime = all_breakpoints.size();
  curve.rows.push_back(CurveRow{tail, "tail", false});
  return curve;
}

std::string format_shortest(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

std::string format_short(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string curve_to_csv(const CurveArtifact& curve) {
  std::string out = "r,cost_num,cost_den,ratio,regime\n";
  for (const auto& row : curve.rows) {
    const auto& s = row.sample;
    out += format_shortest(s.r) + "," + format_shortest(s.cost_num) + "," + format_shortest(s.cost_den) + "," +
           format_shortest(s.ratio) + "," + row.regime + "\n";
  }
  return out;
}

std::vector<CurveRow> parse_curve_csv(std::string_view text) {
  std::vector<CurveRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != "r,cost_num,cost_den,ratio,regime") throw ParseError("unexpected CSV header", 1, 1);
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 5) throw ParseError("expected 5 fields", line_no, 1);

    CurveRow row;
    double* targets[] = {&row.sample.r, &row.sample.cost_num, &row.sample.cost_den, &row.sample.ratio};
    std::size_t column = 1;
    for (int f = 0; f < 4; ++f) {
      const auto field = fields[static_cast<std::size_t>(f)];
      const auto result = std::from_chars(field.data(), field.data() + field.size(), *targets[f]);
      if (result.ec != std::errc{} || result.ptr != field.data() + field.size()) {
        throw ParseError("not a number: " + std::string(field), line_no, column);
      }
      column += field.size() + 1;
    }
    row.regime = std::string(fields[4]);
    if (row.regime.rfind("seg", 0) == 0) row.sample.regime = std::stoul(row.regime.substr(3));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string curve_to_svg(const CurveArtifact& curve) {
  constexpr double kWidth = 800.0, kHeight = 500.0;
  constexpr double kLeft = 70.0, kRight = 20.0, kTop = 20.0, kBottom = 50.0;

  double ymin = 1.0, ymax = 1.0;
  for (const auto& row : curve.rows) {
    if (!std::isfinite(row.sample.r)) continue;
    ymin = std::min(ymin, row.sample.ratio);
    ymax = std::max(ymax, row.sample.ratio);
  }
  const double span = std::max(ymax - ymin, 1e-3);
  ymin -= 0.05 * span;
  ymax += 0.05 * span;

  auto px = [&](double r) { return kLeft + (kWidth - kLeft - kRight) * r / curve.rmax; };
  auto py = [&](double v) { return kHeight - kBottom - (kHeight - kTop - kBottom) * (v - ymin) / (ymax - ymin); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 800 500\" width=\"800\" "
         "height=\"500\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";

  // Axes with a few ticks.
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
      << kHeight - kBottom << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
      << "\"/>\n</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double r = curve.rmax * t / 4.0;
    const double v = ymin + (ymax - ymin) * t / 4.0;
    svg << "<text x=\"" << num(px(r)) << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">"
        << format_short(r) << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">" << format_short(v)
        << "</text>\n";
  }
  svg << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">rate r</text>\n"
      << "<text x=\"16\" y=\"" << num((kTop + kHeight - kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((kTop + kHeight - kBottom) / 2) << ")\">cost ratio</text>\n</g>\n";

  svg << "<g stroke=\"#888888\" stroke-dasharray=\"4 4\" stroke-width=\"1\">\n";
  for (double b : curve.breakpoints) {
    svg << "<line x1=\"" << num(px(b)) << "\" y1=\"" << kTop << "\" x2=\"" << num(px(b)) << "\" y2=\""
        << kHeight - kBottom << "\"/>\n";
  }
  svg << "</g>\n";

  // One polyline per regime. A regime continues from the previous point
  // unless it opens with a right-limit sample, which marks a jump.
  std::vector<const CurveRow*> finite;
  for (const auto& row : curve.rows) {
    if (std::isfinite(row.sample.r)) finite.push_back(&row);
  }
  svg << "<g fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\">\n";
  std::size_t i = 0;
  while (i < finite.size()) {
    std::size_t j = i;
    while (j < finite.size() && finite[j]->regime == finite[i]->regime) ++j;
    svg << "<polyline points=\"";
    if (i > 0 && !finite[i]->right_limit) {
      svg << num(px(finite[i - 1]->sample.r)) << "," << num(py(finite[i - 1]->sample.ratio)) << " ";
    }
    for (std::size_t m = i; m < j; ++m) {
      svg << num(px(finite[m]->sample.r)) << "," << num(py(finite[m]->sample.ratio)) << (m + 1 < j ? " " : "");
    }
    svg << "\"/>\n";
    i = j;
  }
  svg << "</g>\n";

  // Jumps: the attained value gets a filled circle, the right limit an open one.
  svg << "<g stroke=\"#1f5fa8\" stroke-width=\"1.5\">\n";
  for (std::size_t m = 1; m < finite.size(); ++m) {
    if (!finite[m]->right_limit) continue;
    const auto& at = finite[m - 1]->sample;
    const auto& after = finite[m]->sample;
    svg << "<circle cx=\"" << num(px(at.r)) << "\" cy=\"" << num(py(at.ratio)) << "\" r=\"4\" fill=\"#1f5fa8\"/>\n";
    svg << "<circle cx=\"" << num(px(after.r)) << "\" cy=\"" << num(py(after.ratio))
        << "\" r=\"4\" fill=\"white\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void RunManifest::add_input(std::string path, std::string_view bytes) {
  inputs.push_back(Input{std::move(path), sha256_hex(bytes), bytes.size()});
}

std::string RunManifest::to_json() const {
  nlohmann::json doc;
  doc["tool"] = "anarchy";
  doc["version"] = std::string(kToolVersion);
  doc["timestamp"] = timestamp;
  doc["command"] = command_line;
  doc["inputs"] = nlohmann::json::array();
  for (const auto& in : inputs) doc["inputs"].push_back({{"path", in.path}, {"sha256", in.sha256}, {"bytes", in.bytes}});
  doc["outputs"] = outputs;
  doc["tolerance"] = tolerance;
  return doc.dump(2) + "\n";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace anarchy
