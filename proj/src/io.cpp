#include "anarchy/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <json.hpp>

#include "anarchy/error.hpp"
#include "anarchy/mechanisms.hpp"

namespace anarchy {

using nlohmann::json;

namespace {

struct Position {
  std::size_t line = 1;
  std::size_t column = 1;
};

Position position_of(std::string_view text, std::size_t offset) {
  Position pos;
  offset = std::min(offset, text.size());
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

// Character iterator that remembers how far the parser has read.
class CountingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator() = default;
  CountingIterator(const char* base, const char* p, std::size_t* reached) : base_(base), p_(p), reached_(reached) {}

  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    ++p_;
    if (reached_) *reached_ = std::max(*reached_, static_cast<std::size_t>(p_ - base_));
    return *this;
  }
  CountingIterator operator++(int) {
    auto copy = *this;
    ++*this;
    return copy;
  }
  bool operator==(const CountingIterator& other) const { return p_ == other.p_; }

 private:
  const char* base_ = nullptr;
  const char* p_ = nullptr;
  std::size_t* reached_ = nullptr;
};

// Records, for every JSON pointer, how far the parser had read when the value began or ended.
class OffsetRecorder : public nlohmann::json_sax<json> {
 public:
  explicit OffsetRecorder(const std::size_t* reached) : reached_(reached) {}

  std::map<std::string, std::size_t> offsets;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override { return open(false); }
  bool key(string_t& k) override {
    frames_.back().key = k;
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool array = false;
    std::size_t index = 0;
    std::string key;
  };

  std::string pointer() const {
    std::string out;
    for (const auto& f : frames_) out += "/" + (f.array ? std::to_string(f.index) : f.key);
    return out;
  }
  void advance() {
    if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
  }
  bool value() {
    offsets.emplace(pointer(), *reached_);
    advance();
    return true;
  }
  bool open(bool array) {
    offsets.emplace(pointer(), *reached_);
    frames_.push_back(Frame{array, 0, {}});
    return true;
  }
  bool close() {
    frames_.pop_back();
    advance();
    return true;
  }

  const std::size_t* reached_;
  std::vector<Frame> frames_;
};

struct LocatedJson {
  std::string_view text;
  json doc;
  std::map<std::string, std::size_t> offsets;

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    std::size_t offset = 0;
    // Fall back to the nearest enclosing value that was seen.
    std::string p = pointer;
    while (true) {
      auto it = offsets.find(p);
      if (it != offsets.end()) {
        offset = it->second;
        break;
      }
      if (p.empty()) break;
      p.erase(p.rfind('/'));
    }
    const auto pos = position_of(text, offset == 0 ? 0 : offset - 1);
    throw ParseError(message + " (at " + (pointer.empty() ? "/" : pointer) + ")", pos.line, pos.column);
  }
};

LocatedJson parse_located(std::string_view text) {
  LocatedJson out{text, {}, {}};
  try {
    out.doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto pos = position_of(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string message = e.what();
    if (auto colon = message.find("syntax error"); colon != std::string::npos) message = message.substr(colon);
    throw ParseError("invalid JSON: " + message, pos.line, pos.column);
  }
  std::size_t reached = 0;
  OffsetRecorder recorder(&reached);
  CountingIterator first(text.data(), text.data(), &reached);
  CountingIterator last(text.data(), text.data() + text.size(), nullptr);
  json::sax_parse(first, last, &recorder);
  out.offsets = std::move(recorder.offsets);
  return out;
}

double require_number(const LocatedJson& src, const json& node, const std::string& pointer) {
  if (!node.is_number()) src.fail(pointer, "expected a number");
  return node.get<double>();
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path);
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("error while writing " + path);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

ParallelNetwork parse_network(std::string_view text) {
  const auto src = parse_located(text);
  const json& doc = src.doc;
  if (!doc.is_object()) src.fail("", "a network file must be a JSON object");
  if (!doc.contains("links")) src.fail("", "missing \"links\"");
  const json& links = doc["links"];
  if (!links.is_array()) src.fail("/links", "\"links\" must be an array");
  std::vector<AffineLatency> raw;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string at = "/links/" + std::to_string(i);
    const json& link = links[i];
    if (!link.is_object()) src.fail(at, "a link must be an object with \"a\" and \"b\"");
    if (!link.contains("a")) src.fail(at, "missing \"a\"");
    if (!link.contains("b")) src.fail(at, "missing \"b\"");
    raw.push_back(AffineLatency{require_number(src, link["a"], at + "/a"), require_number(src, link["b"], at + "/b")});
  }
  return normalize_network(raw);
}

std::string network_to_json(const ParallelNetwork& net) {
  json links = json::array();
  for (const auto& link : net.links()) links.push_back({{"a", link.a}, {"b", link.b}});
  return json{{"links", links}}.dump(2) + "\n";
}

MechanismSpec parse_mechanism(std::string_view text) {
  const auto src = parse_located(text);
  const json& doc = src.doc;
  if (!doc.is_object()) src.fail("", "a mechanism file must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) src.fail("", "missing string \"kind\"");
  const auto kind = doc["kind"].get<std::string>();
  MechanismSpec spec;
  if (kind == "threshold") {
    spec.kind = MechanismSpec::Kind::threshold;
    if (!doc.contains("R") || !doc["R"].is_array()) src.fail("", "a threshold mechanism needs an array \"R\"");
    for (std::size_t i = 0; i < doc["R"].size(); ++i) {
      spec.R.push_back(require_number(src, doc["R"][i], "/R/" + std::to_string(i)));
    }
  } else if (kind == "plateau") {
    spec.kind = MechanismSpec::Kind::plateau;
    const bool has1 = doc.contains("x1");
    const bool has2 = doc.contains("x2");
    if (has1 != has2) src.fail("", "give both \"x1\" and \"x2\" or neither");
    if (has1) {
      spec.x1 = require_number(src, doc["x1"], "/x1");
      spec.x2 = require_number(src, doc["x2"], "/x2");
    }
  } else {
    src.fail("/kind", "unknown mechanism kind \"" + kind + "\"");
  }
  return spec;
}

Modification resolve_mechanism(const ParallelNetwork& net, const MechanismSpec& spec) {
  if (spec.kind == MechanismSpec::Kind::threshold) return build_threshold_mechanism(net, spec.R).params;
  if (spec.x1) return make_plateau_params(net, *spec.x1, *spec.x2);
  return solve_plateau_params(net);
}

std::string mechanism_to_json(const Modification& mod) {
  json out;
  if (const auto* t = std::get_if<ThresholdParams>(&mod)) {
    json thresholds = json::array();
    for (double v : t->thresholds) thresholds.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    out = {{"kind", "threshold"},
           {"R", t->R},
           {"derived",
            {{"super_efficient", t->super_efficient},
             {"freeze_points", t->freeze_points},
             {"thresholds", thresholds}}}};
  } else if (const auto* p = std::get_if<PlateauParams>(&mod)) {
    out = {{"kind", "plateau"},
           {"x1", p->x1},
           {"x2", p->x2},
           {"derived",
            {{"r_star", p->r_star},
             {"r_star2", p->r_star2},
             {"ratio", p->ratio},
             {"alpha", p->alpha},
             {"beta", p->beta},
             {"identity", plateau_is_identity(*p)}}}};
  } else {
    throw std::invalid_argument("only threshold and plateau mechanisms have a file form");
  }
  return out.dump(2) + "\n";
}

}  // namespace anarchy
