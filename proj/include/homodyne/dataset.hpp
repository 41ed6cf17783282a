#pragma once

// Plain-text dataset exchanged between the simulator and the reconstruction.
//
//   # format=homodyne-dataset
//   # format_version=1
//   # rng=mt19937_64+splitmix64-substreams
//   # seed=42
//   # eta_true=0.553
//   # scale=1
//   # offset=0
//   # dark_fraction=0
//   # n_vacuum=200000
//   # n_fock=12000
//   V 4.1887902047863905 -0.3617612340102396
//   F ...
//
// Body lines are `source phase raw_value` with source V (vacuum run) or F
// (Fock run).  Doubles are written in shortest round-trip form.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "homodyne/error.hpp"
#include "homodyne/rng.hpp"
#include "homodyne/simulator.hpp"

namespace homodyne {

inline constexpr std::string_view kDatasetFormat = "homodyne-dataset";
inline constexpr int kDatasetFormatVersion = 1;

struct Dataset {
  /// Header metadata in file order.  Simulated datasets carry the full RunSpec.
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<QuadratureSample> samples;

  std::optional<std::string> header_value(std::string_view key) const {
    for (const auto& [k, v] : header)
      if (k == key) return v;
    return std::nullopt;
  }

  std::vector<double> raw_values(Source source) const {
    std::vector<double> out;
    for (const auto& s : samples)
      if (s.source == source) out.push_back(s.raw_value);
    return out;
  }

  std::size_t count(Source source) const {
    std::size_t n = 0;
    for (const auto& s : samples) n += s.source == source;
    return n;
  }
};

/// Shortest decimal form that parses back to exactly `value`.
inline std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

namespace detail {

inline double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw FormatError("cannot parse " + std::string(what) + ": '" + std::string(text) + "'");
  return value;
}

inline std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw FormatError("cannot parse " + std::string(what) + ": '" + std::string(text) + "'");
  return value;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Header for a simulated run.
inline Dataset make_dataset(const RunSpec& spec, std::vector<QuadratureSample> samples) {
  Dataset d;
  d.header = {
      {"format", std::string(kDatasetFormat)},
      {"format_version", std::to_string(kDatasetFormatVersion)},
      {"rng", std::string(RandomStream::kName)},
      {"seed", std::to_string(spec.seed)},
      {"eta_true", format_double(spec.eta_true)},
      {"scale", format_double(spec.detector.scale)},
      {"offset", format_double(spec.detector.offset)},
      {"dark_fraction", format_double(spec.detector.dark_fraction)},
      {"n_vacuum", std::to_string(spec.n_vacuum)},
      {"n_fock", std::to_string(spec.n_fock)},
  };
  d.samples = std::move(samples);
  return d;
}

inline void write_dataset(std::ostream& os, const Dataset& d) {
  for (const auto& [k, v] : d.header) os << "# " << k << '=' << v << '\n';
  std::string line;
  for (const auto& s : d.samples) {
    line.clear();
    line += s.source == Source::vacuum_run ? 'V' : 'F';
    line += ' ';
    line += format_double(s.phase);
    line += ' ';
    line += format_double(s.raw_value);
    line += '\n';
    os << line;
  }
}

/// Parses and validates a dataset.  Throws FormatError on a malformed or
/// inconsistent header, an unsupported version, or a body that disagrees with
/// the declared counts.
inline Dataset read_dataset(std::istream& is) {
  Dataset d;
  std::string line;
  std::size_t line_no = 0;
  bool in_body = false;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (in_body) throw FormatError("header line after body at line " + std::to_string(line_no));
      view = detail::trim(view.substr(1));
      const auto eq = view.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw FormatError("malformed header line " + std::to_string(line_no) + ": expected key=value");
      d.header.emplace_back(std::string(detail::trim(view.substr(0, eq))),
                            std::string(detail::trim(view.substr(eq + 1))));
      continue;
    }
    in_body = true;
    std::istringstream fields{std::string(view)};
    std::string source, phase, raw, extra;
    if (!(fields >> source >> phase >> raw) || (fields >> extra))
      throw FormatError("body line " + std::to_string(line_no) + " must have exactly 3 fields");
    QuadratureSample s;
    if (source == "V") s.source = Source::vacuum_run;
    else if (source == "F") s.source = Source::fock_run;
    else throw FormatError("unknown source '" + source + "' at line " + std::to_string(line_no));
    s.phase = detail::parse_double(phase, "phase");
    s.raw_value = detail::parse_double(raw, "raw_value");
    if (!(s.phase >= 0.0 && s.phase < 2.0 * std::numbers::pi))
      throw FormatError("phase outside [0, 2pi) at line " + std::to_string(line_no));
    if (!std::isfinite(s.raw_value))
      throw FormatError("non-finite raw_value at line " + std::to_string(line_no));
    d.samples.push_back(s);
  }

  const auto format = d.header_value("format");
  if (format && *format != kDatasetFormat) throw FormatError("unexpected format '" + *format + "'");
  const auto version = d.header_value("format_version");
  if (!version) throw FormatError("dataset header lacks format_version");
  if (detail::parse_uint(*version, "format_version") != kDatasetFormatVersion)
    throw FormatError("unsupported dataset format_version " + *version);
  for (const char* key : {"n_vacuum", "n_fock"}) {
    const auto value = d.header_value(key);
    if (!value) throw FormatError(std::string("dataset header lacks ") + key);
    const auto declared = detail::parse_uint(*value, key);
    const Source src = std::string_view(key) == "n_vacuum" ? Source::vacuum_run : Source::fock_run;
    if (declared != d.count(src))
      throw FormatError(std::string(key) + "=" + *value + " disagrees with " +
                        std::to_string(d.count(src)) + " body lines");
  }
  return d;
}

}  // namespace homodyne
