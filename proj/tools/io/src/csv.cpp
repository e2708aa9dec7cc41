#include "shl/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <variant>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "shl/error.hpp"

namespace shl::io {
namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next line without its terminator; false at end of input.
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const std::size_t end = text_.find('\n', pos_);
    const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
    line = text_.substr(pos_, stop - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    ++number_;
    return true;
  }
  std::size_t number() const noexcept { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(line, std::string("bad ") + what + " '" +
                               std::string(field) + "'");
  }
  return value;
}

void expect_header(LineReader& reader, std::string_view expected) {
  std::string_view header;
  if (!reader.next(header)) throw ParseError(1, "empty file");
  if (header != expected) {
    throw ParseError(1, "expected header '" + std::string(expected) +
                            "', got '" + std::string(header) + "'");
  }
}

std::vector<std::string_view> row_fields(std::string_view line,
                                         std::size_t expected,
                                         std::size_t number) {
  if (line.empty()) throw ParseError(number, "blank line");
  auto fields = split(line);
  if (fields.size() != expected) {
    throw ParseError(number, "expected " + std::to_string(expected) +
                                 " fields, got " +
                                 std::to_string(fields.size()));
  }
  return fields;
}

template <typename T>
void append_number(std::string& out, T value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  out.append(buffer, ptr);
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

TableKind sniff(std::string_view text) noexcept {
  std::string_view header = text.substr(0, text.find('\n'));
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (header == kOutcomesHeader) return TableKind::kOutcomes;
  if (header == kValuesHeader) return TableKind::kValues;
  if (header == kCountsHeader) return TableKind::kCounts;
  return TableKind::kUnknown;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write to '" + path.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into '" + path.string() + "'");
  }
}

std::string format_outcomes(const RunSet& runs) {
  std::string out;
  out.reserve(16 + runs.total_size() * 12);
  out.append(kOutcomesHeader).push_back('\n');
  for (const auto& run : runs.runs) {
    const auto* outcomes = std::get_if<CategoricalOutcomes>(&run.outcomes);
    if (outcomes == nullptr) {
      throw Error(ErrorKind::kType, "outcomes CSV needs categorical runs");
    }
    std::int64_t t = 0;
    for (const auto x : *outcomes) {
      append_number(out, run.run_id);
      out.push_back(',');
      append_number(out, ++t);
      out.push_back(',');
      append_number(out, x);
      out.push_back('\n');
    }
  }
  return out;
}

RunSet parse_outcomes(std::string_view text) {
  LineReader reader(text);
  expect_header(reader, kOutcomesHeader);
  RunSet rs;
  rs.m = kOutcomeCategories;
  std::map<std::int64_t, std::size_t> index;
  std::vector<std::optional<std::int64_t>> last_t;
  std::string_view line;
  while (reader.next(line)) {
    const std::size_t n = reader.number();
    const auto fields = row_fields(line, 3, n);
    const auto run_id = parse_number<std::int64_t>(fields[0], n, "run_id");
    const auto t = parse_number<std::int64_t>(fields[1], n, "t");
    const auto outcome = parse_number<std::int32_t>(fields[2], n, "outcome");
    if (outcome < 1 || outcome > kOutcomeCategories) {
      throw ParseError(n, "outcome " + std::to_string(outcome) +
                              " outside 1..6");
    }
    auto [it, inserted] = index.try_emplace(run_id, rs.runs.size());
    if (inserted) {
      rs.runs.push_back(RunSample{run_id, CategoricalOutcomes{}});
      last_t.emplace_back();
    }
    if (last_t[it->second] && t <= *last_t[it->second]) {
      throw ParseError(n, "t not strictly increasing within run " +
                              std::to_string(run_id));
    }
    last_t[it->second] = t;
    std::get<CategoricalOutcomes>(rs.runs[it->second].outcomes)
        .push_back(outcome);
  }
  return rs;
}

std::string format_values(const RunSet& runs) {
  std::string out;
  out.append(kValuesHeader).push_back('\n');
  for (const auto& run : runs.runs) {
    const auto* values = std::get_if<RealOutcomes>(&run.outcomes);
    if (values == nullptr) {
      throw Error(ErrorKind::kType, "values CSV needs real-valued runs");
    }
    for (const double v : *values) {
      append_number(out, run.run_id);
      out.push_back(',');
      append_number(out, v);
      out.push_back('\n');
    }
  }
  return out;
}

RunSet parse_values(std::string_view text) {
  LineReader reader(text);
  expect_header(reader, kValuesHeader);
  RunSet rs;
  std::map<std::int64_t, std::size_t> index;
  std::string_view line;
  while (reader.next(line)) {
    const std::size_t n = reader.number();
    const auto fields = row_fields(line, 2, n);
    const auto run_id = parse_number<std::int64_t>(fields[0], n, "run_id");
    const auto value = parse_number<double>(fields[1], n, "value");
    if (!std::isfinite(value)) throw ParseError(n, "value must be finite");
    auto [it, inserted] = index.try_emplace(run_id, rs.runs.size());
    if (inserted) rs.runs.push_back(RunSample{run_id, RealOutcomes{}});
    std::get<RealOutcomes>(rs.runs[it->second].outcomes).push_back(value);
  }
  return rs;
}

std::string format_counts(std::span<const SettingCounts> counts) {
  std::string out;
  out.append(kCountsHeader).push_back('\n');
  for (const auto& c : counts) {
    const std::int64_t fields[] = {c.setting.a, c.setting.b, c.bin,
                                   c.n_oo,      c.n_oe,      c.n_eo,
                                   c.n_ee,      c.n_ou,      c.n_uo,
                                   c.n_eu,      c.n_ue,      c.n_uu,
                                   c.nA_o,      c.nB_o,      c.trials};
    for (std::size_t i = 0; i < std::size(fields); ++i) {
      if (i > 0) out.push_back(',');
      append_number(out, fields[i]);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<SettingCounts> parse_counts(std::string_view text) {
  LineReader reader(text);
  expect_header(reader, kCountsHeader);
  std::vector<SettingCounts> out;
  std::string_view line;
  while (reader.next(line)) {
    const std::size_t n = reader.number();
    const auto fields = row_fields(line, 15, n);
    std::int64_t v[15];
    for (std::size_t i = 0; i < 15; ++i) {
      v[i] = parse_number<std::int64_t>(fields[i], n, "count");
    }
    if (v[0] < 1 || v[0] > 2 || v[1] < 1 || v[1] > 2) {
      throw ParseError(n, "setting indices a, b must be 1 or 2");
    }
    if (v[2] < 1 || v[2] > std::numeric_limits<std::uint32_t>::max()) {
      throw ParseError(n, "bin must be a positive integer");
    }
    SettingCounts c;
    c.setting = {static_cast<int>(v[0]), static_cast<int>(v[1])};
    c.bin = static_cast<std::uint32_t>(v[2]);
    c.n_oo = v[3];
    c.n_oe = v[4];
    c.n_eo = v[5];
    c.n_ee = v[6];
    c.n_ou = v[7];
    c.n_uo = v[8];
    c.n_eu = v[9];
    c.n_ue = v[10];
    c.n_uu = v[11];
    c.nA_o = v[12];
    c.nB_o = v[13];
    c.trials = v[14];
    try {
      c.check_closure();
    } catch (const Error& e) {
      throw ParseError(n, e.what());
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace shl::io
