#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mrif/scenario.hpp"

namespace mrif::scenario {
namespace {

constexpr std::size_t kColumns = 20;

void append_fixed(std::string& out, double v) {
  char buf[48];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", v);
  out.append(buf, static_cast<std::size_t>(n));
}

template <typename T>
T parse_field(std::string_view field, std::size_t line, std::size_t column) {
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty())
    fail(ErrorKind::Parse, "line " + std::to_string(line) + ", column " +
                               std::to_string(column + 1) + ": cannot parse '" +
                               std::string(field) + "'");
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_csv(const Dataset& dataset) {
  std::string out = kDatasetHeader;
  out += '\n';
  out.reserve(dataset.size() * 200 + out.size());
  for (const MdtReport& r : dataset.reports) {
    out += std::to_string(r.ue_id);
    out += ',';
    out += std::to_string(r.tick);
    out += ',';
    append_fixed(out, r.position.x);
    out += ',';
    append_fixed(out, r.position.y);
    out += ',';
    out += std::to_string(r.serving_cell);
    out += ',';
    append_fixed(out, r.serving_rsrp_dbm);
    out += ',';
    append_fixed(out, r.serving_rsrq_db);
    for (double v : r.neighbor_rsrp_dbm) {
      out += ',';
      append_fixed(out, v);
    }
    for (double v : r.neighbor_rsrq_db) {
      out += ',';
      append_fixed(out, v);
    }
    out += ',';
    out += std::to_string(static_cast<int>(r.label));
    out += '\n';
  }
  return out;
}

Dataset from_csv(const std::string& text) {
  Dataset ds;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    const bool terminated = eol != std::string::npos;
    if (!terminated) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!saw_header) {
      require(line == kDatasetHeader, ErrorKind::Parse,
              "line 1: unexpected header");
      saw_header = true;
      continue;
    }
    if (line.empty() && !terminated) break;

    std::string_view fields[kColumns];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (count < kColumns)
        fields[count] = line.substr(start, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - start);
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const std::string last_good = line_no > 2
        ? "last good line " + std::to_string(line_no - 1)
        : "no data line read";
    if (count != kColumns || !terminated)
      fail(ErrorKind::Parse,
           "line " + std::to_string(line_no) + ": " +
               (terminated ? "expected 20 fields, got " + std::to_string(count)
                           : std::string("truncated row")) +
               " (" + last_good + ")");

    MdtReport r;
    r.ue_id = parse_field<int>(fields[0], line_no, 0);
    r.tick = parse_field<std::int64_t>(fields[1], line_no, 1);
    r.position.x = parse_field<double>(fields[2], line_no, 2);
    r.position.y = parse_field<double>(fields[3], line_no, 3);
    r.serving_cell = parse_field<int>(fields[4], line_no, 4);
    r.serving_rsrp_dbm = parse_field<double>(fields[5], line_no, 5);
    r.serving_rsrq_db = parse_field<double>(fields[6], line_no, 6);
    for (std::size_t k = 0; k < kNeighborSlots; ++k) {
      r.neighbor_rsrp_dbm[k] = parse_field<double>(fields[7 + k], line_no, 7 + k);
      r.neighbor_rsrq_db[k] = parse_field<double>(fields[13 + k], line_no, 13 + k);
    }
    const int label = parse_field<int>(fields[19], line_no, 19);
    require(label >= 0 && label <= 2, ErrorKind::Parse,
            "line " + std::to_string(line_no) + ": label must be 0, 1 or 2");
    r.label = static_cast<Label>(label);
    ds.reports.push_back(r);
  }
  require(saw_header, ErrorKind::Parse, "empty file: missing header");
  return ds;
}

void write_dataset(const Dataset& dataset, const std::string& path) {
  const std::string csv = to_csv(dataset);
  {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::InvalidInput, "cannot write " + path);
    out << csv;
  }
  std::ofstream side(path + ".digest", std::ios::binary);
  require(side.good(), ErrorKind::InvalidInput, "cannot write " + path + ".digest");
  side << "config " << (dataset.config_digest.empty() ? "-" : dataset.config_digest)
       << "\ncontent " << hex_digest(fnv1a64(csv)) << "\n";
}

Dataset read_dataset(const std::string& path, bool strict) {
  const std::string text = read_file(path);

  std::ifstream side(path + ".digest");
  if (!side.good()) {
    require(!strict, ErrorKind::Integrity, "missing digest sidecar for " + path);
    return from_csv(text);
  }
  std::string key, config, content;
  side >> key >> config;
  require(key == "config", ErrorKind::Integrity, "malformed digest sidecar");
  side >> key >> content;
  require(key == "content", ErrorKind::Integrity, "malformed digest sidecar");
  // Check the bytes before parsing so corruption is reported as such.
  if (strict)
    require(content == hex_digest(fnv1a64(text)), ErrorKind::Integrity,
            "content digest mismatch for " + path);
  Dataset ds = from_csv(text);
  if (config != "-") ds.config_digest = config;
  return ds;
}

}  // namespace mrif::scenario
