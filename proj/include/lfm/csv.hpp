#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lfm/error.hpp"
#include "lfm/record.hpp"

namespace lfm {

// Canonical column set. Files must carry a header; extra columns are
// ignored, missing required ones are rejected.
inline constexpr std::string_view kCsvHeader =
    "device_id,direction,device_timestamp,server_timestamp,payload_size_bytes,failure_label";

namespace detail {

// Splits one line into fields. Fields may be double-quoted; a doubled quote
// inside a quoted field is a literal quote. Embedded newlines are not
// supported (the store never produces them).
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      if (!current.empty()) {
        throw Error(Errc::malformed_row, "quote inside unquoted field", line_no);
      }
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
    ++i;
  }
  if (in_quotes) throw Error(Errc::malformed_row, "unterminated quote", line_no);
  fields.push_back(std::move(current));
  return fields;
}

inline std::string escape_csv_field(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string to_csv_row(const TransmissionRecord& r) {
  std::string out = detail::escape_csv_field(r.device_id);
  out += ',';
  out += to_string(r.direction);
  out += ',';
  out += format_utc(r.device_timestamp);
  out += ',';
  out += format_utc(r.server_timestamp);
  out += ',';
  out += std::to_string(r.payload_size_bytes);
  out += ',';
  out += to_string(r.failure_label);
  return out;
}

inline std::string to_csv(std::span<const TransmissionRecord> records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += to_csv_row(r);
    out += '\n';
  }
  return out;
}

// Parses CSV text into records. Throws MalformedRow for wrong arity, bad
// timestamps, or bad numeric/label fields; InvalidDirection when the
// direction column is neither "uplink" nor "downlink".
inline std::vector<TransmissionRecord> parse_csv(std::string_view text) {
  constexpr std::array<std::string_view, 6> required = {
      "device_id",         "direction",          "device_timestamp",
      "server_timestamp",  "payload_size_bytes", "failure_label"};

  std::vector<TransmissionRecord> records;
  std::array<std::size_t, 6> column{};  // index into the row for each required field
  bool have_header = false;
  std::size_t header_arity = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = (eol == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    auto fields = detail::split_csv_line(line, line_no);
    if (!have_header) {
      for (std::size_t need = 0; need < required.size(); ++need) {
        bool found = false;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (fields[i] == required[need]) {
            column[need] = i;
            found = true;
            break;
          }
        }
        if (!found) {
          throw Error(Errc::malformed_row,
                      "missing required column '" + std::string(required[need]) + "'",
                      line_no);
        }
      }
      header_arity = fields.size();
      have_header = true;
      continue;
    }

    if (fields.size() != header_arity) {
      throw Error(Errc::malformed_row,
                  "expected " + std::to_string(header_arity) + " fields, got " +
                      std::to_string(fields.size()),
                  line_no);
    }

    TransmissionRecord r;
    r.device_id = fields[column[0]];

    const auto dir = parse_direction(fields[column[1]]);
    if (!dir) {
      throw Error(Errc::invalid_direction, "'" + fields[column[1]] + "'", line_no);
    }
    r.direction = *dir;

    const auto device_ts = parse_utc(fields[column[2]]);
    if (!device_ts) {
      throw Error(Errc::malformed_row, "bad device_timestamp '" + fields[column[2]] + "'",
                  line_no);
    }
    r.device_timestamp = *device_ts;

    const auto server_ts = parse_utc(fields[column[3]]);
    if (!server_ts) {
      throw Error(Errc::malformed_row, "bad server_timestamp '" + fields[column[3]] + "'",
                  line_no);
    }
    r.server_timestamp = *server_ts;

    const std::string& payload = fields[column[4]];
    if (payload.empty()) {
      r.payload_size_bytes = 0;
    } else {
      auto [ptr, ec] = std::from_chars(payload.data(), payload.data() + payload.size(),
                                       r.payload_size_bytes);
      if (ec != std::errc{} || ptr != payload.data() + payload.size()) {
        throw Error(Errc::malformed_row, "bad payload_size_bytes '" + payload + "'", line_no);
      }
    }

    const auto label = parse_failure_label(fields[column[5]]);
    if (!label) {
      throw Error(Errc::malformed_row, "bad failure_label '" + fields[column[5]] + "'",
                  line_no);
    }
    r.failure_label = *label;

    records.push_back(std::move(r));
  }

  if (!have_header) {
    throw Error(Errc::malformed_row, "missing header row", 1);
  }
  return records;
}

}  // namespace lfm
