#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfm/csv.hpp"
#include "lfm/error.hpp"
#include "lfm/record.hpp"

namespace lfm {

// Append-only JSON-lines document store: one record object per line, field
// names identical to the CSV columns. Single writer (advisory flock on a
// companion .lock file), any number of concurrent readers.

struct StoreIssue {
  std::size_t line = 0;
  std::string message;
};

struct StoreReadResult {
  std::vector<TransmissionRecord> records;
  std::vector<StoreIssue> issues;  // corrupt lines; the rest are still served
};

struct ExportFilter {
  std::optional<Direction> direction;
  std::optional<std::string> device_id;
  std::optional<UtcInstant> from;  // inclusive, on device_timestamp
  std::optional<UtcInstant> to;    // exclusive, on device_timestamp

  bool matches(const TransmissionRecord& r) const {
    if (direction && r.direction != *direction) return false;
    if (device_id && r.device_id != *device_id) return false;
    if (from && r.device_timestamp < *from) return false;
    if (to && !(r.device_timestamp < *to)) return false;
    return true;
  }
};

// Holds the writer side of the single-writer/multi-reader contract for the
// lifetime of the object.
class StoreWriterLock {
 public:
  explicit StoreWriterLock(const std::filesystem::path& store_path) {
    const std::filesystem::path lock_path = store_path.string() + ".lock";
    fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw Error(Errc::store_io, "cannot open lock file " + lock_path.string());
    }
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw Error(Errc::store_io, "cannot lock " + lock_path.string());
    }
  }

  StoreWriterLock(const StoreWriterLock&) = delete;
  StoreWriterLock& operator=(const StoreWriterLock&) = delete;

  ~StoreWriterLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }

 private:
  int fd_ = -1;
};

inline nlohmann::json record_to_json(const TransmissionRecord& r) {
  return nlohmann::json{
      {"device_id", r.device_id},
      {"direction", std::string(to_string(r.direction))},
      {"device_timestamp", format_utc(r.device_timestamp)},
      {"server_timestamp", format_utc(r.server_timestamp)},
      {"payload_size_bytes", r.payload_size_bytes},
      {"failure_label", std::string(to_string(r.failure_label))},
  };
}

inline TransmissionRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::store_io, "record is not an object");
  TransmissionRecord r;
  r.device_id = j.at("device_id").get<std::string>();

  const auto dir = parse_direction(j.at("direction").get<std::string>());
  if (!dir) throw Error(Errc::store_io, "bad direction");
  r.direction = *dir;

  const auto device_ts = parse_utc(j.at("device_timestamp").get<std::string>());
  if (!device_ts) throw Error(Errc::store_io, "bad device_timestamp");
  r.device_timestamp = *device_ts;

  const auto server_ts = parse_utc(j.at("server_timestamp").get<std::string>());
  if (!server_ts) throw Error(Errc::store_io, "bad server_timestamp");
  r.server_timestamp = *server_ts;

  if (j.contains("payload_size_bytes")) {
    const auto& p = j.at("payload_size_bytes");
    if (!p.is_number_unsigned()) throw Error(Errc::store_io, "bad payload_size_bytes");
    r.payload_size_bytes = p.get<std::uint64_t>();
  }

  const auto label = parse_failure_label(j.at("failure_label").get<std::string>());
  if (!label) throw Error(Errc::store_io, "bad failure_label");
  r.failure_label = *label;
  return r;
}

inline std::size_t store_append(const std::filesystem::path& store_path,
                                std::span<const TransmissionRecord> records) {
  StoreWriterLock lock(store_path);
  std::ofstream out(store_path, std::ios::app | std::ios::binary);
  if (!out) {
    throw Error(Errc::store_io, "cannot open store " + store_path.string());
  }
  for (const auto& r : records) {
    out << record_to_json(r).dump() << '\n';
  }
  out.flush();
  if (!out) {
    throw Error(Errc::store_io, "write failed on " + store_path.string());
  }
  return records.size();
}

inline StoreReadResult store_read(const std::filesystem::path& store_path) {
  std::ifstream in(store_path, std::ios::binary);
  if (!in) {
    throw Error(Errc::store_io, "cannot open store " + store_path.string());
  }
  StoreReadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      result.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      result.issues.push_back({line_no, e.what()});
    }
  }
  return result;
}

// Renders matching records in the exact parse_csv column format, so
// parse_csv(store_export_csv(...)) round-trips every field.
inline std::string store_export_csv(const std::filesystem::path& store_path,
                                    const ExportFilter& filter = {},
                                    std::vector<StoreIssue>* issues = nullptr) {
  StoreReadResult read = store_read(store_path);
  if (issues) *issues = std::move(read.issues);
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : read.records) {
    if (!filter.matches(r)) continue;
    out += to_csv_row(r);
    out += '\n';
  }
  return out;
}

}  // namespace lfm
