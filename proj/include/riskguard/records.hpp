#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "riskguard/confidence.hpp"

namespace riskguard {

enum class RecordLayout { scored, prediction, mc_dropout };

const char* to_string(RecordLayout layout);

/// Malformed input. The message carries the source name and line.
class DataFormatError : public std::runtime_error {
 public:
  DataFormatError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RecordFile {
  // Unset when the input held no records.
  std::optional<RecordLayout> layout;
  RecordBatch records;

  std::size_t size() const;
};

/// Reads one of the line-oriented layouts:
///   scored      {"kappa": x, "loss": 0|1, "id"?: s}   or CSV with header kappa,loss
///   prediction  {"scores": [..C..], "label": j, "id"?: s}
///   mc-dropout  {"passes": [[..C..] x T], "label": j, "id"?: s}
/// Blank lines and lines starting with '#' are skipped. The first record fixes
/// the layout; any other layout later in the file is an error.
RecordFile read_records(std::istream& in, const std::string& source = "<stream>");
RecordFile read_records(const std::filesystem::path& path);

std::string to_json_line(const ScoredExample& ex);
std::string to_json_line(const PredictionRecord& rec);
std::string to_json_line(const McDropoutRecord& rec);

}  // namespace riskguard
