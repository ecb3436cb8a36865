#include "riskguard/records.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <json.hpp>

namespace riskguard {

using nlohmann::json;

const char* to_string(RecordLayout layout) {
  switch (layout) {
    case RecordLayout::scored:
      return "scored";
    case RecordLayout::prediction:
      return "prediction";
    case RecordLayout::mc_dropout:
      return "mc-dropout";
  }
  return "unknown";
}

DataFormatError::DataFormatError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::size_t RecordFile::size() const {
  return std::visit([](const auto& v) { return v.size(); }, records);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, const char* name) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument(std::string("bad ") + name + " value '" + std::string(field) + "'");
  }
  return v;
}

int parse_loss(double v) {
  if (v != 0.0 && v != 1.0) throw std::invalid_argument("loss must be 0 or 1");
  return v == 1.0 ? 1 : 0;
}

double number_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
  if (!it->is_number()) throw std::invalid_argument(std::string("field '") + key + "' is not a number");
  return it->get<double>();
}

int label_field(const json& obj) {
  const auto it = obj.find("label");
  if (it == obj.end()) throw std::invalid_argument("missing field 'label'");
  if (!it->is_number_integer()) throw std::invalid_argument("field 'label' is not an integer");
  return it->get<int>();
}

std::optional<std::string> id_field(const json& obj) {
  const auto it = obj.find("id");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw std::invalid_argument("field 'id' is not a string");
  return it->get<std::string>();
}

std::vector<double> number_row(const json& row, const char* key) {
  if (!row.is_array()) throw std::invalid_argument(std::string("field '") + key + "' is not an array");
  std::vector<double> out;
  out.reserve(row.size());
  for (const auto& v : row) {
    if (!v.is_number()) throw std::invalid_argument(std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

RecordLayout detect(const json& obj) {
  const bool scored = obj.contains("kappa");
  const bool pred = obj.contains("scores");
  const bool mc = obj.contains("passes");
  if (scored + pred + mc != 1) {
    throw std::invalid_argument("cannot tell record layout (expect exactly one of kappa/scores/passes)");
  }
  return scored ? RecordLayout::scored : pred ? RecordLayout::prediction : RecordLayout::mc_dropout;
}

std::string describe(const std::optional<std::string>& id, std::size_t index) {
  return id ? "record '" + *id + "'" : "record #" + std::to_string(index);
}

}  // namespace

RecordFile read_records(std::istream& in, const std::string& source) {
  RecordFile file;
  std::vector<ScoredExample> scored;
  std::vector<PredictionRecord> preds;
  std::vector<McDropoutRecord> mcs;
  bool csv = false;
  std::size_t count = 0;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (!file.layout) {
      if (line == "kappa,loss") {
        csv = true;
        file.layout = RecordLayout::scored;
        continue;
      }
      if (line.front() != '{') {
        throw DataFormatError(source, line_no, "expected a JSON object per line or a CSV header 'kappa,loss'");
      }
    }

    try {
      if (csv) {
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
          throw std::invalid_argument("expected two comma-separated fields");
        }
        ScoredExample ex{parse_double(trim(line.substr(0, comma)), "kappa"),
                         parse_loss(parse_double(trim(line.substr(comma + 1)), "loss")), std::nullopt};
        validate(ex);
        scored.push_back(std::move(ex));
        ++count;
        continue;
      }

      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
      }
      if (!obj.is_object()) throw std::invalid_argument("expected a JSON object");
      const RecordLayout layout = detect(obj);
      if (!file.layout) file.layout = layout;
      if (layout != *file.layout) {
        throw std::invalid_argument(std::string("mixed layouts: ") + to_string(layout) + " record in a " +
                                    to_string(*file.layout) + " file");
      }

      switch (layout) {
        case RecordLayout::scored: {
          ScoredExample ex{number_field(obj, "kappa"), parse_loss(number_field(obj, "loss")), id_field(obj)};
          validate(ex);
          scored.push_back(std::move(ex));
          break;
        }
        case RecordLayout::prediction: {
          PredictionRecord rec{number_row(obj.at("scores"), "scores"), label_field(obj), id_field(obj)};
          try {
            validate(rec);
          } catch (const RecordError& e) {
            throw std::invalid_argument(describe(rec.id, count) + ": " + e.what());
          }
          preds.push_back(std::move(rec));
          break;
        }
        case RecordLayout::mc_dropout: {
          const auto& passes = obj.at("passes");
          if (!passes.is_array()) throw std::invalid_argument("field 'passes' is not an array");
          McDropoutRecord rec;
          for (const auto& row : passes) rec.passes.push_back(number_row(row, "passes"));
          rec.label = label_field(obj);
          rec.id = id_field(obj);
          try {
            validate(rec);
          } catch (const RecordError& e) {
            throw std::invalid_argument(describe(rec.id, count) + ": " + e.what());
          }
          mcs.push_back(std::move(rec));
          break;
        }
      }
      ++count;
    } catch (const DataFormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataFormatError(source, line_no, e.what());
    }
  }

  if (file.layout == RecordLayout::prediction) {
    file.records = std::move(preds);
  } else if (file.layout == RecordLayout::mc_dropout) {
    file.records = std::move(mcs);
  } else {
    file.records = std::move(scored);
  }
  return file;
}

RecordFile read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError(path.string(), 0, "cannot open file");
  return read_records(in, path.string());
}

std::string to_json_line(const ScoredExample& ex) {
  json obj = {{"kappa", ex.kappa}, {"loss", ex.loss}};
  if (ex.id) obj["id"] = *ex.id;
  return obj.dump();
}

std::string to_json_line(const PredictionRecord& rec) {
  json obj = {{"scores", rec.scores}, {"label", rec.label}};
  if (rec.id) obj["id"] = *rec.id;
  return obj.dump();
}

std::string to_json_line(const McDropoutRecord& rec) {
  json obj = {{"passes", rec.passes}, {"label", rec.label}};
  if (rec.id) obj["id"] = *rec.id;
  return obj.dump();
}

}  // namespace riskguard
